import pytest

from gpsyn import planner
from gpsyn.domains import (
    DOMAIN_NAMES,
    InstanceSpec,
    build_task,
    gen_fibonacci,
    gen_greenblock,
    gen_gripper,
    gen_list,
    gen_robopainter,
    gen_trisum,
    generate_instance,
    reference_program,
)
from gpsyn.errors import ModelError
from gpsyn.interpreter import execute
from gpsyn.model import Label


def brute_fib(k):
    a, b = 1, 1
    for _ in range(k - 1):
        a, b = b, a + b
    return a


def min_size(domain):
    # The Fibonacci do-while program needs at least one recurrence step.
    return 3 if domain == "fibonacci" else 1


class TestRoboPainter:
    def test_size2_positive_matches_upper_corridor(self):
        inst = gen_robopainter(2)
        frame = inst.frame
        assert inst.init.value(frame.fluent_id("at_1"))
        assert inst.goal == frame.literal_set("painted_1", "at_2")

    def test_size6_goal_paints_odd_cells(self):
        inst = gen_robopainter(6)
        assert inst.goal == inst.frame.literal_set(
            "painted_1", "painted_3", "painted_5", "at_6"
        )

    def test_size1_negative_stays_unpainted_at_start(self):
        inst = gen_robopainter(1, Label.NEGATIVE)
        assert inst.goal == inst.frame.literal_set("at_1", "!painted_1")
        # the goal holds initially, so it is trivially reachable
        assert inst.goal.holds_in(inst.init)

    def test_straight_plan_applicable_on_2x1(self):
        # inc at the boundary is a no-op, not a failure: (paint, inc, inc)
        # must execute to completion on the 2x1 corridor.
        from gpsyn.model import validate_sequential_plan

        inst = gen_robopainter(2)
        plan = [inst.frame.action(n) for n in ("paint", "inc", "inc")]
        assert validate_sequential_plan(inst, plan)


class TestGripper:
    def test_one_ball_solved_by_pick_move_drop(self):
        from gpsyn.model import validate_sequential_plan

        inst = gen_gripper(1)
        plan = [inst.frame.action(n) for n in ("pick_left", "move", "drop_left")]
        assert validate_sequential_plan(inst, plan)

    def test_three_balls_reference_program(self):
        assert execute(reference_program("gripper"), gen_gripper(3)).solved

    def test_pick_with_full_hand_is_inapplicable(self):
        from gpsyn.model import is_applicable, successor

        inst = gen_gripper(2)
        pick = inst.frame.action("pick_left")
        held = successor(inst.init, pick)
        assert not is_applicable(held, pick)


class TestNumericDomains:
    @pytest.mark.parametrize("k", [1, 2, 5, 7])
    def test_fibonacci_goal_from_brute_force(self, k):
        inst = gen_fibonacci(k)
        assert inst.goal == inst.frame.literal_set(f"val_a_{brute_fib(k)}")

    def test_fibonacci_negative_goal_off_by_one(self):
        inst = gen_fibonacci(5, Label.NEGATIVE)
        assert inst.goal == inst.frame.literal_set("val_a_4")

    @pytest.mark.parametrize("n,total", [(1, 1), (4, 10), (6, 21)])
    def test_trisum_goal_is_triangular_number(self, n, total):
        inst = gen_trisum(n)
        assert inst.goal == inst.frame.literal_set(f"val_a_{total}")

    def test_trisum_negative_one_short(self):
        inst = gen_trisum(4, Label.NEGATIVE)
        assert inst.goal == inst.frame.literal_set("val_a_9")


class TestList:
    def test_length1_visits_head_only(self):
        inst = gen_list(1)
        assert inst.goal == inst.frame.literal_set("visited_1")
        assert execute(reference_program("list"), inst).solved

    def test_length5_traversal_shape(self):
        assert execute(reference_program("list"), gen_list(5)).solved

    def test_negative_interior_node_unvisited(self):
        inst = gen_list(4, Label.NEGATIVE)
        assert inst.goal == inst.frame.literal_set("visited_1", "!visited_2")


class TestGreenBlock:
    def test_height1_collect_immediately(self):
        inst = gen_greenblock(1)
        assert execute(reference_program("greenblock"), inst).solved

    def test_height4_green_at_bottom(self):
        out = execute(reference_program("greenblock"), gen_greenblock(4, green_pos=4))
        assert out.solved

    def test_negative_holds_non_green_block(self):
        inst = gen_greenblock(3, green_pos=3, label=Label.NEGATIVE)
        assert inst.goal == inst.frame.literal_set("holding_1")

    def test_green_position_validated(self):
        with pytest.raises(ModelError):
            gen_greenblock(2, green_pos=5)


class TestCrossDomainInvariants:
    @pytest.mark.parametrize("domain", DOMAIN_NAMES)
    def test_default_positives_bfs_solvable(self, domain):
        for size in range(min_size(domain), min_size(domain) + 3):
            inst = generate_instance(domain, InstanceSpec(size))
            assert planner.goal_reachable(inst), (domain, size)

    @pytest.mark.parametrize("domain", DOMAIN_NAMES)
    def test_negatives_reachable_but_failed_by_reference_program(self, domain):
        program = reference_program(domain)
        for size in range(min_size(domain), min_size(domain) + 3):
            inst = generate_instance(domain, InstanceSpec(size, Label.NEGATIVE))
            assert planner.goal_reachable(inst), (domain, size)
            assert not execute(program, inst).solved, (domain, size)

    @pytest.mark.parametrize("domain", DOMAIN_NAMES)
    def test_reference_program_solves_positives(self, domain):
        program = reference_program(domain)
        for size in range(min_size(domain), 11):
            inst = generate_instance(domain, InstanceSpec(size))
            assert execute(program, inst).solved, (domain, size)

    @pytest.mark.parametrize("domain", DOMAIN_NAMES)
    def test_one_program_text_runs_across_sizes(self, domain):
        # same action names and per-size fluent families at every size
        program = reference_program(domain)
        small = generate_instance(domain, InstanceSpec(min_size(domain)))
        big = generate_instance(domain, InstanceSpec(9))
        program.check_against(small.frame)
        program.check_against(big.frame)

    def test_shared_frame_in_task(self):
        task = build_task("robopainter", [InstanceSpec(2), InstanceSpec(6)])
        assert task.instances[0].frame is task.instances[1].frame

    def test_goal_override(self):
        inst = generate_instance(
            "robopainter", InstanceSpec(2, Label.NEGATIVE, goal_override=("painted_2",))
        )
        assert inst.goal == inst.frame.literal_set("painted_2")
        with pytest.raises(ModelError):
            generate_instance(
                "robopainter", InstanceSpec(2, goal_override=("no_such_fluent",))
            )

    def test_unknown_domain_rejected(self):
        with pytest.raises(ModelError):
            build_task("towers_of_hanoi", [InstanceSpec(1)])

    def test_size_must_be_positive(self):
        with pytest.raises(ModelError):
            InstanceSpec(0)
