"""Compilations of program validation and synthesis into classical planning.

Three variants over one builder:

* synthesis from positive instances only: programming actions write
  instructions onto empty lines, execution actions simulate them, and a
  per-instance ``end`` chains through the instances to the ``done`` goal;
* validation of a given program on labeled instances: no programming actions,
  every instruction execution is preceded by a check action that records
  whether its precondition holds, a store/compare/process gadget witnesses
  repeated program states (infinite loops), and ``skip`` actions terminate an
  instance on a detected failure;
* synthesis from positive and negative instances: the validation machinery
  plus programming actions, with a ``negex`` fluent that forces execution to
  succeed exactly on the positives and fail exactly on the negatives.

Compiled instances use the same frame/state types as ordinary instances, with
base fluents keeping their original ids, so the planner runs on them directly
and solution plans decode back into programs and per-instance outcomes.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence, Union

from .errors import MalformedPlanError, ModelError, VariantMismatchError
from .interpreter import FailureKind
from .model import (
    Action,
    ConditionalEffect,
    Fluent,
    Frame,
    GeneralizedProblem,
    Label,
    LiteralSet,
    State,
    successor,
)
from .program import (
    ActInstruction,
    EndInstruction,
    GotoInstruction,
    Instruction,
    Program,
    instruction_slug,
)


class Variant(Enum):
    SYNTH_POSITIVE = "synth_positive"
    VALIDATION = "validation"
    SYNTH_PN = "synth_pn"


@dataclass(frozen=True)
class ProgramRole:
    """Programming action: writes ``instruction`` onto line ``line``."""

    line: int
    instruction: Instruction
    t: int | None = None


@dataclass(frozen=True)
class ExecRole:
    """Execution action for ``instruction`` on ``line`` (``t`` set for end)."""

    line: int
    instruction: Instruction
    t: int | None = None


@dataclass(frozen=True)
class CheckRole:
    """Check action: tests the instruction's precondition before execution."""

    line: int
    instruction: Instruction
    t: int | None = None


@dataclass(frozen=True)
class StoreRole:
    pass


@dataclass(frozen=True)
class CompareRole:
    pass


@dataclass(frozen=True)
class ProcessRole:
    pass


@dataclass(frozen=True)
class SkipRole:
    t: int


Role = Union[ProgramRole, ExecRole, CheckRole, StoreRole, CompareRole, ProcessRole, SkipRole]

_FLAGS = ("checked", "holds", "stored", "acted", "loop")


@dataclass(frozen=True)
class CompiledInstance:
    """Output of a compilation: a classical instance plus decode metadata."""

    frame: Frame
    init: State
    goal: LiteralSet
    variant: Variant
    lines: int
    instance_names: tuple[str, ...]
    labels: tuple[Label, ...]
    roles: tuple[Role, ...]
    families: dict
    base_width: int

    @property
    def name(self) -> str:
        return f"{self.variant.value}_n{self.lines}_T{len(self.labels)}"

    def role_of(self, action_index: int) -> Role:
        return self.roles[action_index]


@dataclass(frozen=True)
class DecodedProgram:
    """Program read off a solution plan's programming actions.

    Lines no programming action touched decode as ``end`` and are listed in
    ``unprogrammed``.
    """

    program: Program
    unprogrammed: tuple[int, ...]


@dataclass(frozen=True)
class TraceOutcome:
    """Per-instance result reconstructed from a solution plan."""

    t: int
    instance_name: str
    solved: bool
    failure: FailureKind | None = None
    line: int | None = None
    action: str | None = None


class _Builder:
    def __init__(
        self,
        problem: GeneralizedProblem,
        n: int,
        variant: Variant,
        *,
        program: Program | None = None,
        allow_forward_gotos: bool = True,
        instruction_whitelist: Iterable[Instruction] | None = None,
    ):
        if n < 1:
            raise ModelError("need at least one program line (n >= 1)")
        self.gp = problem
        self.base = problem.frame
        self.n = n
        self.T = problem.t_total
        self.variant = variant
        self.program = program
        self.allow_forward = allow_forward_gotos
        self.whitelist = (
            None if instruction_whitelist is None else set(instruction_whitelist)
        )
        if self.T == 0:
            raise ModelError("cannot compile an empty generalized problem")
        self.with_gadget = variant is not Variant.SYNTH_POSITIVE
        self.with_negex = variant is Variant.SYNTH_PN

        self.fluents: list[Fluent] = []
        self.ids: dict[str, int] = {}
        self.actions: list[Action] = []
        self.roles: list[Role] = []
        self.families: dict = {}

    # -- fluent table -------------------------------------------------------

    def _add_fluent(self, name: str) -> int:
        if name in self.ids:
            raise ModelError(
                f"compiled fluent name collision: {name!r} (rename the base fluent)"
            )
        idx = len(self.fluents)
        self.fluents.append(Fluent(idx, name))
        self.ids[name] = idx
        return idx

    def _line_universe(self, i: int) -> list[Instruction]:
        """Instructions that may occupy line ``i`` (the fluent family)."""
        out: list[Instruction] = []
        for act in self.base.actions:
            ins = ActInstruction(act.name)
            if self.whitelist is None or ins in self.whitelist:
                out.append(ins)
        for target in range(self.n + 1):
            if not self.allow_forward and target >= i:
                continue
            for fl in self.base.fluents:
                ins = GotoInstruction(target, fl.name)
                if self.whitelist is None or ins in self.whitelist:
                    out.append(ins)
        out.append(EndInstruction())
        return out

    def build_fluents(self) -> None:
        for fl in self.base.fluents:
            self._add_fluent(fl.name)
        self.families["base"] = list(range(self.base.width))
        self.pc = [self._add_fluent(f"pc_{i}") for i in range(self.n + 1)]
        self.families["pc"] = list(self.pc)
        self.ins: list[dict[Instruction, int]] = []
        self.nil: list[int] = []
        ins_ids = []
        self.line_universe = [self._line_universe(i) for i in range(self.n + 1)]
        for i in range(self.n + 1):
            table = {}
            for ins in self.line_universe[i]:
                table[ins] = self._add_fluent(f"ins_{i}_{instruction_slug(ins)}")
            self.ins.append(table)
            self.nil.append(self._add_fluent(f"ins_{i}_nil"))
            ins_ids.extend(table.values())
            ins_ids.append(self.nil[i])
        self.families["ins"] = ins_ids
        self.test = [self._add_fluent(f"test_{t}") for t in range(1, self.T + 1)]
        self.families["test"] = list(self.test)
        self.done = self._add_fluent("done")
        self.families["done"] = [self.done]
        if self.with_gadget:
            self.flag = {name: self._add_fluent(name) for name in _FLAGS}
            self.families["flags"] = list(self.flag.values())
            watched = list(range(self.base.width)) + self.pc
            self.watched = watched
            self.copy = {f: self._add_fluent(f"copy_{self.fluents[f].name}") for f in watched}
            self.correct = {
                f: self._add_fluent(f"correct_{self.fluents[f].name}") for f in watched
            }
            self.families["copy"] = list(self.copy.values())
            self.families["correct"] = list(self.correct.values())
        if self.with_negex:
            self.negex = self._add_fluent("negex")
            self.families["negex"] = [self.negex]

    # -- literal helpers ----------------------------------------------------

    def _ls(self, pos: Iterable[int] = (), neg: Iterable[int] = ()) -> LiteralSet:
        p = q = 0
        for f in pos:
            p |= 1 << f
        for f in neg:
            q |= 1 << f
        return LiteralSet(p, q)

    def _pre_of(self, ins: Instruction, t: int | None) -> LiteralSet:
        """The instruction's own precondition (goal + test for end copies)."""
        if isinstance(ins, ActInstruction):
            return self.base.action(ins.action).pre
        if isinstance(ins, GotoInstruction):
            return LiteralSet()
        goal = self.gp.instances[t - 1].goal
        return goal.union(self._ls(pos=[self.test[t - 1]]))

    def _reset_literals(self, next_t: int) -> LiteralSet:
        """Unconditional effect that restarts execution on instance ``next_t``:
        base state := its init, pc := 0, test advances, gadget flags clear."""
        inst = self.gp.instances[next_t - 1]
        width = self.base.width
        mask = (1 << width) - 1
        pos = inst.init.bits
        neg = mask & ~inst.init.bits
        pos |= 1 << self.pc[0]
        for j in range(1, self.n + 1):
            neg |= 1 << self.pc[j]
        neg |= 1 << self.test[next_t - 2]
        pos |= 1 << self.test[next_t - 1]
        if self.with_gadget:
            for name in _FLAGS:
                neg |= 1 << self.flag[name]
            for f in self.watched:
                neg |= 1 << self.copy[f]
                neg |= 1 << self.correct[f]
        if self.with_negex:
            if inst.label is Label.NEGATIVE:
                pos |= 1 << self.negex
            else:
                neg |= 1 << self.negex
        return LiteralSet(pos, neg)

    def _end_effects(self, t: int) -> LiteralSet:
        """What finishing instance ``t`` does (reset to next, or ``done``)."""
        if t < self.T:
            eff = self._reset_literals(t + 1)
        else:
            eff = self._ls(pos=[self.done])
            if self.with_gadget:
                eff = eff.union(
                    self._ls(
                        pos=[self.flag["acted"]],
                        neg=[self.flag["checked"], self.flag["holds"]],
                    )
                )
        return eff

    # -- action constructors ------------------------------------------------

    def _add_action(self, name: str, pre: LiteralSet, cond, role: Role) -> None:
        effects = tuple(ConditionalEffect(c, e) for c, e in cond if e)
        self.actions.append(Action(name, pre, effects))
        self.roles.append(role)

    def _prog_action(self, ins: Instruction, i: int, t: int | None) -> None:
        pre = self._pre_of(ins, t).union(self._ls(pos=[self.pc[i], self.nil[i]]))
        eff = self._ls(pos=[self.ins[i][ins]], neg=[self.nil[i]])
        slug = instruction_slug(ins)
        name = f"prog__{slug}__l{i}" + (f"__t{t}" if t is not None else "")
        self._add_action(name, pre, [(LiteralSet(), eff)], ProgramRole(i, ins, t))

    def _exec_action(self, ins: Instruction, i: int, t: int | None) -> None:
        pre = self._pre_of(ins, t).union(self._ls(pos=[self.pc[i], self.ins[i][ins]]))
        decor_pos: list[int] = []
        decor_neg: list[int] = []
        if self.with_gadget:
            pre = pre.union(self._ls(pos=[self.flag["checked"], self.flag["holds"]]))
            decor_pos = [self.flag["acted"]]
            decor_neg = [self.flag["checked"], self.flag["holds"]]
        cond: list[tuple[LiteralSet, LiteralSet]] = []
        if isinstance(ins, ActInstruction):
            base_act = self.base.action(ins.action)
            cond.extend((ce.condition, ce.effect) for ce in base_act.cond)
            move = self._ls(pos=[self.pc[i + 1]] + decor_pos, neg=[self.pc[i]] + decor_neg)
            cond.append((LiteralSet(), move))
        elif isinstance(ins, GotoInstruction):
            f = self.base.fluent_id(ins.fluent)
            if ins.target == i:
                # Self-jump: only the fall-through branch moves the counter;
                # a false condition leaves the program state unchanged.
                cond.append(
                    (self._ls(pos=[f]), self._ls(pos=[self.pc[i + 1]], neg=[self.pc[i]]))
                )
                if decor_pos:
                    cond.append((LiteralSet(), self._ls(pos=decor_pos, neg=decor_neg)))
            else:
                cond.append((LiteralSet(), self._ls(pos=decor_pos, neg=[self.pc[i]] + decor_neg)))
                cond.append((self._ls(pos=[f]), self._ls(pos=[self.pc[i + 1]])))
                cond.append((self._ls(neg=[f]), self._ls(pos=[self.pc[ins.target]])))
        else:
            if self.with_negex:
                pre = pre.union(self._ls(neg=[self.negex]))
            eff = self._end_effects(t)
            if self.with_gadget and t < self.T:
                eff = eff.union(self._ls(neg=[self.flag["checked"], self.flag["holds"]]))
            cond.append((LiteralSet(), eff))
        slug = instruction_slug(ins)
        name = f"exec__{slug}__l{i}" + (f"__t{t}" if t is not None else "")
        self._add_action(name, pre, cond, ExecRole(i, ins, t))

    def _check_action(self, ins: Instruction, i: int, t: int | None) -> None:
        pre = self._ls(
            pos=[self.pc[i], self.ins[i][ins]],
            neg=[self.flag["checked"], self.flag["loop"]],
        )
        if isinstance(ins, EndInstruction):
            # No stored copy may leak from one instance into the next, and the
            # end copy for instance t may only be checked while t is running
            # (otherwise a vacuous wrong-copy check could fail any instance
            # at will, breaking the solvability/validation equivalence).
            pre = pre.union(self._ls(pos=[self.test[t - 1]], neg=[self.flag["stored"]]))
        w_pre = self._pre_of(ins, t)
        checked = self._ls(pos=[self.flag["checked"]])
        holds = self._ls(pos=[self.flag["holds"]])
        if w_pre:
            cond = [(LiteralSet(), checked), (w_pre, holds)]
        else:
            cond = [(LiteralSet(), checked.union(holds))]
        slug = instruction_slug(ins)
        name = f"check__{slug}__l{i}" + (f"__t{t}" if t is not None else "")
        self._add_action(name, pre, cond, CheckRole(i, ins, t))

    def _gadget_actions(self) -> None:
        negex_pre = self._ls(pos=[self.negex]) if self.with_negex else LiteralSet()
        flag = self.flag
        pre = self._ls(pos=[flag["acted"]], neg=[flag["checked"], flag["stored"]])
        cond = [(LiteralSet(), self._ls(pos=[flag["stored"]], neg=[flag["acted"]]))]
        cond += [
            (self._ls(pos=[f]), self._ls(pos=[self.copy[f]])) for f in self.watched
        ]
        self._add_action("store", pre.union(negex_pre), cond, StoreRole())

        pre = self._ls(
            pos=[flag["stored"], flag["acted"]], neg=[flag["checked"], flag["loop"]]
        )
        cond = [
            (
                LiteralSet(),
                self._ls(pos=[flag["loop"]], neg=[flag["stored"], flag["acted"]]),
            )
        ]
        for f in self.watched:
            cf = self.copy[f]
            ok = self._ls(pos=[self.correct[f]])
            cond.append((self._ls(pos=[f, cf]), ok))
            cond.append((self._ls(neg=[f, cf]), ok))
        self._add_action("compare", pre.union(negex_pre), cond, CompareRole())

        pre = self._ls(pos=[flag["loop"]] + [self.correct[f] for f in self.watched])
        cond = [(LiteralSet(), self._ls(pos=[flag["checked"]], neg=[flag["loop"]]))]
        self._add_action("process", pre.union(negex_pre), cond, ProcessRole())

    def _skip_action(self, t: int) -> None:
        flag = self.flag
        pre = self._ls(
            pos=[self.test[t - 1], flag["checked"]], neg=[flag["holds"]]
        )
        if self.with_negex:
            pre = pre.union(self._ls(pos=[self.negex]))
        eff = self._end_effects(t)
        clear = self._ls(
            neg=[flag["checked"], flag["stored"]]
            + [self.copy[f] for f in self.watched]
            + [self.correct[f] for f in self.watched]
        )
        eff = LiteralSet(eff.pos | clear.pos, eff.neg | clear.neg)
        self._add_action(f"skip__t{t}", pre, [(LiteralSet(), eff)], SkipRole(t))

    # -- variants -----------------------------------------------------------

    def _programmable(self, i: int) -> list[Instruction]:
        """Instructions with programming actions on line ``i``: everything on
        interior lines, only ``end`` on line ``n`` (nothing may fall through
        past the last line)."""
        if i == self.n:
            return [ins for ins in self.line_universe[i] if isinstance(ins, EndInstruction)]
        return self.line_universe[i]

    def _instruction_actions(self, *, programming: bool, checks: bool) -> None:
        for i in range(self.n + 1):
            for ins in self._programmable(i):
                if isinstance(ins, EndInstruction):
                    for t in range(1, self.T + 1):
                        if programming:
                            self._prog_action(ins, i, t)
                        if checks:
                            self._check_action(ins, i, t)
                        self._exec_action(ins, i, t)
                else:
                    if programming:
                        self._prog_action(ins, i, None)
                    if checks:
                        self._check_action(ins, i, None)
                    self._exec_action(ins, i, None)

    def _validation_actions(self) -> None:
        for i, ins in enumerate(self.program.lines):
            if isinstance(ins, EndInstruction):
                for t in range(1, self.T + 1):
                    self._check_action(ins, i, t)
                    # Ending an instance positively is only legal on positives;
                    # negatives must leave via skip. This is what makes
                    # solvability coincide with validation.
                    if self.gp.instances[t - 1].is_positive:
                        self._exec_action(ins, i, t)
            else:
                if ins not in self.ins[i]:
                    raise ModelError(
                        f"program line {i} ({instruction_slug(ins)}) not expressible "
                        "in the compiled instruction set"
                    )
                self._check_action(ins, i, None)
                self._exec_action(ins, i, None)

    def _init_state(self) -> State:
        bits = self.gp.instances[0].init.bits
        bits |= 1 << self.pc[0]
        bits |= 1 << self.test[0]
        if self.program is None:
            for i in range(self.n + 1):
                bits |= 1 << self.nil[i]
        else:
            for i, ins in enumerate(self.program.lines):
                bits |= 1 << self.ins[i][ins]
            for i in range(len(self.program.lines), self.n + 1):
                bits |= 1 << self.nil[i]
        if self.with_negex and self.gp.instances[0].label is Label.NEGATIVE:
            bits |= 1 << self.negex
        return State(bits, len(self.fluents))

    def build(self) -> CompiledInstance:
        self.build_fluents()
        if self.variant is Variant.SYNTH_POSITIVE:
            self._instruction_actions(programming=True, checks=False)
        elif self.variant is Variant.VALIDATION:
            self._validation_actions()
            self._gadget_actions()
            for t in range(1, self.T + 1):
                if not self.gp.instances[t - 1].is_positive:
                    self._skip_action(t)
        else:
            self._instruction_actions(programming=True, checks=True)
            self._gadget_actions()
            for t in range(1, self.T + 1):
                self._skip_action(t)
        frame = Frame(tuple(self.fluents), tuple(self.actions))
        return CompiledInstance(
            frame=frame,
            init=self._init_state(),
            goal=self._ls(pos=[self.done]),
            variant=self.variant,
            lines=self.n,
            instance_names=tuple(inst.name for inst in self.gp.instances),
            labels=tuple(inst.label for inst in self.gp.instances),
            roles=tuple(self.roles),
            families=self.families,
            base_width=self.base.width,
        )


def compile_synthesis_positive(
    problem: GeneralizedProblem,
    n: int,
    *,
    allow_forward_gotos: bool = True,
    instruction_whitelist: Iterable[Instruction] | None = None,
) -> CompiledInstance:
    """Synthesis compilation over positive instances only (no failure
    detection: a program must solve every instance for the goal to be
    reachable)."""
    if problem.t_negative:
        raise VariantMismatchError(
            "positive-only synthesis got negative instances; use compile_synthesis_pn"
        )
    return _Builder(
        problem,
        n,
        Variant.SYNTH_POSITIVE,
        allow_forward_gotos=allow_forward_gotos,
        instruction_whitelist=instruction_whitelist,
    ).build()


def compile_validation(problem: GeneralizedProblem, program: Program) -> CompiledInstance:
    """Validation compilation: the program is pre-programmed in the initial
    state and the compiled instance is solvable iff the program solves every
    positive instance and fails every negative one."""
    program.check_against(problem.frame)
    return _Builder(
        problem, max(program.n, 1), Variant.VALIDATION, program=program
    ).build()


def compile_synthesis_pn(
    problem: GeneralizedProblem,
    n: int,
    *,
    allow_forward_gotos: bool = True,
    instruction_whitelist: Iterable[Instruction] | None = None,
) -> CompiledInstance:
    """Synthesis compilation with positive and negative examples."""
    if problem.t_positive == 0:
        raise VariantMismatchError(
            "at least one positive instance is required: the one-line program "
            "'0. end' covers any negative whose goals are initially unmet"
        )
    return _Builder(
        problem,
        n,
        Variant.SYNTH_PN,
        allow_forward_gotos=allow_forward_gotos,
        instruction_whitelist=instruction_whitelist,
    ).build()


def decode_program(plan: Sequence[int], compiled: CompiledInstance) -> DecodedProgram:
    """Read the program off a solution plan's programming actions."""
    if compiled.variant is Variant.VALIDATION:
        raise VariantMismatchError("validation plans contain no programming actions")
    lines: dict[int, Instruction] = {}
    for idx in plan:
        role = compiled.roles[idx]
        if isinstance(role, ProgramRole):
            if role.line in lines:
                raise MalformedPlanError(
                    f"two programming actions for line {role.line}"
                )
            lines[role.line] = role.instruction
    unprogrammed = tuple(i for i in range(compiled.lines + 1) if i not in lines)
    full = tuple(lines.get(i, EndInstruction()) for i in range(compiled.lines + 1))
    return DecodedProgram(Program(full), unprogrammed)


def decode_trace(plan: Sequence[int], compiled: CompiledInstance) -> tuple[TraceOutcome, ...]:
    """Reconstruct per-instance outcomes from a goal-reaching plan.

    An instance ends either with an end-execution action (solved) or with a
    skip action, whose immediately preceding action names the failure source:
    a failed end check is an incomplete program, a failed action check is an
    inapplicable action, and process witnesses an infinite loop.
    """
    state = compiled.init
    for idx in plan:
        state = successor(state, compiled.frame.actions[idx])
    if not compiled.goal.holds_in(state):
        raise MalformedPlanError("plan does not reach the compiled goal")

    outcomes: list[TraceOutcome] = []
    t = 1
    prev: Role | None = None
    for idx in plan:
        role = compiled.roles[idx]
        if isinstance(role, ExecRole) and isinstance(role.instruction, EndInstruction):
            if role.t != t:
                raise MalformedPlanError(f"end for instance {role.t} while running {t}")
            outcomes.append(
                TraceOutcome(t, compiled.instance_names[t - 1], solved=True)
            )
            t += 1
        elif isinstance(role, SkipRole):
            if role.t != t:
                raise MalformedPlanError(f"skip for instance {role.t} while running {t}")
            outcomes.append(_failure_from(prev, t, compiled))
            t += 1
        prev = role
    if t != len(compiled.labels) + 1:
        raise MalformedPlanError(
            f"plan terminated {t - 1} of {len(compiled.labels)} instances"
        )
    return tuple(outcomes)


def _failure_from(prev: Role | None, t: int, compiled: CompiledInstance) -> TraceOutcome:
    name = compiled.instance_names[t - 1]
    if isinstance(prev, ProcessRole):
        return TraceOutcome(t, name, solved=False, failure=FailureKind.INFINITE_LOOP)
    if isinstance(prev, CheckRole):
        if isinstance(prev.instruction, EndInstruction):
            return TraceOutcome(t, name, solved=False, failure=FailureKind.INCOMPLETE)
        if isinstance(prev.instruction, ActInstruction):
            return TraceOutcome(
                t,
                name,
                solved=False,
                failure=FailureKind.INAPPLICABLE,
                line=prev.line,
                action=prev.instruction.action,
            )
    raise MalformedPlanError(
        f"skip for instance {t} not preceded by a failure witness (got {prev!r})"
    )
