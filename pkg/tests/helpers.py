"""Shared test utilities: randomized frames, programs, and labeled instances.

Random actions assign one polarity per touched fluent across all effect
branches, so simultaneously triggered effects can never conflict; random
validation cases are resampled until every instance's execution stays short,
which keeps the compiled search spaces small enough for exhaustive BFS.
"""

from __future__ import annotations

import random

from gpsyn.errors import ExecutionResourceError
from gpsyn.interpreter import execute
from gpsyn.model import (
    ClassicalInstance,
    Frame,
    FrameBuilder,
    GeneralizedProblem,
    Label,
    LiteralSet,
    State,
)
from gpsyn.program import (
    ActInstruction,
    EndInstruction,
    GotoInstruction,
    Program,
)


def random_frame(rng: random.Random, n_fluents: int, n_actions: int) -> Frame:
    b = FrameBuilder()
    names = [f"f{i}" for i in range(n_fluents)]
    for name in names:
        b.fluent(name)
    for a in range(n_actions):
        polarity = {name: rng.random() < 0.5 for name in names}

        def lit(name: str) -> str:
            return name if polarity[name] else "!" + name

        pre = [
            name if rng.random() < 0.5 else "!" + name
            for name in rng.sample(names, rng.randint(0, min(2, n_fluents)))
        ]
        cond = []
        for _ in range(rng.randint(1, 2)):
            when = [
                name if rng.random() < 0.5 else "!" + name
                for name in rng.sample(names, rng.randint(0, min(2, n_fluents)))
            ]
            then = [lit(name) for name in rng.sample(names, rng.randint(1, min(2, n_fluents)))]
            cond.append((when, then))
        b.action(f"a{a}", pre=pre, cond=cond)
    return b.build()


def random_program(rng: random.Random, frame: Frame, n: int) -> Program:
    lines = []
    for _ in range(n):
        roll = rng.random()
        if roll < 0.45 and frame.actions:
            lines.append(ActInstruction(rng.choice(frame.actions).name))
        elif roll < 0.9:
            lines.append(GotoInstruction(rng.randint(0, n), rng.choice(frame.fluents).name))
        else:
            lines.append(EndInstruction())
    lines.append(EndInstruction())
    return Program(tuple(lines))


def random_state(rng: random.Random, frame: Frame) -> State:
    return State(rng.getrandbits(frame.width), frame.width)


def random_goal(rng: random.Random, frame: Frame, max_literals: int = 3) -> LiteralSet:
    count = rng.randint(1, min(max_literals, frame.width))
    texts = [
        name if rng.random() < 0.5 else "!" + name
        for name in rng.sample([fl.name for fl in frame.fluents], count)
    ]
    return frame.literal_set(*texts)


def random_generalized_problem(
    rng: random.Random,
    frame: Frame,
    t: int,
    labels: list[Label] | None = None,
) -> GeneralizedProblem:
    if labels is None:
        labels = [Label.POSITIVE if rng.random() < 0.5 else Label.NEGATIVE for _ in range(t)]
    instances = tuple(
        ClassicalInstance(
            frame,
            f"rand-{i}-{label.value}",
            random_state(rng, frame),
            random_goal(rng, frame),
            label,
        )
        for i, label in enumerate(labels)
    )
    return GeneralizedProblem(frame, instances)


def random_validation_case(
    rng: random.Random,
    *,
    max_fluents: int = 6,
    max_lines: int = 3,
    max_instances: int = 3,
    max_steps: int = 60,
):
    """A (program, problem) pair whose executions all stay under ``max_steps``
    (bounds the compiled reachable space for exhaustive search)."""
    while True:
        frame = random_frame(rng, rng.randint(2, max_fluents), rng.randint(1, 3))
        program = random_program(rng, frame, rng.randint(1, max_lines))
        problem = random_generalized_problem(rng, frame, rng.randint(1, max_instances))
        try:
            outcomes = [execute(program, inst) for inst in problem.instances]
        except ExecutionResourceError:
            continue
        if all(out.steps <= max_steps for out in outcomes):
            return program, problem, outcomes
