"""Direct execution of planning programs with exact failure classification.

Execution is deterministic over the finite space of program states
``(state, pc)``, so nontermination is equivalent to revisiting a program
state. The interpreter keeps an exact visited set (state bits, pc) and
classifies every failure as one of: incomplete program, inapplicable action,
or infinite loop.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Union

from .errors import ExecutionResourceError, ModelError
from .model import (
    Action,
    ClassicalInstance,
    Frame,
    GeneralizedProblem,
    State,
    is_applicable,
    successor,
)
from .program import ActInstruction, EndInstruction, GotoInstruction, Program

# Cap on distinct program states remembered per execution (configurable).
DEFAULT_STATE_CAP = 1 << 22

_ACT, _GOTO, _END = 0, 1, 2


class FailureKind(Enum):
    INCOMPLETE = "incomplete"
    INAPPLICABLE = "inapplicable"
    INFINITE_LOOP = "infinite_loop"


@dataclass(frozen=True)
class ProgramState:
    """A planning state paired with the program counter."""

    state: State
    pc: int


@dataclass(frozen=True)
class Terminated:
    """Step result for an ``end`` instruction."""


@dataclass(frozen=True)
class StepFailure:
    """An action instruction whose precondition does not hold."""

    line: int
    action: str


TERMINATED = Terminated()

StepResult = Union[ProgramState, Terminated, StepFailure]


@dataclass(frozen=True)
class ExecutionOutcome:
    """Result of running a program on one instance.

    Exactly one of: solved, or failed with a :class:`FailureKind`. For
    inapplicable actions, ``line``/``action`` identify the offender; for
    infinite loops, ``repeat_step``/``repeat_state`` record the first program
    state that recurred (replaying from it reproduces the cycle).
    """

    solved: bool
    steps: int
    failure: FailureKind | None = None
    line: int | None = None
    action: str | None = None
    repeat_step: int | None = None
    repeat_state: ProgramState | None = None

    def describe(self) -> str:
        if self.solved:
            return f"solved in {self.steps} steps"
        if self.failure is FailureKind.INCOMPLETE:
            return "failed: goal not satisfied at end"
        if self.failure is FailureKind.INAPPLICABLE:
            return f"failed: action {self.action!r} inapplicable at line {self.line}"
        return f"failed: infinite loop (program state repeated at step {self.repeat_step})"


@dataclass(frozen=True)
class ValidationReport:
    """Per-instance outcomes; passes iff positives solved and negatives failed."""

    outcomes: tuple[ExecutionOutcome, ...]
    passed: bool


def bind_program(program: Program, frame: Frame) -> list[tuple]:
    """Resolve instruction names against a frame into dispatchable ops."""
    program.check_against(frame)
    ops: list[tuple] = []
    for ins in program.lines:
        if isinstance(ins, ActInstruction):
            ops.append((_ACT, frame.action(ins.action)))
        elif isinstance(ins, GotoInstruction):
            ops.append((_GOTO, ins.target, frame.fluent_id(ins.fluent)))
        else:
            ops.append((_END,))
    return ops


def step(program: Program, frame: Frame, ps: ProgramState) -> StepResult:
    """Execute the single instruction at ``ps.pc``."""
    if not 0 <= ps.pc <= program.n:
        raise ModelError(f"program counter {ps.pc} outside [0, {program.n}]")
    ins = program.lines[ps.pc]
    if isinstance(ins, EndInstruction):
        return TERMINATED
    if isinstance(ins, ActInstruction):
        action = frame.action(ins.action)
        if not is_applicable(ps.state, action):
            return StepFailure(ps.pc, ins.action)
        return ProgramState(successor(ps.state, action), ps.pc + 1)
    # Goto: fall through when the fluent is true, jump when it is false.
    if ps.state.value(frame.fluent_id(ins.fluent)):
        return ProgramState(ps.state, ps.pc + 1)
    return ProgramState(ps.state, ins.target)


def execute(
    program: Program,
    instance: ClassicalInstance,
    *,
    state_cap: int = DEFAULT_STATE_CAP,
) -> ExecutionOutcome:
    """Run ``program`` from ``(instance.init, 0)`` to one of the outcomes."""
    frame = instance.frame
    ops = bind_program(program, frame)
    width = frame.width
    bits = instance.init.bits
    pc = 0
    steps = 0
    seen = {(bits, pc)}
    while True:
        op = ops[pc]
        kind = op[0]
        if kind == _END:
            solved = instance.goal.holds_in(State(bits, width))
            return ExecutionOutcome(
                solved=solved,
                steps=steps,
                failure=None if solved else FailureKind.INCOMPLETE,
            )
        if kind == _ACT:
            action: Action = op[1]
            if (bits & action.pre.pos) != action.pre.pos or bits & action.pre.neg:
                return ExecutionOutcome(
                    solved=False,
                    steps=steps,
                    failure=FailureKind.INAPPLICABLE,
                    line=pc,
                    action=action.name,
                )
            bits = successor(State(bits, width), action).bits
            pc += 1
        else:
            if bits >> op[2] & 1:
                pc += 1
            else:
                pc = op[1]
        steps += 1
        key = (bits, pc)
        if key in seen:
            return ExecutionOutcome(
                solved=False,
                steps=steps,
                failure=FailureKind.INFINITE_LOOP,
                repeat_step=steps,
                repeat_state=ProgramState(State(bits, width), pc),
            )
        if len(seen) >= state_cap:
            raise ExecutionResourceError(
                f"visited-state cap {state_cap} exceeded after {steps} steps"
            )
        seen.add(key)


def validate_program(
    program: Program,
    problem: GeneralizedProblem,
    *,
    state_cap: int = DEFAULT_STATE_CAP,
) -> ValidationReport:
    """Check that ``program`` solves every positive instance and fails every
    negative one (any failure source counts)."""
    outcomes = tuple(
        execute(program, inst, state_cap=state_cap) for inst in problem.instances
    )
    passed = all(
        out.solved == inst.is_positive
        for inst, out in zip(problem.instances, outcomes)
    )
    return ValidationReport(outcomes=outcomes, passed=passed)
