"""Propositional planning model with conditional effects.

Fluents are densely indexed; states are fixed-width bit vectors (one bit per
fluent) and literal sets are pairs of bitmasks (asserted-true, asserted-false).
Compiled instances produced by :mod:`gpsyn.compiler` reuse these types, so the
representation has to stay cheap at a few hundred fluents.

All types are immutable values after construction and safe to share.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Iterable, Iterator, Sequence, Union

from .errors import ConflictError, InapplicableActionError, ModelError


@dataclass(frozen=True)
class Fluent:
    """A propositional state variable, identified by a dense index."""

    index: int
    name: str


@dataclass(frozen=True)
class Literal:
    """A fluent with a polarity."""

    fluent: int
    positive: bool = True

    def negated(self) -> "Literal":
        return Literal(self.fluent, not self.positive)

    def render(self, frame: "Frame") -> str:
        name = frame.fluents[self.fluent].name
        return name if self.positive else "!" + name


class LiteralSet:
    """A consistent partial assignment of values to fluents.

    Stored as two bitmasks: ``pos`` for fluents asserted true and ``neg`` for
    fluents asserted false. A fluent never appears in both.
    """

    __slots__ = ("pos", "neg")

    def __init__(self, pos: int = 0, neg: int = 0):
        if pos & neg:
            raise ConflictError(
                f"literal set assigns both polarities to fluents {_bit_ids(pos & neg)}"
            )
        self.pos = pos
        self.neg = neg

    @classmethod
    def from_literals(cls, literals: Iterable[Literal]) -> "LiteralSet":
        pos = neg = 0
        for lit in literals:
            if lit.positive:
                pos |= 1 << lit.fluent
            else:
                neg |= 1 << lit.fluent
        return cls(pos, neg)

    def literals(self) -> Iterator[Literal]:
        for f in _bit_ids(self.pos):
            yield Literal(f, True)
        for f in _bit_ids(self.neg):
            yield Literal(f, False)

    def union(self, other: "LiteralSet") -> "LiteralSet":
        """Combine two literal sets, raising :class:`ConflictError` on clash."""
        clash = (self.pos & other.neg) | (self.neg & other.pos)
        if clash:
            raise ConflictError(
                f"conflicting polarities for fluents {_bit_ids(clash)} in union"
            )
        return LiteralSet(self.pos | other.pos, self.neg | other.neg)

    def conflicts_with(self, other: "LiteralSet") -> bool:
        return bool((self.pos & other.neg) | (self.neg & other.pos))

    def negate(self) -> "LiteralSet":
        """The complement view: every literal with its polarity flipped."""
        return LiteralSet(self.neg, self.pos)

    def holds_in(self, state: "State") -> bool:
        bits = state.bits
        return (bits & self.pos) == self.pos and (bits & self.neg) == 0

    def contains(self, other: "LiteralSet") -> bool:
        return (self.pos & other.pos) == other.pos and (self.neg & other.neg) == other.neg

    def render(self, frame: "Frame") -> str:
        return "{" + ", ".join(l.render(frame) for l in self.literals()) + "}"

    def __len__(self) -> int:
        return (self.pos | self.neg).bit_count()

    def __bool__(self) -> bool:
        return bool(self.pos | self.neg)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, LiteralSet)
            and self.pos == other.pos
            and self.neg == other.neg
        )

    def __hash__(self) -> int:
        return hash((self.pos, self.neg))

    def __repr__(self) -> str:
        return f"LiteralSet(pos={self.pos:#x}, neg={self.neg:#x})"


EMPTY = LiteralSet()


class State:
    """A total assignment over a frame's fluents, as a width-checked bitmask."""

    __slots__ = ("bits", "width")

    def __init__(self, bits: int, width: int):
        if bits >> width:
            raise ModelError(f"state bits {bits:#x} exceed width {width}")
        self.bits = bits
        self.width = width

    def value(self, fluent: int) -> bool:
        if fluent >= self.width:
            raise ModelError(f"fluent id {fluent} out of range for width {self.width}")
        return bool(self.bits >> fluent & 1)

    def satisfies(self, condition: LiteralSet) -> bool:
        return condition.holds_in(self)

    def true_fluents(self) -> Iterator[int]:
        return _bit_ids(self.bits)

    def render(self, frame: "Frame") -> str:
        return "{" + ", ".join(frame.fluents[f].name for f in self.true_fluents()) + "}"

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, State)
            and self.bits == other.bits
            and self.width == other.width
        )

    def __hash__(self) -> int:
        return hash((self.bits, self.width))

    def __repr__(self) -> str:
        return f"State({self.bits:#x}, width={self.width})"


@dataclass(frozen=True)
class ConditionalEffect:
    """A ``condition -> effect`` pair; the effect fires when the condition holds."""

    condition: LiteralSet
    effect: LiteralSet

    def __post_init__(self):
        if not self.effect:
            raise ModelError("conditional effect with empty effect set")


@dataclass(frozen=True)
class Action:
    """A ground action: precondition plus a set of conditional effects."""

    name: str
    pre: LiteralSet
    cond: tuple[ConditionalEffect, ...]


@dataclass(frozen=True)
class Frame:
    """Shared fluent and action sets for a family of instances."""

    fluents: tuple[Fluent, ...]
    actions: tuple[Action, ...]

    def __post_init__(self):
        names = set()
        for i, fl in enumerate(self.fluents):
            if fl.index != i:
                raise ModelError(f"fluent ids not contiguous: {fl.name} has {fl.index} at {i}")
            if fl.name in names:
                raise ModelError(f"duplicate fluent name {fl.name!r}")
            names.add(fl.name)
        width = len(self.fluents)
        seen = set()
        for act in self.actions:
            if act.name in seen:
                raise ModelError(f"duplicate action name {act.name!r}")
            seen.add(act.name)
            masks = [act.pre.pos, act.pre.neg]
            for ce in act.cond:
                masks += [ce.condition.pos, ce.condition.neg, ce.effect.pos, ce.effect.neg]
            for m in masks:
                if m >> width:
                    raise ModelError(f"action {act.name!r} references fluents outside frame")

    @property
    def width(self) -> int:
        return len(self.fluents)

    @cached_property
    def _fluent_ids(self) -> dict:
        return {fl.name: fl.index for fl in self.fluents}

    @cached_property
    def _actions_by_name(self) -> dict:
        return {a.name: a for a in self.actions}

    def fluent_id(self, name: str) -> int:
        try:
            return self._fluent_ids[name]
        except KeyError:
            raise ModelError(f"unknown fluent {name!r}") from None

    def has_fluent(self, name: str) -> bool:
        return name in self._fluent_ids

    def action(self, name: str) -> Action:
        try:
            return self._actions_by_name[name]
        except KeyError:
            raise ModelError(f"unknown action {name!r}") from None

    def has_action(self, name: str) -> bool:
        return name in self._actions_by_name

    def literal(self, text: str) -> Literal:
        """Parse ``"name"`` / ``"!name"`` into a literal."""
        if text.startswith("!"):
            return Literal(self.fluent_id(text[1:]), False)
        return Literal(self.fluent_id(text), True)

    def literal_set(self, *texts: str) -> LiteralSet:
        return LiteralSet.from_literals(self.literal(t) for t in texts)

    def state(self, true_names: Iterable[str]) -> State:
        bits = 0
        for name in true_names:
            bits |= 1 << self.fluent_id(name)
        return State(bits, self.width)


class FrameBuilder:
    """Incremental construction of a frame from fluent/action descriptions."""

    def __init__(self):
        self._fluents: list[Fluent] = []
        self._ids: dict[str, int] = {}
        self._actions: list[Action] = []

    def fluent(self, name: str) -> int:
        if name in self._ids:
            raise ModelError(f"duplicate fluent name {name!r}")
        idx = len(self._fluents)
        self._fluents.append(Fluent(idx, name))
        self._ids[name] = idx
        return idx

    def _lit_set(self, texts: Iterable[str]) -> LiteralSet:
        pos = neg = 0
        for text in texts:
            if text.startswith("!"):
                neg |= 1 << self._ids[text[1:]]
            else:
                pos |= 1 << self._ids[text]
        return LiteralSet(pos, neg)

    def action(
        self,
        name: str,
        pre: Iterable[str] = (),
        cond: Iterable[tuple[Iterable[str], Iterable[str]]] = (),
    ) -> None:
        effects = tuple(
            ConditionalEffect(self._lit_set(c), self._lit_set(e)) for c, e in cond
        )
        self._actions.append(Action(name, self._lit_set(pre), effects))

    def build(self) -> Frame:
        return Frame(tuple(self._fluents), tuple(self._actions))


class Label(Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"


@dataclass(frozen=True)
class ClassicalInstance:
    """One classical problem: shared frame plus its own init, goal and label."""

    frame: Frame
    name: str
    init: State
    goal: LiteralSet
    label: Label = Label.POSITIVE

    def __post_init__(self):
        if self.init.width != self.frame.width:
            raise ModelError(f"instance {self.name!r}: init width mismatch")
        if (self.goal.pos | self.goal.neg) >> self.frame.width:
            raise ModelError(f"instance {self.name!r}: goal references unknown fluents")

    @property
    def is_positive(self) -> bool:
        return self.label is Label.POSITIVE


@dataclass(frozen=True)
class GeneralizedProblem:
    """An ordered set of labeled classical instances over one frame.

    Synthesis additionally requires at least one positive instance; that
    constraint is enforced where it matters (the synthesis compilations), so
    that purely negative or empty sets remain usable for validation and
    evaluation.
    """

    frame: Frame
    instances: tuple[ClassicalInstance, ...]

    def __post_init__(self):
        for inst in self.instances:
            if inst.frame is not self.frame and inst.frame != self.frame:
                raise ModelError(f"instance {inst.name!r} uses a different frame")

    @property
    def t_total(self) -> int:
        return len(self.instances)

    @property
    def t_positive(self) -> int:
        return sum(1 for i in self.instances if i.is_positive)

    @property
    def t_negative(self) -> int:
        return self.t_total - self.t_positive

    def positives(self) -> tuple[ClassicalInstance, ...]:
        return tuple(i for i in self.instances if i.is_positive)

    def negatives(self) -> tuple[ClassicalInstance, ...]:
        return tuple(i for i in self.instances if not i.is_positive)


PlanLike = Sequence[Union[Action, int]]


def is_applicable(state: State, action: Action) -> bool:
    """True iff the action's precondition is a subset of the (total) state."""
    return action.pre.holds_in(state)


def triggered_effects(state: State, action: Action) -> LiteralSet:
    """Union of effects whose conditions hold in ``state``.

    Raises :class:`ConflictError` when two triggered effects assert opposite
    polarities of one fluent; the paper assumes consistency WLOG, so a clash
    means the domain encoding is broken and must not be papered over.
    """
    pos = neg = 0
    for ce in action.cond:
        if ce.condition.holds_in(state):
            pos |= ce.effect.pos
            neg |= ce.effect.neg
    if pos & neg:
        raise ConflictError(
            f"action {action.name!r} triggers conflicting effects on fluents "
            f"{_bit_ids(pos & neg)}"
        )
    return LiteralSet(pos, neg)


def successor(state: State, action: Action) -> State:
    """The state after applying ``action``; fluents outside the triggered
    effects keep their polarity."""
    if not is_applicable(state, action):
        raise InapplicableActionError(f"action {action.name!r} not applicable")
    eff = triggered_effects(state, action)
    return State((state.bits | eff.pos) & ~eff.neg, state.width)


def validate_sequential_plan(problem, plan: PlanLike) -> bool:
    """True iff every action applies in sequence and the goal holds at the end.

    ``problem`` needs ``frame``/``init``/``goal``, so both classical and
    compiled instances work. Inapplicability yields ``False``, not an error.
    """
    state = problem.init
    for step in plan:
        action = problem.frame.actions[step] if isinstance(step, int) else step
        if not is_applicable(state, action):
            return False
        state = successor(state, action)
    return problem.goal.holds_in(state)


def _bit_ids(mask: int) -> list[int]:
    ids = []
    i = 0
    while mask:
        if mask & 1:
            ids.append(i)
        mask >>= 1
        i += 1
    return ids
