"""Ground PDDL export and (re)import.

Output is fully ground: every fluent becomes a 0-ary predicate, every action
a parameterless action. Requirements are ``:strips :negative-preconditions
:conditional-effects``. The reader accepts exactly this fragment, so anything
the writer emits round-trips; action and fluent names are preserved verbatim
(compiled action names embed their decode role, which therefore survives the
round-trip).
"""

from __future__ import annotations

from pathlib import Path

from .errors import ParseError
from .model import (
    ClassicalInstance,
    Frame,
    FrameBuilder,
    Label,
    LiteralSet,
)

_NAME_OK = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_-")


def _check_name(name: str) -> str:
    if not name or not set(name) <= _NAME_OK or name[0].isdigit():
        raise ParseError(f"name {name!r} is not PDDL-safe")
    return name


def _literal_sexp(ls: LiteralSet, frame: Frame) -> list[str]:
    parts = []
    for lit in ls.literals():
        name = frame.fluents[lit.fluent].name
        parts.append(f"({name})" if lit.positive else f"(not ({name}))")
    return parts


def write_domain(frame: Frame, domain_name: str = "gpsyn-domain") -> str:
    lines = [f"(define (domain {_check_name(domain_name)})"]
    lines.append("  (:requirements :strips :negative-preconditions :conditional-effects)")
    preds = " ".join(f"({_check_name(fl.name)})" for fl in frame.fluents)
    lines.append(f"  (:predicates {preds})")
    for act in frame.actions:
        lines.append(f"  (:action {_check_name(act.name)}")
        lines.append("    :parameters ()")
        lines.append(f"    :precondition (and {' '.join(_literal_sexp(act.pre, frame))})")
        effs = []
        for ce in act.cond:
            then = " ".join(_literal_sexp(ce.effect, frame))
            if ce.condition:
                when = " ".join(_literal_sexp(ce.condition, frame))
                effs.append(f"(when (and {when}) (and {then}))")
            else:
                effs.append(then)
        lines.append(f"    :effect (and {' '.join(effs)})")
        lines.append("  )")
    lines.append(")")
    return "\n".join(lines) + "\n"


def write_problem(
    problem,
    problem_name: str = "gpsyn-problem",
    domain_name: str = "gpsyn-domain",
) -> str:
    """``problem`` needs frame/init/goal (classical or compiled instance)."""
    frame = problem.frame
    lines = [f"(define (problem {_check_name(problem_name)})"]
    lines.append(f"  (:domain {_check_name(domain_name)})")
    init = " ".join(f"({frame.fluents[f].name})" for f in problem.init.true_fluents())
    lines.append(f"  (:init {init})")
    lines.append(f"  (:goal (and {' '.join(_literal_sexp(problem.goal, frame))}))")
    lines.append(")")
    return "\n".join(lines) + "\n"


def export_files(problem, out_dir, stem: str = "instance", domain_name: str = "gpsyn-domain"):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    domain_path = out / "domain.pddl"
    problem_path = out / f"{stem}.pddl"
    domain_path.write_text(write_domain(problem.frame, domain_name))
    problem_path.write_text(write_problem(problem, stem, domain_name))
    return domain_path, problem_path


# -- reader ------------------------------------------------------------------

def _tokenize(text: str) -> list[str]:
    out = []
    for raw in text.splitlines():
        line = raw.split(";", 1)[0]
        out.extend(line.replace("(", " ( ").replace(")", " ) ").split())
    return out


def _parse_sexp(tokens: list[str], pos: int = 0):
    if tokens[pos] != "(":
        return tokens[pos], pos + 1
    items = []
    pos += 1
    while tokens[pos] != ")":
        item, pos = _parse_sexp(tokens, pos)
        items.append(item)
    return items, pos + 1


def _read_sexp(text: str):
    tokens = _tokenize(text)
    if not tokens:
        raise ParseError("empty PDDL input")
    try:
        sexp, pos = _parse_sexp(tokens)
    except IndexError:
        raise ParseError("unbalanced parentheses in PDDL input") from None
    if pos != len(tokens):
        raise ParseError("trailing tokens after PDDL s-expression")
    return sexp


def _flatten_literals(expr) -> list[tuple[str, bool]]:
    """``(and ...)`` / ``(p)`` / ``(not (p))`` into (name, polarity) pairs."""
    if not isinstance(expr, list) or not expr:
        raise ParseError(f"expected literal expression, got {expr!r}")
    head = expr[0]
    if head == "and":
        out = []
        for sub in expr[1:]:
            out.extend(_flatten_literals(sub))
        return out
    if head == "not":
        inner = _flatten_literals(expr[1])
        if len(inner) != 1 or not inner[0][1]:
            raise ParseError(f"unsupported negation {expr!r}")
        return [(inner[0][0], False)]
    if len(expr) != 1:
        raise ParseError(f"only 0-ary predicates supported, got {expr!r}")
    return [(head, True)]


def _text(pairs: list[tuple[str, bool]]) -> list[str]:
    return [name if positive else "!" + name for name, positive in pairs]


def read_domain(text: str) -> Frame:
    sexp = _read_sexp(text)
    if sexp[0] != "define" or sexp[1][0] != "domain":
        raise ParseError("not a PDDL domain")
    builder = FrameBuilder()
    actions = []
    for section in sexp[2:]:
        if section[0] == ":predicates":
            for pred in section[1:]:
                if not isinstance(pred, list) or len(pred) != 1:
                    raise ParseError(f"only 0-ary predicates supported, got {pred!r}")
                builder.fluent(pred[0])
        elif section[0] == ":action":
            actions.append(section)
        elif section[0] == ":requirements":
            continue
    for section in actions:
        name = section[1]
        fields = dict(zip(section[2::2], section[3::2]))
        params = fields.get(":parameters", [])
        if params:
            raise ParseError(f"action {name!r}: only ground actions supported")
        pre = _text(_flatten_literals(fields[":precondition"])) if ":precondition" in fields else []
        cond = []
        effect = fields.get(":effect", ["and"])
        if effect[0] != "and":
            effect = ["and", effect]
        plain: list[tuple[str, bool]] = []
        for item in effect[1:]:
            if isinstance(item, list) and item and item[0] == "when":
                cond.append((_text(_flatten_literals(item[1])), _text(_flatten_literals(item[2]))))
            else:
                plain.extend(_flatten_literals(item))
        if plain:
            cond.insert(0, ([], _text(plain)))
        builder.action(name, pre=pre, cond=cond)
    return builder.build()


def read_problem(text: str, frame: Frame, label: Label = Label.POSITIVE) -> ClassicalInstance:
    sexp = _read_sexp(text)
    if sexp[0] != "define" or sexp[1][0] != "problem":
        raise ParseError("not a PDDL problem")
    name = sexp[1][1]
    init_names: list[str] = []
    goal = LiteralSet()
    for section in sexp[2:]:
        if section[0] == ":init":
            for item in section[1:]:
                pairs = _flatten_literals(item)
                if len(pairs) != 1 or not pairs[0][1]:
                    raise ParseError(f"unsupported init literal {item!r}")
                init_names.append(pairs[0][0])
        elif section[0] == ":goal":
            goal = frame.literal_set(*_text(_flatten_literals(section[1])))
    return ClassicalInstance(frame, name, frame.state(init_names), goal, label)


def read_files(domain_path, problem_path, label: Label = Label.POSITIVE) -> ClassicalInstance:
    frame = read_domain(Path(domain_path).read_text())
    return read_problem(Path(problem_path).read_text(), frame, label)
