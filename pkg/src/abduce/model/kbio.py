"""Knowledge-base text format.

A knowledge base is a line-based document with four section kinds::

    observable NAME [PARENT]
    param NAME NUMBER
    hook ID
      span REF.POINT REF.POINT LOW HIGH
      check KIND [ATTR] VALUE...
    end
    grammar HYPOTHESIS start NT
      NT -> OBSERVABLE[/env][@HOOK] [NT]
    end

Interval bounds are integers, parameter names, either of those scaled by
the instance's mean inter-event gap (``600``, ``rr_prior``,
``0.9*mean_rr``, ``premature_ratio_max*mean_rr``) or ``inf``/``-inf``.
Blank lines and ``#`` comments are ignored.  ``parse(emit(kb))``
reconstructs an identical knowledge base, and ``emit`` output is stable
byte-for-byte.
"""

from __future__ import annotations

from typing import Dict, List, Optional, Tuple, Union

from ..timeunits import INF, NEG_INF
from .grammar import GrammarRule, Role, TerminalSpec, compile_grammar
from .hooks import CHECK_KINDS, Bound, Check, ConstraintHook, Span
from .kb import KnowledgeBase
from .ontology import Ontology


class KBFormatError(ValueError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def parse_kb(text: str) -> KnowledgeBase:
    ontology = Ontology()
    params: Dict[str, float] = {}
    hooks: Dict[str, ConstraintHook] = {}
    automata = []

    lines = text.splitlines()
    i = 0
    while i < len(lines):
        line_no = i + 1
        line = _strip(lines[i])
        i += 1
        if not line:
            continue
        tokens = line.split()
        head = tokens[0]
        if head == "observable":
            if len(tokens) not in (2, 3):
                raise KBFormatError(line_no, "expected: observable NAME [PARENT]")
            try:
                ontology.add(tokens[1], tokens[2] if len(tokens) == 3 else None)
            except ValueError as exc:
                raise KBFormatError(line_no, str(exc)) from None
        elif head == "param":
            if len(tokens) != 3:
                raise KBFormatError(line_no, "expected: param NAME NUMBER")
            params[tokens[1]] = _number(tokens[2], line_no)
        elif head == "hook":
            if len(tokens) != 2:
                raise KBFormatError(line_no, "expected: hook ID")
            hook_id = tokens[1]
            directives: List[Union[Span, Check]] = []
            while True:
                if i >= len(lines):
                    raise KBFormatError(line_no, f"hook {hook_id!r} missing 'end'")
                body_no = i + 1
                body = _strip(lines[i])
                i += 1
                if not body:
                    continue
                if body == "end":
                    break
                directives.append(_parse_directive(body, body_no))
            if hook_id in hooks:
                raise KBFormatError(line_no, f"duplicate hook {hook_id!r}")
            hooks[hook_id] = ConstraintHook(hook_id, tuple(directives))
        elif head == "grammar":
            if len(tokens) != 4 or tokens[2] != "start":
                raise KBFormatError(line_no, "expected: grammar HYPOTHESIS start NT")
            hypothesis, start = tokens[1], tokens[3]
            rules: List[GrammarRule] = []
            while True:
                if i >= len(lines):
                    raise KBFormatError(line_no, f"grammar {hypothesis!r} missing 'end'")
                body_no = i + 1
                body = _strip(lines[i])
                i += 1
                if not body:
                    continue
                if body == "end":
                    break
                rules.append(_parse_rule(body, body_no))
            automata.append(compile_grammar(rules, hypothesis, start))
        else:
            raise KBFormatError(line_no, f"unknown section {head!r}")

    kb = KnowledgeBase(ontology, tuple(automata), hooks, params)
    _validate_references(kb)
    return kb


def emit_kb(kb: KnowledgeBase) -> str:
    out: List[str] = []
    for obs in kb.ontology:
        if obs.parent is None:
            out.append(f"observable {obs.name}")
        else:
            out.append(f"observable {obs.name} {obs.parent.name}")
    if kb.params:
        out.append("")
    for name, value in kb.params.items():
        out.append(f"param {name} {_format_number(value)}")
    for hook in kb.hooks.values():
        out.append("")
        out.append(f"hook {hook.id}")
        for d in hook.directives:
            if isinstance(d, Span):
                out.append(
                    f"  span {d.ref_a}.{d.point_a} {d.ref_b}.{d.point_b} "
                    f"{_format_bound(d.low)} {_format_bound(d.high)}"
                )
            else:
                parts = ["  check", d.kind]
                if d.attr is not None:
                    parts.append(d.attr)
                parts.extend(_format_number(v) if isinstance(v, (int, float)) else v for v in d.values)
                out.append(" ".join(parts))
        out.append("end")
    for automaton in kb.automata:
        out.append("")
        out.append(f"grammar {automaton.hypothesis} start {automaton.initial}")
        for r in automaton.rules:
            term = r.terminal.observable
            if r.terminal.role is Role.ENVIRONMENT:
                term += "/env"
            if r.terminal.hook is not None:
                term += f"@{r.terminal.hook}"
            if r.next is not None:
                out.append(f"  {r.head} -> {term} {r.next}")
            else:
                out.append(f"  {r.head} -> {term}")
        out.append("end")
    return "\n".join(out) + "\n"


def _strip(line: str) -> str:
    if "#" in line:
        line = line[: line.index("#")]
    return line.strip()


def _number(token: str, line_no: int) -> float:
    try:
        f = float(token)
    except ValueError:
        raise KBFormatError(line_no, f"not a number: {token!r}") from None
    return int(f) if f == int(f) and "." not in token and "e" not in token.lower() else f


def _format_number(value: float) -> str:
    # Ints print bare and parse back as ints; floats keep their point.
    if isinstance(value, int):
        return str(value)
    return repr(value)


def _parse_bound(token: str, line_no: int) -> Bound:
    scaled = False
    if token.endswith("*mean_rr"):
        scaled = True
        token = token[: -len("*mean_rr")]
    if token == "inf":
        return Bound(INF, scaled)
    if token == "-inf":
        return Bound(NEG_INF, scaled)
    try:
        return Bound(_number(token, line_no), scaled)
    except KBFormatError:
        if not token.isidentifier() and not token.replace("-", "_").isidentifier():
            raise
        return Bound(token, scaled)


def _format_bound(b: Bound) -> str:
    if isinstance(b.value, str):
        core = b.value
    elif b.value == INF:
        core = "inf"
    elif b.value == NEG_INF:
        core = "-inf"
    else:
        core = _format_number(b.value)
    return f"{core}*mean_rr" if b.mean_scaled else core


def _parse_point(token: str, line_no: int) -> Tuple[str, str]:
    if "." not in token:
        raise KBFormatError(line_no, f"expected REF.POINT, got {token!r}")
    ref, point = token.split(".", 1)
    if point not in ("begin", "end"):
        raise KBFormatError(line_no, f"unknown time point {point!r}")
    return ref, point


def _parse_directive(body: str, line_no: int) -> Union[Span, Check]:
    tokens = body.split()
    if tokens[0] == "span":
        if len(tokens) != 5:
            raise KBFormatError(line_no, "expected: span REF.POINT REF.POINT LOW HIGH")
        ref_a, point_a = _parse_point(tokens[1], line_no)
        ref_b, point_b = _parse_point(tokens[2], line_no)
        return Span(ref_a, point_a, ref_b, point_b,
                    _parse_bound(tokens[3], line_no), _parse_bound(tokens[4], line_no))
    if tokens[0] == "check":
        if len(tokens) < 2 or tokens[1] not in CHECK_KINDS:
            raise KBFormatError(line_no, f"unknown check in {body!r}")
        kind = tokens[1]
        if kind == "gap_empty":
            if len(tokens) != 2:
                raise KBFormatError(line_no, "gap_empty takes no arguments")
            return Check(kind)
        if kind == "cv_ge":
            if len(tokens) != 4:
                raise KBFormatError(line_no, "expected: check cv_ge THRESHOLD WINDOW")
            threshold = _maybe_number(tokens[2])
            return Check(kind, None, (threshold, int(tokens[3])))
        if len(tokens) < 4:
            raise KBFormatError(line_no, f"expected: check {kind} ATTR VALUE...")
        attr = tokens[2]
        values = tuple(_maybe_number(v) for v in tokens[3:])
        return Check(kind, attr, values)
    raise KBFormatError(line_no, f"unknown hook directive {tokens[0]!r}")


def _maybe_number(token: str) -> Union[float, str]:
    try:
        f = float(token)
    except ValueError:
        return token
    return int(f) if f == int(f) and "." not in token else f


def _parse_rule(body: str, line_no: int) -> GrammarRule:
    tokens = body.split()
    if len(tokens) not in (3, 4) or tokens[1] != "->":
        raise KBFormatError(line_no, "expected: NT -> TERMINAL [NT]")
    head = tokens[0]
    term = tokens[2]
    hook: Optional[str] = None
    if "@" in term:
        term, hook = term.split("@", 1)
    role = Role.ABSTRACTED
    if term.endswith("/env"):
        role = Role.ENVIRONMENT
        term = term[: -len("/env")]
    return GrammarRule(head, TerminalSpec(term, role, hook), tokens[3] if len(tokens) == 4 else None)


def _validate_references(kb: KnowledgeBase) -> None:
    for automaton in kb.automata:
        if automaton.hypothesis not in kb.ontology:
            raise ValueError(f"grammar hypothesis {automaton.hypothesis!r} is not a declared observable")
        for t in automaton.transitions:
            if t.evidence not in kb.ontology:
                raise ValueError(
                    f"{automaton.hypothesis}: transition evidence {t.evidence!r} is not declared"
                )
            if t.hook is not None and t.hook not in kb.hooks:
                raise ValueError(f"{automaton.hypothesis}: unknown hook {t.hook!r}")
