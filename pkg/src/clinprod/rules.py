"""Declarative quality/eligibility modifier rules.

Rules are data, not code: a small config grammar declares, per rule, a
predicate over the service/staff/payer/client context plus how the rule
adjusts credit when it fires (a multiplicative scale factor, or a gate
that zeroes the service). Evaluation produces a full audit trace.

Config format, one rule per block::

    rule treatment_plan_gate
      metric treatment_plan
      when not service.flags.treatment_plan_complete
      mode gate
      precedence 10
    end

Predicate expressions support =, !=, <, <=, >, >=, `in` (membership for
scalars, subset for sets), and/or/not, parentheses, numeric and quoted
string literals, true/false, and {a, b} set literals. Field paths are
dotted: service.*, staff.*, payer.*, client.*.
"""

from __future__ import annotations

import numbers
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Optional, Sequence

from .domain import PayerRule, ServiceRecord, StaffProfile


class RuleMode(str, Enum):
    SCALE = "scale"
    GATE = "gate"


class ParseError(Exception):
    def __init__(self, line: int, col: int, message: str):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col


class SemanticError(Exception):
    def __init__(self, rule_id: str, message: str):
        super().__init__(f"rule {rule_id!r}: {message}")
        self.rule_id = rule_id


class MissingField(Exception):
    def __init__(self, path: str):
        super().__init__(path)
        self.path = path


# --- expression AST -------------------------------------------------------

@dataclass(frozen=True)
class Expr:
    def evaluate(self, ctx: dict[str, Any]) -> Any:
        raise NotImplementedError

    def unparse(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class Literal(Expr):
    value: Any

    def evaluate(self, ctx):
        return self.value

    def unparse(self):
        if isinstance(self.value, bool):
            return "true" if self.value else "false"
        if isinstance(self.value, str):
            return f'"{self.value}"'
        if isinstance(self.value, frozenset):
            return "{" + ", ".join(sorted(
                Literal(v).unparse() for v in self.value)) + "}"
        return repr(self.value)


@dataclass(frozen=True)
class FieldPath(Expr):
    parts: tuple[str, ...]

    @property
    def path(self) -> str:
        return ".".join(self.parts)

    def evaluate(self, ctx):
        obj: Any = ctx
        for part in self.parts:
            if isinstance(obj, dict):
                if part not in obj:
                    raise MissingField(self.path)
                obj = obj[part]
            elif hasattr(obj, part):
                obj = getattr(obj, part)
            else:
                raise MissingField(self.path)
        return obj

    def unparse(self):
        return self.path


_CMP = {
    "=": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
}


def _membership(item: Any, container: Any) -> bool:
    if isinstance(container, (set, frozenset)):
        if isinstance(item, (set, frozenset)):
            return item <= container
        return item in container
    return item in container


@dataclass(frozen=True)
class Compare(Expr):
    op: str
    left: Expr
    right: Expr

    def evaluate(self, ctx):
        lhs = self.left.evaluate(ctx)
        rhs = self.right.evaluate(ctx)
        if self.op == "in":
            return _membership(lhs, rhs)
        return _CMP[self.op](lhs, rhs)

    def unparse(self):
        return f"{self.left.unparse()} {self.op} {self.right.unparse()}"


@dataclass(frozen=True)
class Not(Expr):
    inner: Expr

    def evaluate(self, ctx):
        return not self.inner.evaluate(ctx)

    def unparse(self):
        return f"not ({self.inner.unparse()})"


@dataclass(frozen=True)
class BoolOp(Expr):
    op: str  # "and" | "or"
    operands: tuple[Expr, ...]

    def evaluate(self, ctx):
        if self.op == "and":
            return all(o.evaluate(ctx) for o in self.operands)
        return any(o.evaluate(ctx) for o in self.operands)

    def unparse(self):
        return (" " + self.op + " ").join(
            f"({o.unparse()})" for o in self.operands)


# --- expression parser ----------------------------------------------------

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>-?\d+(\.\d+)?)
  | (?P<str>"[^"]*")
  | (?P<op><=|>=|!=|=|<|>)
  | (?P<punct>[(){},])
  | (?P<word>[A-Za-z_][A-Za-z0-9_.]*)
""", re.VERBOSE)


@dataclass
class _Token:
    kind: str
    text: str
    col: int


def _tokenize(text: str, line: int) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(line, pos + 1, f"unexpected character {text[pos]!r}")
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(_Token(kind, m.group(), pos + 1))
        pos = m.end()
    return tokens


class _ExprParser:
    def __init__(self, text: str, line: int):
        self.tokens = _tokenize(text, line)
        self.line = line
        self.end_col = len(text) + 1
        self.i = 0

    def _peek(self) -> Optional[_Token]:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def _next(self) -> _Token:
        tok = self._peek()
        if tok is None:
            raise ParseError(self.line, self.end_col, "unexpected end of expression")
        self.i += 1
        return tok

    def _expect(self, text: str) -> None:
        tok = self._next()
        if tok.text != text:
            raise ParseError(self.line, tok.col, f"expected {text!r}, got {tok.text!r}")

    def parse(self) -> Expr:
        expr = self._or()
        tok = self._peek()
        if tok is not None:
            raise ParseError(self.line, tok.col, f"unexpected {tok.text!r}")
        return expr

    def _or(self) -> Expr:
        operands = [self._and()]
        while (tok := self._peek()) and tok.text == "or":
            self._next()
            operands.append(self._and())
        return operands[0] if len(operands) == 1 else BoolOp("or", tuple(operands))

    def _and(self) -> Expr:
        operands = [self._not()]
        while (tok := self._peek()) and tok.text == "and":
            self._next()
            operands.append(self._not())
        return operands[0] if len(operands) == 1 else BoolOp("and", tuple(operands))

    def _not(self) -> Expr:
        tok = self._peek()
        if tok and tok.text == "not":
            self._next()
            return Not(self._not())
        return self._cmp()

    def _cmp(self) -> Expr:
        left = self._term()
        tok = self._peek()
        if tok and (tok.kind == "op" or tok.text == "in"):
            self._next()
            right = self._term()
            return Compare(tok.text, left, right)
        return left

    def _term(self) -> Expr:
        tok = self._next()
        if tok.text == "(":
            expr = self._or()
            self._expect(")")
            return expr
        if tok.text == "{":
            items = []
            nxt = self._peek()
            if nxt and nxt.text != "}":
                items.append(self._set_item())
                while (nxt := self._peek()) and nxt.text == ",":
                    self._next()
                    items.append(self._set_item())
            self._expect("}")
            return Literal(frozenset(items))
        if tok.kind == "num":
            value = float(tok.text)
            return Literal(int(value) if value.is_integer() else value)
        if tok.kind == "str":
            return Literal(tok.text[1:-1])
        if tok.kind == "word":
            if tok.text == "true":
                return Literal(True)
            if tok.text == "false":
                return Literal(False)
            if tok.text in ("and", "or", "not", "in"):
                raise ParseError(self.line, tok.col, f"unexpected keyword {tok.text!r}")
            return FieldPath(tuple(tok.text.split(".")))
        raise ParseError(self.line, tok.col, f"unexpected {tok.text!r}")

    def _set_item(self) -> Any:
        tok = self._next()
        if tok.kind == "str":
            return tok.text[1:-1]
        if tok.kind == "num":
            value = float(tok.text)
            return int(value) if value.is_integer() else value
        if tok.kind == "word" and tok.text not in ("and", "or", "not", "in",
                                                   "true", "false"):
            return tok.text
        raise ParseError(self.line, tok.col, "set items must be literals")


def parse_expression(text: str, line: int = 1) -> Expr:
    return _ExprParser(text, line).parse()


# --- rules ----------------------------------------------------------------

@dataclass(frozen=True)
class ModifierRule:
    rule_id: str
    metric: str
    predicate: Expr
    mode: RuleMode
    factor: float
    precedence: int = 100
    when_text: str = ""


@dataclass(frozen=True)
class ModifierOutcome:
    rule_id: str
    fired: bool
    factor_applied: float
    reason: str = ""


@dataclass(frozen=True)
class RuleSet:
    rules: tuple[ModifierRule, ...] = ()

    def ordered(self) -> list[ModifierRule]:
        return sorted(self.rules, key=lambda r: (r.precedence, r.rule_id))

    def serialize(self) -> str:
        blocks = []
        for rule in self.ordered():
            lines = [f"rule {rule.rule_id}",
                     f"  metric {rule.metric}",
                     f"  when {rule.when_text or rule.predicate.unparse()}",
                     f"  mode {rule.mode.value}"]
            if rule.mode is RuleMode.SCALE:
                lines.append(f"  factor {rule.factor}")
            lines.append(f"  precedence {rule.precedence}")
            lines.append("end")
            blocks.append("\n".join(lines))
        return "\n\n".join(blocks) + ("\n" if blocks else "")


_RULE_FIELDS = {"metric", "when", "mode", "factor", "precedence"}


def parse_rules(config: str) -> RuleSet:
    rules: list[ModifierRule] = []
    seen_ids: set[str] = set()
    current: Optional[dict[str, Any]] = None

    for lineno, raw in enumerate(config.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("rule "):
            if current is not None:
                raise ParseError(lineno, 1, "nested rule block; missing 'end'")
            rule_id = line[5:].strip()
            if not rule_id:
                raise ParseError(lineno, 6, "rule id required")
            current = {"rule_id": rule_id, "line": lineno}
            continue
        if line == "end":
            if current is None:
                raise ParseError(lineno, 1, "'end' outside a rule block")
            rules.append(_finish_rule(current, seen_ids))
            current = None
            continue
        if current is None:
            raise ParseError(lineno, 1, f"unexpected {line.split()[0]!r} outside a rule block")
        key, _, value = line.partition(" ")
        if key not in _RULE_FIELDS:
            raise ParseError(lineno, 1, f"unknown field {key!r}")
        value = value.strip()
        if key == "when":
            col_offset = raw.index(value) if value else len(raw)
            try:
                current["predicate"] = _ExprParser(value, lineno).parse()
            except ParseError as err:
                raise ParseError(lineno, err.col + col_offset, str(err).split(": ", 1)[1])
            current["when_text"] = value
        else:
            current[key] = value

    if current is not None:
        raise ParseError(len(config.splitlines()) + 1, 1,
                         f"rule {current['rule_id']!r} missing 'end'")
    return RuleSet(tuple(rules))


def _finish_rule(raw: dict[str, Any], seen_ids: set[str]) -> ModifierRule:
    rule_id = raw["rule_id"]
    if rule_id in seen_ids:
        raise SemanticError(rule_id, "duplicate rule id")
    seen_ids.add(rule_id)
    if "predicate" not in raw:
        raise SemanticError(rule_id, "missing 'when' predicate")
    if "mode" not in raw:
        raise SemanticError(rule_id, "missing 'mode'")
    try:
        mode = RuleMode(raw["mode"])
    except ValueError:
        raise SemanticError(rule_id, f"unknown mode {raw['mode']!r}")

    factor_text = raw.get("factor")
    if mode is RuleMode.GATE:
        if factor_text is not None and float(factor_text) != 0:
            raise SemanticError(rule_id, "gate requires factor 0")
        factor = 0.0
    else:
        if factor_text is None:
            raise SemanticError(rule_id, "scale rule requires a factor")
        factor = float(factor_text)
        if not 0 < factor <= 2:
            raise SemanticError(rule_id, "scale factor must be in (0, 2]")

    try:
        precedence = int(raw.get("precedence", 100))
    except ValueError:
        raise SemanticError(rule_id, f"bad precedence {raw['precedence']!r}")

    return ModifierRule(
        rule_id=rule_id,
        metric=raw.get("metric", rule_id),
        predicate=raw["predicate"],
        mode=mode,
        factor=factor,
        precedence=precedence,
        when_text=raw.get("when_text", ""),
    )


def evaluate(service: ServiceRecord, profile: StaffProfile,
             payer: Optional[PayerRule], rules: RuleSet,
             client: Optional[dict[str, Any]] = None) -> list[ModifierOutcome]:
    """Evaluate every rule against the service context, in (precedence, id) order."""
    ctx: dict[str, Any] = {
        "service": service,
        "staff": profile,
        "payer": payer if payer is not None else {},
        "client": client or {},
    }
    outcomes = []
    for rule in rules.ordered():
        try:
            fired = bool(rule.predicate.evaluate(ctx))
        except MissingField as err:
            outcomes.append(ModifierOutcome(
                rule.rule_id, fired=False, factor_applied=1.0,
                reason=f"missing field: {err.path}"))
            continue
        if fired:
            outcomes.append(ModifierOutcome(
                rule.rule_id, fired=True, factor_applied=rule.factor,
                reason=rule.metric))
        else:
            outcomes.append(ModifierOutcome(rule.rule_id, fired=False,
                                            factor_applied=1.0))
    return outcomes


def compose(outcomes: Sequence[ModifierOutcome]) -> float:
    """Composite modifier: product over fired outcomes, 1 for none."""
    factor = 1.0
    for outcome in outcomes:
        if outcome.fired:
            factor *= outcome.factor_applied
    return factor
