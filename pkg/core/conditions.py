"""
Condition language for rule files.

    expr  := or
    or    := and ("or" and)*
    and   := not ("and" not)*
    not   := "not" not | atom
    atom  := "(" expr ")" | "always" | "$" name | call [cmp INT]
    call  := has(X) | count(X) | mentioned(X)      X = label or @group
    cmp   := >= | <= | == | != | > | <

`has` and `count` see effective heirs decided so far, `mentioned` sees the
whole scenario. A bare call is true when its count is positive.
"""

from dataclasses import dataclass
from typing import Mapping, Protocol
import re

from .errors import RuleSyntaxError
from .taxonomy import Taxonomy


class HeirCounts(Protocol):
    def present(self, label: str) -> int: ...

    def mentioned(self, label: str) -> int: ...


class Condition:
    def evaluate(self, counts: HeirCounts) -> bool:
        raise NotImplementedError

    def references(self, positive: bool = True) -> set[str]:
        """Labels tested through has/count, under the given polarity."""
        return set()


@dataclass(frozen=True)
class Always(Condition):
    def evaluate(self, counts: HeirCounts) -> bool:
        return True

    def __str__(self) -> str:
        return "always"


@dataclass(frozen=True)
class Call(Condition):
    func: str
    target: str
    labels: tuple[str, ...]

    def value(self, counts: HeirCounts) -> int:
        if self.func == "mentioned":
            return sum(counts.mentioned(label) for label in self.labels)
        return sum(counts.present(label) for label in self.labels)

    def evaluate(self, counts: HeirCounts) -> bool:
        return self.value(counts) > 0

    def references(self, positive: bool = True) -> set[str]:
        if self.func == "mentioned" or not positive:
            return set()
        return set(self.labels)

    def __str__(self) -> str:
        return f"{self.func}({self.target})"


_COMPARATORS = {
    ">=": lambda a, b: a >= b,
    "<=": lambda a, b: a <= b,
    "==": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    ">": lambda a, b: a > b,
    "<": lambda a, b: a < b,
}


@dataclass(frozen=True)
class Compare(Condition):
    call: Call
    op: str
    number: int

    def evaluate(self, counts: HeirCounts) -> bool:
        return _COMPARATORS[self.op](self.call.value(counts), self.number)

    def references(self, positive: bool = True) -> set[str]:
        # `count(X) < n` holds when X is absent, so it reads as a negative test.
        flips = self.op in ("<", "<=") or (self.op == "==" and self.number == 0)
        return self.call.references(positive != flips)

    def __str__(self) -> str:
        return f"{self.call} {self.op} {self.number}"


@dataclass(frozen=True)
class Not(Condition):
    inner: Condition

    def evaluate(self, counts: HeirCounts) -> bool:
        return not self.inner.evaluate(counts)

    def references(self, positive: bool = True) -> set[str]:
        return self.inner.references(not positive)

    def __str__(self) -> str:
        return f"not {self.inner}"


@dataclass(frozen=True)
class And(Condition):
    parts: tuple[Condition, ...]

    def evaluate(self, counts: HeirCounts) -> bool:
        return all(p.evaluate(counts) for p in self.parts)

    def references(self, positive: bool = True) -> set[str]:
        return set().union(*(p.references(positive) for p in self.parts))

    def __str__(self) -> str:
        return "(" + " and ".join(map(str, self.parts)) + ")"


@dataclass(frozen=True)
class Or(Condition):
    parts: tuple[Condition, ...]

    def evaluate(self, counts: HeirCounts) -> bool:
        return any(p.evaluate(counts) for p in self.parts)

    def references(self, positive: bool = True) -> set[str]:
        return set().union(*(p.references(positive) for p in self.parts))

    def __str__(self) -> str:
        return "(" + " or ".join(map(str, self.parts)) + ")"


_TOKEN_RE = re.compile(
    r"\s*(?:"
    r"(?P<call>(?:has|count|mentioned)\s*\([^()]*\))"
    r"|(?P<cmp>>=|<=|==|!=|>|<)"
    r"|(?P<int>\d+)"
    r"|(?P<ref>\$[A-Za-z_]\w*)"
    r"|(?P<paren>[()])"
    r"|(?P<word>[A-Za-z_]+)"
    r")"
)
_CALL_RE = re.compile(r"^(has|count|mentioned)\s*\((.*)\)$")


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if not match or match.end() == pos:
            raise RuleSyntaxError(f"Unexpected text in condition at {text[pos:]!r}")
        kind = match.lastgroup
        tokens.append((kind, match.group(kind)))
        pos = match.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return tokens


class _Parser:
    def __init__(self, text: str, taxonomy: Taxonomy, defines: Mapping[str, Condition]):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0
        self.taxonomy = taxonomy
        self.defines = defines

    def peek(self) -> tuple[str, str]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else ("end", "")

    def take(self) -> tuple[str, str]:
        token = self.peek()
        self.pos += 1
        return token

    def fail(self, message: str) -> RuleSyntaxError:
        return RuleSyntaxError(f"{message} in condition {self.text!r}")

    def parse(self) -> Condition:
        node = self.parse_or()
        if self.peek()[0] != "end":
            raise self.fail(f"Unexpected {self.peek()[1]!r}")
        return node

    def parse_or(self) -> Condition:
        parts = [self.parse_and()]
        while self.peek() == ("word", "or"):
            self.take()
            parts.append(self.parse_and())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def parse_and(self) -> Condition:
        parts = [self.parse_not()]
        while self.peek() == ("word", "and"):
            self.take()
            parts.append(self.parse_not())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def parse_not(self) -> Condition:
        if self.peek() == ("word", "not"):
            self.take()
            return Not(self.parse_not())
        return self.parse_atom()

    def parse_atom(self) -> Condition:
        kind, text = self.take()
        if (kind, text) == ("paren", "("):
            node = self.parse_or()
            if self.take() != ("paren", ")"):
                raise self.fail("Missing ')'")
            return node
        if (kind, text) == ("word", "always"):
            return Always()
        if kind == "ref":
            name = text[1:]
            if name not in self.defines:
                raise self.fail(f"Undefined predicate ${name}")
            return self.defines[name]
        if kind == "call":
            call = self.make_call(text)
            if self.peek()[0] == "cmp":
                _, op = self.take()
                kind, number = self.take()
                if kind != "int":
                    raise self.fail(f"Expected a number after {op!r}")
                return Compare(call, op, int(number))
            return call
        raise self.fail(f"Unexpected {text or 'end of input'!r}")

    def make_call(self, text: str) -> Call:
        func, target = _CALL_RE.match(text).groups()
        target = target.strip()
        try:
            labels = self.taxonomy.expand(target)
        except (KeyError, ValueError) as e:
            raise self.fail(str(e)) from e
        return Call(func, target, labels)


def compile_condition(
    text: str,
    taxonomy: Taxonomy,
    defines: Mapping[str, Condition] | None = None,
) -> Condition:
    """Compile condition text. `$name` references are inlined from `defines`."""
    return _Parser(text, taxonomy, defines or {}).parse()
