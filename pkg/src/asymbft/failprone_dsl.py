"""Compact notation for fail-prone systems: threshold terms and set products.

Grammar (whitespace-insensitive)::

    expr := term ('*' term)*
    term := 'theta' '(' INT ',' '{' names '}' ')'
          | '{' names? '}'
          | '[' (expr (',' expr)*)? ']'

``theta(k, {a,b,c})`` enumerates all k-subsets of the named processes, ``*``
combines two families by pairwise union, and ``[...]`` is an explicit union of
alternatives (also the printed form for multi-member families).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence, Union

from .quorums import ProcessSet, SetFamily, normalize_antichain


class DslError(ValueError):
    """Syntax or binding error in trust-notation text."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


@dataclass(frozen=True)
class Literal:
    indices: tuple[int, ...]


@dataclass(frozen=True)
class Threshold:
    k: int
    indices: tuple[int, ...]


@dataclass(frozen=True)
class Product:
    left: "TrustExpr"
    right: "TrustExpr"


@dataclass(frozen=True)
class UnionList:
    items: tuple["TrustExpr", ...]


TrustExpr = Union[Literal, Threshold, Product, UnionList]


def default_roster(n: int) -> list[str]:
    return [f"p{i + 1}" for i in range(n)]


_PUNCT = "(){}[],*"


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    i = 0
    while i < len(text):
        c = text[i]
        if c.isspace():
            i += 1
        elif c in _PUNCT:
            tokens.append((c, c, i))
            i += 1
        elif c.isalnum() or c == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = "int" if word.isdigit() else "name"
            tokens.append((kind, word, i))
            i = j
        else:
            raise DslError(f"unexpected character {c!r}", i)
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, roster: Sequence[str]):
        if not roster:
            raise ValueError("roster must not be empty")
        if len(set(roster)) != len(roster):
            raise ValueError("roster names must be unique")
        self.tokens = _tokenize(text)
        self.pos = 0
        self.index_of = {name: i for i, name in enumerate(roster)}

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.pos]

    def take(self, kind: str) -> tuple[str, str, int]:
        tok = self.tokens[self.pos]
        if tok[0] != kind:
            raise DslError(f"expected {kind!r}, found {tok[1] or 'end of input'!r}", tok[2])
        self.pos += 1
        return tok

    def parse(self) -> TrustExpr:
        expr = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise DslError(f"trailing input {tok[1]!r}", tok[2])
        return expr

    def expr(self) -> TrustExpr:
        node = self.term()
        while self.peek()[0] == "*":
            self.take("*")
            node = Product(node, self.term())
        return node

    def term(self) -> TrustExpr:
        kind, value, pos = self.peek()
        if kind == "name" and value == "theta":
            return self.theta()
        if kind == "name":
            raise DslError(f"unexpected name {value!r}", pos)
        if kind == "{":
            return Literal(self.name_set())
        if kind == "[":
            return self.union_list()
        raise DslError(f"expected a term, found {value or 'end of input'!r}", pos)

    def theta(self) -> Threshold:
        self.take("name")
        self.take("(")
        kind, value, pos = self.take("int")
        k = int(value)
        self.take(",")
        names_pos = self.peek()[2]
        indices = self.name_set()
        if not 1 <= k <= len(indices):
            raise DslError(f"threshold {k} out of range for {len(indices)} names", names_pos)
        self.take(")")
        return Threshold(k, indices)

    def union_list(self) -> UnionList:
        self.take("[")
        items: list[TrustExpr] = []
        if self.peek()[0] != "]":
            items.append(self.expr())
            while self.peek()[0] == ",":
                self.take(",")
                items.append(self.expr())
        self.take("]")
        return UnionList(tuple(items))

    def name_set(self) -> tuple[int, ...]:
        self.take("{")
        seen: list[int] = []
        if self.peek()[0] != "}":
            seen.append(self.process_name())
            while self.peek()[0] == ",":
                self.take(",")
                seen.append(self.process_name())
        self.take("}")
        if len(set(seen)) != len(seen):
            raise DslError("duplicate process name in set", self.tokens[self.pos][2])
        return tuple(seen)

    def process_name(self) -> int:
        kind, value, pos = self.peek()
        if kind not in ("name", "int"):
            raise DslError(f"expected a process name, found {value or 'end of input'!r}", pos)
        self.pos += 1
        try:
            return self.index_of[value]
        except KeyError:
            raise DslError(f"unknown process name {value!r}", pos) from None


def parse(text: str, roster: Sequence[str]) -> TrustExpr:
    """Parse trust notation, binding names to indices by roster order."""
    return _Parser(text, roster).parse()


def _eval_bits(expr: TrustExpr) -> list[int]:
    if isinstance(expr, Literal):
        bits = 0
        for i in expr.indices:
            bits |= 1 << i
        return [bits]
    if isinstance(expr, Threshold):
        out = []
        for combo in itertools.combinations(expr.indices, expr.k):
            bits = 0
            for i in combo:
                bits |= 1 << i
            out.append(bits)
        return out
    if isinstance(expr, Product):
        left = _eval_bits(expr.left)
        right = _eval_bits(expr.right)
        return [a | b for a in left for b in right]
    if isinstance(expr, UnionList):
        out = []
        for item in expr.items:
            out.extend(_eval_bits(item))
        return out
    raise TypeError(f"not a trust expression: {expr!r}")


def eval(expr: TrustExpr, n: int, antichain: bool = True) -> SetFamily:
    """Expand an expression into a set family over n processes.

    By default the result is normalized to an antichain; pass antichain=False
    to keep dominated members (explicit quorum lists may contain them).
    """
    members = []
    seen = set()
    for bits in _eval_bits(expr):
        if bits >> n:
            raise ValueError(f"expression names a process outside universe of {n}")
        if bits not in seen:
            seen.add(bits)
            members.append(ProcessSet(n, bits))
    fam = SetFamily(n, tuple(members))
    return normalize_antichain(fam) if antichain else fam


def format_pset(ps: ProcessSet, roster: Sequence[str] | None = None) -> str:
    names = roster if roster is not None else default_roster(ps.n)
    return "{" + ",".join(names[i] for i in ps) + "}"


def format_family(family: SetFamily, roster: Sequence[str] | None = None) -> str:
    """Print a family as a union of literal sets; round-trips through parse/eval."""
    parts = [format_pset(m, roster) for m in family.members]
    if not parts:
        return "[]"
    if len(parts) == 1:
        return parts[0]
    return "[" + ",".join(parts) + "]"
