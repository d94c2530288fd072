"""LTL formulas in negation normal form over atomic propositions.

Grammar (highest precedence first)::

    primary  := 'true' | IDENT | '(' formula ')'
    unary    := 'F' unary | 'G' unary | '!' IDENT | primary
    until    := unary ('U' until)?          # right associative
    and      := until ('&' until)*
    formula  := and ('|' and)*

Negation is only allowed directly on an atom. There is no next operator.
"""

import logging
import re
from dataclasses import dataclass
from typing import FrozenSet, List, Sequence

from ltlcompose.errors import LtlSyntaxError, NegationError, UndeclaredAtomError

logger = logging.getLogger(__name__)


class Ltl:
    pass


@dataclass(frozen=True)
class Top(Ltl):
    pass


@dataclass(frozen=True)
class Atom(Ltl):
    name: str


@dataclass(frozen=True)
class NotAtom(Ltl):
    name: str


@dataclass(frozen=True)
class And(Ltl):
    left: Ltl
    right: Ltl


@dataclass(frozen=True)
class Or(Ltl):
    left: Ltl
    right: Ltl


@dataclass(frozen=True)
class Until(Ltl):
    left: Ltl
    right: Ltl


@dataclass(frozen=True)
class Eventually(Ltl):
    operand: Ltl


@dataclass(frozen=True)
class Always(Ltl):
    operand: Ltl


KEYWORDS = {"F", "G", "U", "true"}

_TOKEN = re.compile(r"[A-Za-z_][A-Za-z0-9_]*|[()&|!]")


def tokenize(text: str):
    """Split into (token, offset) pairs, closed by a (None, len) end marker."""
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            raise LtlSyntaxError(f"unexpected character {text[pos]!r}", pos)
        tokens.append((m.group(0), pos))
        pos = m.end()
    tokens.append((None, len(text)))
    return tokens


class Parser:
    def __init__(self, text: str, atoms=None):
        self._tokens = tokenize(text)
        self._index = 0
        self._atoms = None if atoms is None else frozenset(atoms)

    @property
    def token(self):
        return self._tokens[self._index][0]

    @property
    def position(self):
        return self._tokens[self._index][1]

    def advance(self):
        self._index += 1

    def expect(self, value):
        if self.token != value:
            found = "end of input" if self.token is None else repr(self.token)
            raise LtlSyntaxError(f"expected {value!r}, found {found}", self.position)
        self.advance()

    def parse(self) -> Ltl:
        formula = self.disjunction()
        if self.token is not None:
            raise LtlSyntaxError(f"unexpected {self.token!r}", self.position)
        return formula

    def disjunction(self):
        value = self.conjunction()
        while self.token == "|":
            self.advance()
            value = Or(value, self.conjunction())
        return value

    def conjunction(self):
        value = self.until()
        while self.token == "&":
            self.advance()
            value = And(value, self.until())
        return value

    def until(self):
        value = self.unary()
        if self.token == "U":
            self.advance()
            return Until(value, self.until())
        return value

    def unary(self):
        token = self.token
        if token == "F":
            self.advance()
            return Eventually(self.unary())
        if token == "G":
            self.advance()
            return Always(self.unary())
        if token == "!":
            pos = self.position
            self.advance()
            if self.token is None or self.token in KEYWORDS or not _is_ident(self.token):
                raise NegationError("negation may only be applied to an atom", pos)
            return NotAtom(self.atom())
        return self.primary()

    def primary(self):
        token = self.token
        if token == "true":
            self.advance()
            return Top()
        if token == "(":
            self.advance()
            value = self.disjunction()
            self.expect(")")
            return value
        if token is not None and token not in KEYWORDS and _is_ident(token):
            return Atom(self.atom())
        found = "end of input" if token is None else repr(token)
        raise LtlSyntaxError(f"expected a formula, found {found}", self.position)

    def atom(self) -> str:
        name, pos = self.token, self.position
        if self._atoms is not None and name not in self._atoms:
            raise UndeclaredAtomError(f"undeclared atom {name!r}", pos)
        self.advance()
        return name


def _is_ident(token: str) -> bool:
    return bool(re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", token))


def is_atom_name(name) -> bool:
    """Whether a map symbol can be written as an atom in a formula."""
    return isinstance(name, str) and name not in KEYWORDS and _is_ident(name)


def parse_ltl(text: str, atoms=None) -> Ltl:
    """Parse a formula; with ``atoms`` given, every atom must be declared."""
    formula = Parser(text, atoms).parse()
    logger.debug("parsed %r as %s", text, to_text(formula))
    return formula


def to_text(formula: Ltl) -> str:
    match formula:
        case Top():
            return "true"
        case Atom(name):
            return name
        case NotAtom(name):
            return f"!{name}"
        case Eventually(f):
            return f"F {to_text(f)}"
        case Always(f):
            return f"G {to_text(f)}"
        case And(l, r):
            return f"({to_text(l)} & {to_text(r)})"
        case Or(l, r):
            return f"({to_text(l)} | {to_text(r)})"
        case Until(l, r):
            return f"({to_text(l)} U {to_text(r)})"
        case _:
            raise ValueError(f"Unsupported LTL construct: {formula}")


def atoms(formula: Ltl) -> FrozenSet[str]:
    match formula:
        case Atom(name) | NotAtom(name):
            return frozenset([name])
        case Eventually(f) | Always(f):
            return atoms(f)
        case And(l, r) | Or(l, r) | Until(l, r):
            return atoms(l) | atoms(r)
        case _:
            return frozenset()


def size(formula: Ltl) -> int:
    match formula:
        case Eventually(f) | Always(f):
            return 1 + size(f)
        case And(l, r) | Or(l, r) | Until(l, r):
            return 1 + size(l) + size(r)
        case _:
            return 1


# --------------------------------------------------
# Semantics on ultimately periodic words
# --------------------------------------------------

def _successor(i, n, m):
    return i + 1 if i + 1 < n + m else n


def _fixpoint(step, n, m, start):
    # start=False: least fixpoint (until), start=True: greatest (always)
    value = [start] * (n + m)
    changed = True
    while changed:
        changed = False
        for i in reversed(range(n + m)):
            new = step(i, value[_successor(i, n, m)])
            if new != value[i]:
                value[i] = new
                changed = True
    return value


def _truth(formula: Ltl, word: List[FrozenSet[str]], n: int, m: int, memo) -> List[bool]:
    if formula in memo:
        return memo[formula]
    match formula:
        case Top():
            value = [True] * (n + m)
        case Atom(name):
            value = [name in letter for letter in word]
        case NotAtom(name):
            value = [name not in letter for letter in word]
        case And(l, r):
            a, b = _truth(l, word, n, m, memo), _truth(r, word, n, m, memo)
            value = [x and y for x, y in zip(a, b)]
        case Or(l, r):
            a, b = _truth(l, word, n, m, memo), _truth(r, word, n, m, memo)
            value = [x or y for x, y in zip(a, b)]
        case Until(l, r):
            a, b = _truth(l, word, n, m, memo), _truth(r, word, n, m, memo)
            value = _fixpoint(lambda i, nxt: b[i] or (a[i] and nxt), n, m, False)
        case Eventually(f):
            b = _truth(f, word, n, m, memo)
            value = _fixpoint(lambda i, nxt: b[i] or nxt, n, m, False)
        case Always(f):
            a = _truth(f, word, n, m, memo)
            value = _fixpoint(lambda i, nxt: a[i] and nxt, n, m, True)
        case _:
            raise ValueError(f"Unsupported LTL construct: {formula}")
    memo[formula] = value
    return value


def eval_ltl_on_lasso(formula: Ltl, prefix: Sequence, cycle: Sequence) -> bool:
    """Decide whether prefix . cycle^omega satisfies the formula."""
    if not cycle:
        raise ValueError("cycle must be non-empty")
    word = [frozenset(letter) for letter in list(prefix) + list(cycle)]
    return _truth(formula, word, len(prefix), len(cycle), {})[0]
