"""Expression AST, parser and printer for holomorphic test functions.

Grammar (whitespace-insensitive)::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | power
    power  := atom ['^' ['-'] int]
    atom   := number | 'z' | '(' expr ')' | func '(' expr ')'
            | 'laurent' '(' '[' expr (',' expr)* ']' ',' ['-'] int ')'
    func   := 'exp' | 'log' | 'log1p' | 'li2'

Numbers are decimals with an optional ``i`` suffix (``2.5``, ``3i``, ``1e-3``).
``^`` binds tighter than unary minus, so ``-z^2`` is ``-(z^2)``.

``log`` only accepts arguments that are affine in ``z``; an argument of the
form ``1 + b*z`` is stored as :class:`Log1p` so its cut is exact.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ParseError, RejectedExpression

# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Const:
    value: complex


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Add:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Sub:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Mul:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Div:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class PowInt:
    base: "Expr"
    k: int


@dataclass(frozen=True)
class Exp:
    arg: "Expr"


@dataclass(frozen=True)
class LogP:
    """Principal logarithm of an affine argument."""

    arg: "Expr"


@dataclass(frozen=True)
class Log1p:
    """Principal log(1 + arg)."""

    arg: "Expr"


@dataclass(frozen=True)
class Li2:
    """Principal dilogarithm of an affine argument."""

    arg: "Expr"


@dataclass(frozen=True)
class Laurent:
    """sum_k coeffs[k] * z**(n_min + k)."""

    coeffs: tuple
    n_min: int = 0

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(complex(c) for c in self.coeffs))


Expr = Union[Const, Var, Add, Sub, Mul, Div, Neg, PowInt, Exp, LogP, Log1p, Li2, Laurent]

_BINARY = {Add: "+", Sub: "-", Mul: "*", Div: "/"}
_UNARY_FUNCS = {Exp: "exp", LogP: "log", Log1p: "log1p", Li2: "li2"}

# ---------------------------------------------------------------------------
# Tokenizer / parser
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?i?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^(),\[\]]))"
)


@dataclass
class _Tok:
    kind: str
    text: str
    pos: int  # 1-based column


def _tokenize(text: str) -> list[_Tok]:
    toks, i = [], 0
    while i < len(text):
        if text[i].isspace():
            i += 1
            continue
        m = _TOKEN_RE.match(text, i)
        if not m or m.end() == i:
            raise ParseError(f"unexpected character {text[i]!r}", i + 1)
        kind = m.lastgroup
        start = m.start(kind)
        toks.append(_Tok(kind, m.group(kind), start + 1))
        i = m.end()
    toks.append(_Tok("end", "", len(text) + 1))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def cur(self) -> _Tok:
        return self.toks[self.i]

    def accept(self, text: str) -> bool:
        if self.cur.kind == "op" and self.cur.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str):
        if not self.accept(text):
            raise ParseError(f"unexpected {self._describe()}", self.cur.pos, {text})

    def _describe(self) -> str:
        return "end of input" if self.cur.kind == "end" else f"token {self.cur.text!r}"

    def parse(self) -> Expr:
        e = self.expr()
        if self.cur.kind != "end":
            raise ParseError(f"unexpected {self._describe()}", self.cur.pos, {"+", "-", "*", "/", "end"})
        return e

    def expr(self) -> Expr:
        e = self.term()
        while True:
            if self.accept("+"):
                e = Add(e, self.term())
            elif self.accept("-"):
                e = Sub(e, self.term())
            else:
                return e

    def term(self) -> Expr:
        e = self.factor()
        while True:
            if self.accept("*"):
                e = Mul(e, self.factor())
            elif self.accept("/"):
                e = Div(e, self.factor())
            else:
                return e

    def factor(self) -> Expr:
        if self.accept("-"):
            return Neg(self.factor())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.accept("^"):
            return PowInt(base, self.integer())
        return base

    def integer(self) -> int:
        sign = -1 if self.accept("-") else 1
        tok = self.cur
        if tok.kind != "num" or not re.fullmatch(r"\d+", tok.text):
            raise ParseError(f"expected integer, got {self._describe()}", tok.pos, {"int"})
        self.i += 1
        return sign * int(tok.text)

    def atom(self) -> Expr:
        tok = self.cur
        if tok.kind == "num":
            self.i += 1
            if tok.text.endswith("i"):
                return Const(complex(0.0, float(tok.text[:-1])))
            return Const(complex(float(tok.text), 0.0))
        if tok.kind == "name":
            name = tok.text
            self.i += 1
            if name == "z":
                return Var()
            if name == "laurent":
                return self.laurent()
            if name in ("exp", "log", "log1p", "li2"):
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return _make_func(name, arg, tok.pos)
            raise ParseError(f"unknown name {name!r}", tok.pos, {"z", "exp", "log", "log1p", "li2", "laurent"})
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        raise ParseError(f"unexpected {self._describe()}", tok.pos, {"number", "z", "(", "function"})

    def laurent(self) -> Laurent:
        self.expect("(")
        self.expect("[")
        coeffs = []
        if not self.accept("]"):
            while True:
                pos = self.cur.pos
                c = self.expr()
                poly = as_polynomial(c)
                if poly is None or len(poly) > 1:
                    raise ParseError("laurent coefficients must be constants", pos)
                coeffs.append(poly[0] if poly else 0j)
                if self.accept("]"):
                    break
                self.expect(",")
        self.expect(",")
        n_min = self.integer()
        self.expect(")")
        return Laurent(tuple(coeffs), n_min)


def _make_func(name: str, arg: Expr, pos: int) -> Expr:
    if name == "exp":
        return Exp(arg)
    poly = as_polynomial(arg)
    if poly is None or len(poly) > 2:
        raise RejectedExpression(f"{name}(...) at offset {pos}: argument must be affine in z")
    if name == "log":
        a = poly[0] if poly else 0j
        b = poly[1] if len(poly) > 1 else 0j
        if a == 1 and b != 0:
            return Log1p(Var() if b == 1 else Mul(Const(b), Var()))
        return LogP(arg)
    if name == "log1p":
        return Log1p(arg)
    return Li2(arg)


def parse_expr(text: str) -> Expr:
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# Printer
# ---------------------------------------------------------------------------


def _num(c: complex) -> str:
    c = complex(c)
    if c.imag == 0:
        return repr(c.real) if c.real >= 0 else f"(-{repr(-c.real)})"
    if c.real == 0:
        return f"{repr(c.imag)}i" if c.imag >= 0 else f"(-{repr(-c.imag)}i)"
    return f"({_num(complex(c.real, 0))}+{_num(complex(0, c.imag))})"


def to_text(e: Expr) -> str:
    """Fully parenthesized text that reparses to the same AST."""
    if isinstance(e, Const):
        return _num(e.value)
    if isinstance(e, Var):
        return "z"
    for cls, op in _BINARY.items():
        if isinstance(e, cls):
            return f"({to_text(e.left)} {op} {to_text(e.right)})"
    if isinstance(e, Neg):
        return f"(-{to_text(e.arg)})" if isinstance(e.arg, (Var, Const)) else f"(-({to_text(e.arg)}))"
    if isinstance(e, PowInt):
        return f"({to_text(e.base)})^{e.k}"
    for cls, name in _UNARY_FUNCS.items():
        if isinstance(e, cls):
            return f"{name}({to_text(e.arg)})"
    if isinstance(e, Laurent):
        return f"laurent([{', '.join(_num(c) for c in e.coeffs)}], {e.n_min})"
    raise TypeError(f"not an expression node: {e!r}")


# ---------------------------------------------------------------------------
# Polynomial view (used for affine checks and pole finding)
# ---------------------------------------------------------------------------


def _padd(a, b):
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0j) + (b[i] if i < len(b) else 0j) for i in range(n)]


def _pmul(a, b):
    if not a or not b:
        return []
    out = [0j] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _trim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def as_polynomial(e: Expr) -> list[complex] | None:
    """Ascending coefficients if `e` is a polynomial in z, else None."""
    if isinstance(e, Const):
        return _trim([complex(e.value)])
    if isinstance(e, Var):
        return [0j, 1 + 0j]
    if isinstance(e, (Add, Sub)):
        a, b = as_polynomial(e.left), as_polynomial(e.right)
        if a is None or b is None:
            return None
        if isinstance(e, Sub):
            b = [-x for x in b]
        return _trim(_padd(a, b))
    if isinstance(e, Mul):
        a, b = as_polynomial(e.left), as_polynomial(e.right)
        return None if a is None or b is None else _trim(_pmul(a, b))
    if isinstance(e, Div):
        a, b = as_polynomial(e.left), as_polynomial(e.right)
        if a is None or b is None or len(b) != 1:
            return None
        return _trim([x / b[0] for x in a])
    if isinstance(e, Neg):
        a = as_polynomial(e.arg)
        return None if a is None else [-x for x in a]
    if isinstance(e, PowInt):
        a = as_polynomial(e.base)
        if a is None or e.k < 0:
            return None
        out = [1 + 0j]
        for _ in range(e.k):
            out = _pmul(out, a)
        return _trim(out)
    if isinstance(e, Laurent):
        if e.n_min < 0:
            return None
        return _trim([0j] * e.n_min + list(e.coeffs))
    return None


def denominators(e: Expr) -> list[Expr]:
    """Every expression that appears as a divisor or under a negative power."""
    out: list[Expr] = []

    def walk(x):
        if isinstance(x, Div):
            out.append(x.right)
        if isinstance(x, PowInt) and x.k < 0:
            out.append(x.base)
        for child in children(x):
            walk(child)

    walk(e)
    return out


def children(e: Expr) -> tuple:
    if isinstance(e, (Add, Sub, Mul, Div)):
        return (e.left, e.right)
    if isinstance(e, (Neg, Exp, LogP, Log1p, Li2)):
        return (e.arg,)
    if isinstance(e, PowInt):
        return (e.base,)
    return ()


def walk(e: Expr):
    yield e
    for c in children(e):
        yield from walk(c)


def evaluate(e: Expr, z: np.ndarray, check_cuts: float | None = None) -> np.ndarray:
    """Vectorized evaluation on a complex array (no singular-set checks).

    With `check_cuts` set, raises BranchCut when a log/li2 argument lands within
    that distance of its principal cut.
    """
    from . import special

    def ev(x):
        if isinstance(x, Const):
            return np.full(z.shape, complex(x.value))
        if isinstance(x, Var):
            return z
        if isinstance(x, Add):
            return ev(x.left) + ev(x.right)
        if isinstance(x, Sub):
            return ev(x.left) - ev(x.right)
        if isinstance(x, Mul):
            return ev(x.left) * ev(x.right)
        if isinstance(x, Div):
            return ev(x.left) / ev(x.right)
        if isinstance(x, Neg):
            return -ev(x.arg)
        if isinstance(x, PowInt):
            return ev(x.base) ** x.k
        if isinstance(x, Exp):
            return np.exp(ev(x.arg))
        if isinstance(x, LogP):
            w = ev(x.arg)
            if check_cuts is not None:
                special.check_log_cut(w, check_cuts)
            return np.log(w)
        if isinstance(x, Log1p):
            w = ev(x.arg)
            if check_cuts is not None:
                special.check_log_cut(1.0 + w, check_cuts)
            return special.log1p(w)
        if isinstance(x, Li2):
            w = ev(x.arg)
            if check_cuts is not None:
                special.check_li2_cut(w, check_cuts)
            return special.li2(w)
        if isinstance(x, Laurent):
            acc = np.zeros(z.shape, dtype=complex)
            for c in reversed(x.coeffs):
                acc = acc * z + c
            return acc * z ** x.n_min if x.n_min else acc
        raise TypeError(f"not an expression node: {x!r}")

    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        return np.asarray(ev(x=e), dtype=complex)
