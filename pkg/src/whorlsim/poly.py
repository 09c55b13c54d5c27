"""Bivariate polynomials, their textual grammar, and exact calculus.

Grammar accepted by :func:`parse_poly`::

    expr   := term (('+' | '-') term)*
    term   := factor ('*' factor)*
    factor := base ('^' uint)?
    base   := number | 'x' | 'y' | param | '(' expr ')' | '-' factor

Multiplication is always explicit and there is no division, so every
parsed expression expands to a polynomial. Unary minus negates a whole
factor: ``-x^2`` is ``-(x^2)``.
"""
from __future__ import annotations

import math
import re
from decimal import Decimal
from typing import Iterable, Mapping, NamedTuple

import numpy as np

from .errors import LexError, ParseError, UnboundParam

__all__ = [
    "Token",
    "ParamBinding",
    "Polynomial2",
    "ParamPolynomial",
    "tokenize",
    "parse_poly",
    "bind",
    "differentiate",
    "evaluate",
    "taylor_shift",
]


class Token(NamedTuple):
    kind: str
    text: str
    offset: int


class ParamBinding(NamedTuple):
    name: str
    value: float


_PUNCT = {
    "+": "plus",
    "-": "minus",
    "*": "star",
    "^": "caret",
    "(": "lparen",
    ")": "rparen",
}
_NUMBER = re.compile(r"\d+(?:\.\d*)?|\.\d+")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


def tokenize(text: str) -> list[Token]:
    """Split ``text`` into tokens; whitespace is dropped."""
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        ch = text[pos]
        if ch in " \t\r\n":
            pos += 1
            continue
        if ch in _PUNCT:
            tokens.append(Token(_PUNCT[ch], ch, pos))
            pos += 1
            continue
        m = _NUMBER.match(text, pos)
        if m:
            tokens.append(Token("number", m.group(), pos))
            pos = m.end()
            continue
        m = _IDENT.match(text, pos)
        if m:
            tokens.append(Token("identifier", m.group(), pos))
            pos = m.end()
            continue
        raise LexError(pos, ch)
    return tokens


# --------------------------------------------------------------------------
# sparse multivariate arithmetic used while parsing
# keys are exponent tuples (x, y, p_0, ..., p_k)


def _clean(terms):
    return {k: c for k, c in terms.items() if c != 0.0}


def _add(a, b):
    out = dict(a)
    for k, c in b.items():
        out[k] = out.get(k, 0.0) + c
    return _clean(out)


def _neg(a):
    return {k: -c for k, c in a.items()}


def _mul(a, b):
    out = {}
    for ka in sorted(a):
        ca = a[ka]
        for kb in sorted(b):
            k = tuple(i + j for i, j in zip(ka, kb))
            out[k] = out.get(k, 0.0) + ca * b[kb]
    return _clean(out)


def _pow(a, n, nvars):
    result = {(0,) * nvars: 1.0}
    for _ in range(n):
        result = _mul(result, a)
    return result


def _powers(v, n):
    """[1, v, v*v, ...] up to v**n by repeated multiplication."""
    out = [1.0] * (n + 1) if not isinstance(v, np.ndarray) else [np.ones_like(v)] * (n + 1)
    for k in range(1, n + 1):
        out[k] = out[k - 1] * v
    return out


def _fmt_number(c: float) -> str:
    # plain decimal (no exponent) that parses back to exactly c
    s = format(Decimal(repr(c)), "f")
    if "." in s:
        s = s.rstrip("0").rstrip(".")
    return s


# --------------------------------------------------------------------------


class Polynomial2:
    """Numeric polynomial in ``x`` and ``y`` held in canonical sparse form.

    ``terms`` maps ``(i, j)`` to the coefficient of ``x**i * y**j``. Zero
    coefficients are never stored, so two instances compare equal exactly
    when they represent the same polynomial.
    """

    __slots__ = ("_terms", "_key")

    def __init__(self, terms: Mapping[tuple[int, int], float] | None = None):
        clean = {}
        for (i, j), c in (terms or {}).items():
            if i < 0 or j < 0:
                raise ValueError(f"negative exponent in term {(i, j)}")
            c = float(c)
            if c != 0.0:
                clean[(int(i), int(j))] = c
        self._key = tuple(sorted(clean.items()))
        self._terms = dict(self._key)

    @property
    def terms(self) -> dict[tuple[int, int], float]:
        return dict(self._terms)

    def items(self):
        """Terms sorted by exponent pair."""
        return self._key

    def coeff(self, i: int, j: int = 0) -> float:
        return self._terms.get((i, j), 0.0)

    @property
    def is_zero(self) -> bool:
        return not self._key

    @property
    def degree(self) -> int:
        return max((i + j for (i, j), _ in self._key), default=-1)

    def max_exponents(self) -> tuple[int, int]:
        return (
            max((i for (i, _), _ in self._key), default=0),
            max((j for (_, j), _ in self._key), default=0),
        )

    def __eq__(self, other):
        if not isinstance(other, Polynomial2):
            return NotImplemented
        return self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"Polynomial2({dict(self._key)!r})"

    def __str__(self):
        return self.to_text()

    def __neg__(self):
        return Polynomial2({k: -c for k, c in self._key})

    def __add__(self, other):
        if not isinstance(other, Polynomial2):
            return NotImplemented
        out = dict(self._key)
        for k, c in other._key:
            out[k] = out.get(k, 0.0) + c
        return Polynomial2(out)

    def __sub__(self, other):
        if not isinstance(other, Polynomial2):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return Polynomial2({k: c * other for k, c in self._key})
        if not isinstance(other, Polynomial2):
            return NotImplemented
        out: dict[tuple[int, int], float] = {}
        for (i1, j1), c1 in self._key:
            for (i2, j2), c2 in other._key:
                k = (i1 + i2, j1 + j2)
                out[k] = out.get(k, 0.0) + c1 * c2
        return Polynomial2(out)

    __rmul__ = __mul__

    def evaluate(self, x, y):
        return evaluate(self, x, y)

    def diff(self, var: str) -> "Polynomial2":
        return differentiate(self, var)

    def shift(self, x0: float, y0: float) -> "Polynomial2":
        return taylor_shift(self, x0, y0)

    def to_text(self) -> str:
        """Render in the parser's grammar; ``parse_poly`` reproduces ``self``."""
        if not self._key:
            return "0"
        parts = []
        for (i, j), c in sorted(self._key, key=lambda kv: (-(kv[0][0] + kv[0][1]), kv[0])):
            factors = [_fmt_number(abs(c))]
            if i:
                factors.append("x" if i == 1 else f"x^{i}")
            if j:
                factors.append("y" if j == 1 else f"y^{j}")
            body = "*".join(factors)
            if not parts:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append((" - " if c < 0 else " + ") + body)
        return "".join(parts)


class ParamPolynomial:
    """Polynomial in ``x``, ``y`` whose coefficients are polynomials in named
    parameters. Produced by :func:`parse_poly`; turned numeric by :func:`bind`.

    Keys of ``terms`` are exponent tuples ``(i, j, e_0, ..., e_k)`` aligned
    with ``params``.
    """

    __slots__ = ("params", "_key")

    def __init__(self, params: Iterable[str], terms: Mapping[tuple[int, ...], float]):
        self.params = tuple(params)
        width = 2 + len(self.params)
        for k in terms:
            if len(k) != width:
                raise ValueError(f"exponent tuple {k} does not match params {self.params}")
        self._key = tuple(sorted((k, float(c)) for k, c in terms.items() if c != 0.0))

    @property
    def terms(self):
        return dict(self._key)

    def free_params(self) -> set[str]:
        used = set()
        for k, _ in self._key:
            used.update(p for p, e in zip(self.params, k[2:]) if e)
        return used

    def __eq__(self, other):
        if not isinstance(other, ParamPolynomial):
            return NotImplemented
        return self.params == other.params and self._key == other._key

    def __hash__(self):
        return hash((self.params, self._key))

    def __repr__(self):
        return f"ParamPolynomial({self.params!r}, {dict(self._key)!r})"


class _Parser:
    def __init__(self, text, params):
        self.text = text
        self.tokens = tokenize(text)
        self.pos = 0
        self.params = tuple(params)
        self.nvars = 2 + len(self.params)
        self._index = {"x": 0, "y": 1}
        for k, name in enumerate(self.params):
            if name in self._index:
                raise ValueError(f"parameter name {name!r} clashes with a variable")
            self._index[name] = 2 + k

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def fail(self, expected):
        tok = self.peek()
        if tok is None:
            raise ParseError(len(self.text), expected, "end of input")
        raise ParseError(tok.offset, expected, tok.text)

    def take(self, kind):
        tok = self.peek()
        if tok is not None and tok.kind == kind:
            self.pos += 1
            return tok
        return None

    def parse(self):
        result = self.expr()
        if self.peek() is not None:
            self.fail("operator or end of input")
        return result

    def expr(self):
        acc = self.term()
        while True:
            if self.take("plus"):
                acc = _add(acc, self.term())
            elif self.take("minus"):
                acc = _add(acc, _neg(self.term()))
            else:
                return acc

    def term(self):
        acc = self.factor()
        while self.take("star"):
            acc = _mul(acc, self.factor())
        return acc

    def factor(self):
        base = self.base()
        if self.take("caret"):
            tok = self.peek()
            if tok is None or tok.kind != "number" or not tok.text.isdigit():
                self.fail("nonnegative integer exponent")
            self.pos += 1
            base = _pow(base, int(tok.text), self.nvars)
        return base

    def base(self):
        tok = self.peek()
        if tok is None:
            self.fail("factor")
        if tok.kind == "number":
            self.pos += 1
            value = float(tok.text)
            return _clean({(0,) * self.nvars: value})
        if tok.kind == "identifier":
            slot = self._index.get(tok.text)
            if slot is None:
                self.fail("x, y or a declared parameter")
            self.pos += 1
            exps = [0] * self.nvars
            exps[slot] = 1
            return {tuple(exps): 1.0}
        if tok.kind == "lparen":
            self.pos += 1
            inner = self.expr()
            if not self.take("rparen"):
                self.fail("')'")
            return inner
        if tok.kind == "minus":
            self.pos += 1
            return _neg(self.factor())
        self.fail("factor")


def parse_poly(text: str, params: Iterable[str] = ()) -> ParamPolynomial:
    """Parse and fully expand ``text``; identifiers in ``params`` stay symbolic."""
    params = tuple(sorted(set(params)))
    parser = _Parser(text, params)
    return ParamPolynomial(params, parser.parse())


def bind(
    poly: ParamPolynomial | Polynomial2,
    bindings: Mapping[str, float] | Iterable[ParamBinding] = (),
) -> Polynomial2:
    """Substitute parameter values, yielding a numeric :class:`Polynomial2`."""
    if isinstance(poly, Polynomial2):
        return poly
    if isinstance(bindings, Mapping):
        values = {str(k): float(v) for k, v in bindings.items()}
    else:
        values = {}
        for b in bindings:
            name, value = b
            if name in values:
                raise ValueError(f"duplicate binding for {name!r}")
            values[name] = float(value)
    for name in sorted(poly.free_params()):
        if name not in values:
            raise UnboundParam(name)
    out: dict[tuple[int, int], float] = {}
    for key, c in poly.terms.items():
        coef = c
        for name, e in zip(poly.params, key[2:]):
            if e:
                coef = coef * _powers(values[name], e)[e]
        if not math.isfinite(coef):
            raise ValueError(f"non-finite coefficient after binding term {key}")
        ij = key[:2]
        out[ij] = out.get(ij, 0.0) + coef
    return Polynomial2(out)


def differentiate(poly: Polynomial2, var: str) -> Polynomial2:
    if var not in ("x", "y"):
        raise ValueError(f"can only differentiate by 'x' or 'y', not {var!r}")
    out = {}
    for (i, j), c in poly.items():
        if var == "x" and i:
            out[(i - 1, j)] = c * i
        elif var == "y" and j:
            out[(i, j - 1)] = c * j
    return Polynomial2(out)


def evaluate(poly: Polynomial2, x, y):
    """Sum of monomials in exponent-pair order. Accepts floats or arrays."""
    mi, mj = poly.max_exponents()
    xp = _powers(x, mi)
    yp = _powers(y, mj)
    total = 0.0 * x if isinstance(x, np.ndarray) else 0.0
    for (i, j), c in poly.items():
        total = total + c * xp[i] * yp[j]
    return total


def taylor_shift(poly: Polynomial2, x0: float, y0: float) -> Polynomial2:
    """Re-expand ``poly`` in ``u = x - x0``, ``v = y - y0``."""
    mi, mj = poly.max_exponents()
    xp = _powers(float(x0), mi)
    yp = _powers(float(y0), mj)
    out: dict[tuple[int, int], float] = {}
    for (i, j), c in poly.items():
        for a in range(i + 1):
            cx = c * math.comb(i, a) * xp[i - a]
            if cx == 0.0:
                continue
            for b in range(j + 1):
                k = (a, b)
                out[k] = out.get(k, 0.0) + cx * math.comb(j, b) * yp[j - b]
    return Polynomial2(out)
