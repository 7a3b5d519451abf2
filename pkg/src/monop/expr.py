"""Complex-valued expressions in one free variable.

Grammar (whitespace is ignored)::

    expr     := term (("+" | "-") term)*
    term     := unary (("*" | "/") unary)*
    unary    := ("-" | "+") unary | power
    power    := atom ("^" exponent)*
    exponent := ["-" | "+"] INTEGER | "(" ["-" | "+"] INTEGER ")"
    atom     := NUMBER | "i" | VARIABLE | FUNC "(" expr ")" | "(" expr ")"
    FUNC     := "exp" | "conj"

Multiplication is always explicit: ``2*s`` is valid, ``2s`` is not.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from .errors import (
    EvaluationOverflow,
    ExprSyntaxError,
    NotExactError,
    PoleError,
    UnknownIdentifierError,
    WrongVariableError,
)

POLE_FLOOR = 1e-300
FUNCTIONS = ("exp", "conj")
# single letters reserved as variable names; any other identifier is unknown
VARIABLE_NAMES = frozenset("snxyztw")


@dataclass(frozen=True)
class Num:
    text: str

    @property
    def value(self) -> Fraction:
        return Fraction(self.text)


@dataclass(frozen=True)
class ImagUnit:
    pass


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: int


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


Node = Union[Num, ImagUnit, Var, Neg, BinOp, Pow, Call]


@dataclass(frozen=True)
class ComplexExpr:
    """Parsed expression together with its source text and variable name."""

    root: Node
    var: str
    source: str

    def __call__(self, z):
        return evaluate(self, z)

    def __str__(self):
        return to_text(self.root)

    @property
    def has_transcendental(self) -> bool:
        return _contains_call(self.root)


def _contains_call(node) -> bool:
    if isinstance(node, Call):
        return True
    if isinstance(node, Neg):
        return _contains_call(node.operand)
    if isinstance(node, BinOp):
        return _contains_call(node.left) or _contains_call(node.right)
    if isinstance(node, Pow):
        return _contains_call(node.base)
    return False


# ---------------------------------------------------------------- tokenizer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(_Token(kind, m.group(), pos))
        pos = m.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


# ------------------------------------------------------------------- parser


class _Parser:
    def __init__(self, text: str, var: str):
        self.tokens = _tokenize(text)
        self.i = 0
        self.var = var

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def accept(self, text: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str):
        if not self.accept(text):
            found = self.tok.text or "end of input"
            raise ExprSyntaxError(f"expected {text!r}, found {found!r}", self.tok.pos)

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "end":
            raise ExprSyntaxError(f"unexpected {self.tok.text!r}", self.tok.pos)
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.advance().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self.accept("-"):
            return Neg(self.unary())
        if self.accept("+"):
            return self.unary()
        return self.power()

    def power(self) -> Node:
        node = self.atom()
        while self.accept("^"):
            node = Pow(node, self.exponent())
        return node

    def exponent(self) -> int:
        paren = self.accept("(")
        sign = 1
        if self.accept("-"):
            sign = -1
        else:
            self.accept("+")
        tok = self.tok
        if tok.kind != "num" or not tok.text.isdigit():
            raise ExprSyntaxError("exponent must be an integer literal", tok.pos)
        self.advance()
        if paren:
            self.expect(")")
        return sign * int(tok.text)

    def atom(self) -> Node:
        tok = self.tok
        if tok.kind == "num":
            self.advance()
            return Num(tok.text)
        if tok.kind == "ident":
            self.advance()
            if tok.text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(tok.text, arg)
            if tok.text == "i":
                return ImagUnit()
            if tok.text == self.var:
                return Var(tok.text)
            if tok.text in VARIABLE_NAMES:
                raise WrongVariableError(tok.text, self.var, tok.pos)
            raise UnknownIdentifierError(tok.text, tok.pos)
        if self.accept("("):
            node = self.expr()
            self.expect(")")
            return node
        found = tok.text or "end of input"
        raise ExprSyntaxError(f"unexpected {found!r}", tok.pos)


def parse(text: str, var_name: str = "s") -> ComplexExpr:
    """Parse ``text`` as an expression in the single variable ``var_name``."""
    if var_name == "i" or var_name in FUNCTIONS:
        raise ValueError(f"{var_name!r} cannot be used as a variable name")
    if not text or not text.strip():
        raise ExprSyntaxError("empty expression", 0)
    return ComplexExpr(_Parser(text, var_name).parse(), var_name, text)


# ----------------------------------------------------------------- printing


def to_text(node: Node) -> str:
    """Render ``node`` so that reparsing gives a structurally identical tree."""
    if isinstance(node, Num):
        return node.text
    if isinstance(node, ImagUnit):
        return "i"
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        return "-" + to_text(node.operand)
    if isinstance(node, BinOp):
        return f"({to_text(node.left)} {node.op} {to_text(node.right)})"
    if isinstance(node, Pow):
        base = to_text(node.base)
        if isinstance(node.base, Neg):
            base = f"({base})"
        return f"{base}^{node.exponent}"
    if isinstance(node, Call):
        return f"{node.func}({to_text(node.arg)})"
    raise TypeError(f"not an expression node: {node!r}")


# --------------------------------------------------------------- evaluation


class _Backend:
    def const(self, q: Fraction):
        raise NotImplementedError

    def imag(self):
        raise NotImplementedError

    def exp(self, x):
        raise NotImplementedError

    def conj(self, x):
        raise NotImplementedError

    def check_denominator(self, d, z):
        raise NotImplementedError


class _FloatBackend(_Backend):
    def const(self, q):
        return complex(q.numerator / q.denominator) if q.denominator != 1 else complex(q.numerator)

    def imag(self):
        return 1j

    def exp(self, x):
        return np.exp(x)

    def conj(self, x):
        return np.conj(x)

    def check_denominator(self, d, z):
        small = np.abs(d) < POLE_FLOOR
        if np.any(small):
            if np.ndim(small):
                idx = int(np.flatnonzero(small)[0])
                raise PoleError(complex(np.ravel(z)[idx]) if np.ndim(z) else complex(z))
            raise PoleError(complex(z))


class _ExactBackend(_Backend):
    def const(self, q):
        return q

    def imag(self):
        raise NotExactError("imaginary unit in exact rational evaluation")

    def exp(self, x):
        if x == 0:
            return Fraction(1)
        raise NotExactError("exp of a nonzero rational is irrational")

    def conj(self, x):
        return x

    def check_denominator(self, d, z):
        if d == 0:
            raise PoleError(z)


class _MPBackend(_Backend):
    """gmpy2 multiprecision complex arithmetic at the context precision."""

    def __init__(self):
        import gmpy2

        self.gmpy2 = gmpy2

    def const(self, q):
        return self.gmpy2.mpc(self.gmpy2.mpq(q.numerator, q.denominator))

    def imag(self):
        return self.gmpy2.mpc(0, 1)

    def exp(self, x):
        return self.gmpy2.exp(x)

    def conj(self, x):
        x = self.gmpy2.mpc(x)
        return self.gmpy2.mpc(x.real, -x.imag)

    def check_denominator(self, d, z):
        if d == 0:
            raise PoleError(z)


_FLOAT = _FloatBackend()
_EXACT = _ExactBackend()


def _eval(node, z, be: _Backend):
    if isinstance(node, Num):
        return be.const(node.value)
    if isinstance(node, Var):
        return z
    if isinstance(node, ImagUnit):
        return be.imag()
    if isinstance(node, Neg):
        return -_eval(node.operand, z, be)
    if isinstance(node, BinOp):
        left = _eval(node.left, z, be)
        right = _eval(node.right, z, be)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        if node.op == "*":
            return left * right
        be.check_denominator(right, z)
        return left / right
    if isinstance(node, Pow):
        base = _eval(node.base, z, be)
        k = node.exponent
        if k < 0:
            be.check_denominator(base, z)
            return 1 / base**-k
        return base**k
    if isinstance(node, Call):
        arg = _eval(node.arg, z, be)
        return be.exp(arg) if node.func == "exp" else be.conj(arg)
    raise TypeError(f"not an expression node: {node!r}")


def evaluate(e: ComplexExpr, z):
    """Evaluate in IEEE double complex arithmetic.

    ``z`` may be a scalar or a numpy array; arrays are evaluated elementwise.
    Raises :class:`PoleError` when a denominator has modulus below 1e-300 and
    :class:`EvaluationOverflow` when the result is not finite otherwise.
    """
    scalar = np.ndim(z) == 0
    zz = complex(z) if scalar else np.asarray(z, dtype=complex)
    with np.errstate(all="ignore"):
        out = _eval(e.root, zz, _FLOAT)
        if scalar:
            out = complex(out)
        else:
            out = np.broadcast_to(np.asarray(out, dtype=complex), zz.shape).copy()
    if not np.all(np.isfinite(out)):
        raise EvaluationOverflow(f"non-finite value of {e.source!r}")
    return out


def evaluate_exact(e: ComplexExpr, z) -> Fraction:
    """Evaluate in exact rational arithmetic; raises NotExactError if impossible."""
    return _eval(e.root, Fraction(z), _EXACT)


def evaluate_mp(e: ComplexExpr, z, precision: int = 256):
    """Evaluate with gmpy2 complex numbers carrying ``precision`` bits."""
    import gmpy2

    be = _MPBackend()
    with gmpy2.context(gmpy2.get_context(), precision=precision):
        zz = gmpy2.mpc(z) if not isinstance(z, Fraction) else be.const(z)
        return _eval(e.root, zz, be)


# ----------------------------------------------------------- rational forms


@dataclass(frozen=True)
class RationalSymbol:
    """h = P/Q with coefficient lists in ascending powers of the variable."""

    numerator: tuple
    denominator: tuple

    def __post_init__(self):
        if not any(c != 0 for c in self.denominator):
            raise ValueError("denominator is identically zero")

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.numerator)

    @property
    def deg_num(self) -> int:
        return _degree(self.numerator)

    @property
    def deg_den(self) -> int:
        return _degree(self.denominator)

    def __call__(self, z):
        P = np.polynomial.polynomial.polyval(z, np.asarray(self.numerator, dtype=complex))
        Q = np.polynomial.polynomial.polyval(z, np.asarray(self.denominator, dtype=complex))
        return P / Q

    def scaled(self, c) -> "RationalSymbol":
        return RationalSymbol(
            tuple(c * p for p in self.numerator), tuple(c * q for q in self.denominator)
        )


def _degree(coeffs) -> int:
    nz = [k for k, c in enumerate(coeffs) if c != 0]
    return nz[-1] if nz else -1


def _to_sympy(node, sym):
    import sympy

    if isinstance(node, Num):
        return sympy.Rational(node.value.numerator, node.value.denominator)
    if isinstance(node, ImagUnit):
        return sympy.I
    if isinstance(node, Var):
        return sym
    if isinstance(node, Neg):
        return -_to_sympy(node.operand, sym)
    if isinstance(node, BinOp):
        left, right = _to_sympy(node.left, sym), _to_sympy(node.right, sym)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        if node.op == "*":
            return left * right
        return left / right
    if isinstance(node, Pow):
        return _to_sympy(node.base, sym) ** node.exponent
    raise TypeError(node)


def as_rational(e: ComplexExpr):
    """Normalize ``e`` to P/Q in lowest terms, or return None if ``e`` uses exp/conj."""
    if e.has_transcendental:
        return None
    import sympy

    sym = sympy.Symbol(e.var)
    try:
        num, den = sympy.fraction(sympy.cancel(sympy.together(_to_sympy(e.root, sym))))
    except ZeroDivisionError:
        raise PoleError(None) from None
    if den == 0 or den.has(sympy.zoo, sympy.nan) or num.has(sympy.zoo, sympy.nan):
        raise PoleError(None)
    P = sympy.Poly(sympy.expand(num), sym).all_coeffs()[::-1]
    Q = sympy.Poly(sympy.expand(den), sym).all_coeffs()[::-1]
    return RationalSymbol(tuple(_sympy_complex(c) for c in P), tuple(_sympy_complex(c) for c in Q))


def _sympy_complex(c) -> complex:
    c = complex(c.evalf(20))
    return complex(float(c.real), float(c.imag))
