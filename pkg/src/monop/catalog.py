"""Built-in operators with known answers."""

from __future__ import annotations

from dataclasses import dataclass

from .symbols import MonomialSpec
from .verdict import VerdictClass


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    coeff_expr: str
    a: str
    b: str
    h_expr: str
    expected: VerdictClass
    kind: str
    description: str

    def spec(self) -> MonomialSpec:
        return MonomialSpec.from_dict(
            {"name": self.name, "coeff_expr": self.coeff_expr, "a": self.a, "b": self.b, "h_expr": self.h_expr}
        )


ENTRIES = (
    CatalogEntry(
        "volterra", "1/(n+1)", "1", "1", "1/(s+1/2)", VerdictClass.COMPACT,
        "integration", "Vf(x) = int_0^x f(t) dt",
    ),
    CatalogEntry(
        "hardy", "1/(n+1)", "1", "0", "1/(s+1/2)", VerdictClass.BOUNDED_NOT_COMPACT,
        "averaging", "Hf(x) = (1/x) int_0^x f(t) dt",
    ),
    CatalogEntry(
        "shift", "1", "1", "1", "1", VerdictClass.BOUNDED_NOT_COMPACT,
        "index shift", "x^n -> x^(n+1)",
    ),
    CatalogEntry(
        "t1", "1", "2", "0", "1", VerdictClass.UNBOUNDED,
        "composition", "T1 f(x) = f(x^2)",
    ),
    CatalogEntry(
        "t2", "1/(2*n+1)", "2", "1", "1/(2*s)", VerdictClass.UNBOUNDED,
        "integrated composition", "T2 f(x) = int_0^x f(t^2) dt",
    ),
    CatalogEntry(
        "t3", "1/(2*n+2)", "2", "2", "1/(2*s+1)", VerdictClass.COMPACT,
        "integrated composition", "T3 f(x) = int_0^x t f(t^2) dt",
    ),
    CatalogEntry(
        "se_minus_s", "(n+1/2)*exp(-(n+1/2))", "1", "0", "s*exp(-s)", VerdictClass.UNBOUNDED,
        "diagonal, c_n -> 0", "diagonal x^n -> c_n x^n with h(s) = s e^-s",
    ),
)

BY_NAME = {e.name: e for e in ENTRIES}


def get(name: str) -> CatalogEntry:
    try:
        return BY_NAME[name]
    except KeyError:
        raise KeyError(f"unknown catalog entry {name!r}; known: {', '.join(sorted(BY_NAME))}") from None
