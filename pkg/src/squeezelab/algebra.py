"""Exact computer algebra over normal-ordered boson polynomials.

Polynomials are stored as maps from monomial keys (p, q), standing for
a†^p a^q, to exact rational coefficients.  Products are reordered with
the closed-form Wick contraction

    (a†^p a^q)(a†^p' a^q') = sum_k k! C(q,k) C(p',k) a†^(p+p'-k) a^(q+q'-k),

so every commutator, nested commutator, and Taylor coefficient of the
mean photon number comes out as an exact rational.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .fock import commutator_diagonal_value


class BudgetExceededError(RuntimeError):
    """A symbolic computation hit the configured degree budget."""

    def __init__(self, parameter: str, limit):
        super().__init__(f"resource budget exceeded: {parameter} > {limit}")
        self.parameter = parameter
        self.limit = limit


class BosonPoly:
    """A finite rational linear combination of normal-ordered monomials a†^p a^q."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        for (p, q), coeff in (terms or {}).items():
            coeff = Fraction(coeff)
            if coeff:
                clean[(int(p), int(q))] = coeff
        self.terms = clean

    @classmethod
    def monomial(cls, p: int, q: int, coeff=1) -> "BosonPoly":
        return cls({(p, q): Fraction(coeff)})

    @classmethod
    def identity(cls) -> "BosonPoly":
        return cls.monomial(0, 0)

    @classmethod
    def lowering(cls, n: int = 1) -> "BosonPoly":
        """a^n"""
        return cls.monomial(0, n)

    @classmethod
    def raising(cls, n: int = 1) -> "BosonPoly":
        """a†^n"""
        return cls.monomial(n, 0)

    @classmethod
    def number(cls) -> "BosonPoly":
        """a†a"""
        return cls.monomial(1, 1)

    @property
    def degree(self) -> int:
        return max((p + q for p, q in self.terms), default=0)

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        return isinstance(other, BosonPoly) and self.terms == other.terms

    def __add__(self, other: "BosonPoly") -> "BosonPoly":
        out = dict(self.terms)
        for key, coeff in other.terms.items():
            out[key] = out.get(key, Fraction(0)) + coeff
        return BosonPoly(out)

    def __neg__(self) -> "BosonPoly":
        return BosonPoly({key: -coeff for key, coeff in self.terms.items()})

    def __sub__(self, other: "BosonPoly") -> "BosonPoly":
        return self + (-other)

    def scale(self, factor) -> "BosonPoly":
        factor = Fraction(factor)
        return BosonPoly({key: factor * coeff for key, coeff in self.terms.items()})

    def number_state_expectation(self, m: int) -> Fraction:
        """<m| P |m>: only the diagonal monomials a†^p a^p contribute m!/(m-p)!."""
        total = Fraction(0)
        for (p, q), coeff in self.terms.items():
            if p == q and p <= m:
                falling = 1
                for j in range(p):
                    falling *= m - j
                total += coeff * falling
        return total

    def __repr__(self):
        if not self.terms:
            return "BosonPoly(0)"
        bits = []
        for (p, q), coeff in sorted(self.terms.items()):
            mono = "".join(filter(None, [f"ad^{p}" if p else "", f"a^{q}" if q else ""]))
            bits.append(f"{coeff}*{mono or '1'}")
        return "BosonPoly(" + " + ".join(bits) + ")"


def multiply(P: BosonPoly, Q: BosonPoly) -> BosonPoly:
    """Exact normal-ordered product of two polynomials."""
    out: dict[tuple[int, int], Fraction] = {}
    for (p, q), cp in P.terms.items():
        for (pp, qq), cq in Q.terms.items():
            c0 = cp * cq
            for k in range(min(q, pp) + 1):
                weight = math.factorial(k) * math.comb(q, k) * math.comb(pp, k)
                key = (p + pp - k, q + qq - k)
                out[key] = out.get(key, Fraction(0)) + c0 * weight
    return BosonPoly(out)


def commutator(P: BosonPoly, Q: BosonPoly) -> BosonPoly:
    return multiply(P, Q) - multiply(Q, P)


def vacuum_expectation(P: BosonPoly) -> Fraction:
    """<0| P |0>: the coefficient of the identity monomial."""
    return P.terms.get((0, 0), Fraction(0))


DEFAULT_MAX_DEGREE = 200


def nested_commutator(n: int, m: int, max_degree: int = DEFAULT_MAX_DEGREE) -> BosonPoly:
    """m-fold nested commutator [A, [A, ... [A, B]]] with A = a†^n - a^n, B = a†a."""
    if n < 1 or m < 0:
        raise ValueError("need n >= 1 and m >= 0")
    A = BosonPoly.raising(n) - BosonPoly.lowering(n)
    current = BosonPoly.number()
    for _ in range(m):
        current = commutator(A, current)
        if current.degree > max_degree:
            raise BudgetExceededError("degree", max_degree)
    return current


@dataclass
class CoefficientSeries:
    """Exact rational Taylor coefficients of <a†a>_n in the squeezing parameter.

    Entries cover the even powers m = 2, 4, ..., 2M; odd coefficients
    vanish identically and are checked during construction.
    """

    n: int
    entries: list[tuple[int, Fraction]]

    CSV_HEADER = "n,m,numerator,denominator,decimal"

    def to_csv(self) -> str:
        lines = [self.CSV_HEADER]
        for m, c in self.entries:
            lines.append(f"{self.n},{m},{c.numerator},{c.denominator},{float(c):.17g}")
        return "\n".join(lines) + "\n"

    def coefficient(self, m: int) -> Fraction:
        for mm, c in self.entries:
            if mm == m:
                return c
        raise KeyError(f"power {m} not computed")


def coefficients(n: int, M: int, max_degree: int = DEFAULT_MAX_DEGREE) -> CoefficientSeries:
    """First M non-zero Taylor coefficients c_m of <a†a>_n, i.e. m = 2..2M.

    c_m = <0| [A, a†a]_m |0> / m! with A = a†^n - a^n; the odd orders are
    verified to vanish along the way.
    """
    if n < 1 or M < 1:
        raise ValueError("need n >= 1 and M >= 1")
    A = BosonPoly.raising(n) - BosonPoly.lowering(n)
    current = BosonPoly.number()
    entries = []
    for m in range(1, 2 * M + 1):
        current = commutator(A, current)
        if current.degree > max_degree:
            raise BudgetExceededError("degree", max_degree)
        c = vacuum_expectation(current) / math.factorial(m)
        if m % 2 == 1:
            if c != 0:
                raise AssertionError(f"odd coefficient m={m} is nonzero: {c}")
        else:
            entries.append((m, c))
    return CoefficientSeries(n=n, entries=entries)


def taylor_partial_sum(series: CoefficientSeries, r: float) -> float:
    """Partial sum of the photon-number series at r, accumulated exactly."""
    if r < 0:
        raise ValueError("r must be >= 0")
    r_exact = Fraction(r)
    total = Fraction(0)
    for m, c in series.entries:
        total += c * r_exact**m
    return float(total)


@dataclass
class ClosedFormReport:
    """Outcome of checking [a^n, a†^n] against its diagonal closed form."""

    n: int
    max_level: int
    ok: bool
    vacuum_value_ok: bool
    first_mismatch: int | None
    levels: list[tuple[int, int, int]]  # (level, symbolic value, closed-form value)


def verify_closed_form(n: int, max_level: int = 20) -> ClosedFormReport:
    """Evaluate the symbolic commutator and the sum formula on number states.

    Both sides are exact integers on each |m>; the report carries the first
    mismatching level (None when all agree) plus the check that the vacuum
    value is n!.
    """
    symbolic = commutator(BosonPoly.lowering(n), BosonPoly.raising(n))
    levels = []
    first_mismatch = None
    for m in range(max_level + 1):
        lhs = symbolic.number_state_expectation(m)
        rhs = commutator_diagonal_value(n, m)
        levels.append((m, int(lhs), rhs))
        if lhs != rhs and first_mismatch is None:
            first_mismatch = m
    vacuum_ok = symbolic.number_state_expectation(0) == math.factorial(n)
    return ClosedFormReport(
        n=n,
        max_level=max_level,
        ok=first_mismatch is None,
        vacuum_value_ok=vacuum_ok,
        first_mismatch=first_mismatch,
        levels=levels,
    )
