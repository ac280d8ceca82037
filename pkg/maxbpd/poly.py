"""Polynomials in x_1..x_n, y_1..y_n over the integers."""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Mapping, Tuple

from sympy import ZZ
from sympy.polys.orderings import lex
from sympy.polys.rings import PolyElement, PolyRing

logger = logging.getLogger(__name__)


class PolynomialError(Exception):
    """Exception raised for polynomial operations on incompatible operands."""
    pass


class ZeroPolynomial(PolynomialError):
    """Exception raised when an operation needs a nonzero polynomial."""
    pass


@lru_cache(maxsize=None)
def polynomial_ring(n: int) -> PolyRing:
    """
    The ring Z[x, y] with generators ordered x_n, ..., x_1, y_n, ..., y_1.

    Under lex this order gives x_n > ... > x_1 > y_n > ... > y_1.
    """
    names = [f"x{i}" for i in range(n, 0, -1)] + [f"y{j}" for j in range(n, 0, -1)]
    return PolyRing(names, ZZ, lex)


@dataclass(frozen=True, order=True)
class Monomial:
    """x^xexp y^yexp, exponents indexed from 1 to n."""

    xexp: Tuple[int, ...]
    yexp: Tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.xexp)

    @property
    def degree(self) -> int:
        return sum(self.xexp) + sum(self.yexp)

    def ring_exponents(self) -> Tuple[int, ...]:
        return tuple(reversed(self.xexp)) + tuple(reversed(self.yexp))

    @classmethod
    def from_ring_exponents(cls, n: int, exponents: Tuple[int, ...]) -> "Monomial":
        return cls(tuple(reversed(exponents[:n])), tuple(reversed(exponents[n:])))

    def __str__(self) -> str:
        factors = []
        for name, exps in (("x", self.xexp), ("y", self.yexp)):
            for index, e in enumerate(exps, start=1):
                if e == 1:
                    factors.append(f"{name}{index}")
                elif e > 1:
                    factors.append(f"{name}{index}^{e}")
        return "".join(factors) or "1"


class Polynomial:
    """An immutable integer polynomial in 2n variables."""

    __slots__ = ("n", "_element")

    def __init__(self, n: int, element: PolyElement = None):
        self.n = n
        ring = polynomial_ring(n)
        self._element = ring.zero if element is None else element

    @classmethod
    def zero(cls, n: int) -> "Polynomial":
        return cls(n)

    @classmethod
    def one(cls, n: int) -> "Polynomial":
        return cls(n, polynomial_ring(n).one)

    @classmethod
    def constant(cls, n: int, value: int) -> "Polynomial":
        return cls(n, polynomial_ring(n).ground_new(value))

    @classmethod
    def x(cls, n: int, i: int) -> "Polynomial":
        return cls(n, polynomial_ring(n).gens[n - i])

    @classmethod
    def y(cls, n: int, j: int) -> "Polynomial":
        return cls(n, polynomial_ring(n).gens[2 * n - j])

    @classmethod
    def from_terms(cls, n: int, terms: Mapping[Monomial, int]) -> "Polynomial":
        ring = polynomial_ring(n)
        return cls(n, ring.from_dict({m.ring_exponents(): c for m, c in terms.items() if c}))

    def _check(self, other: "Polynomial") -> None:
        if not isinstance(other, Polynomial):
            raise PolynomialError(f"Cannot combine a polynomial with {type(other).__name__}")
        if other.n != self.n:
            raise PolynomialError(f"Polynomials over {self.n} and {other.n} variables do not mix")

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        return Polynomial(self.n, self._element + other._element)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        return Polynomial(self.n, self._element - other._element)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        return Polynomial(self.n, self._element * other._element)

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.n, -self._element)

    def scale(self, factor: int) -> "Polynomial":
        return Polynomial(self.n, self._element * factor)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.n == other.n and self._element == other._element

    def __hash__(self) -> int:
        return hash((self.n, frozenset(self.terms().items())))

    def __bool__(self) -> bool:
        return bool(self._element)

    @property
    def is_zero(self) -> bool:
        return not self._element

    def terms(self) -> Dict[Monomial, int]:
        """Monomial to nonzero coefficient, in descending term order."""
        return {
            Monomial.from_ring_exponents(self.n, exps): int(coeff)
            for exps, coeff in self._element.terms()
        }

    def __len__(self) -> int:
        return len(self._element)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((m.degree for m in self.terms()), default=-1)

    def filter(self, keep) -> "Polynomial":
        return Polynomial.from_terms(self.n, {m: c for m, c in self.terms().items() if keep(m, c)})

    def specialize_y_zero(self) -> "Polynomial":
        """Set every y_j to 0."""
        return self.filter(lambda m, _: not any(m.yexp))

    def monomial_positive(self) -> "Polynomial":
        """The same monomials with absolute coefficients."""
        return Polynomial.from_terms(self.n, {m: abs(c) for m, c in self.terms().items()})

    def __str__(self) -> str:
        return format_polynomial(self)

    def __repr__(self) -> str:
        return f"Polynomial({self.n}, {format_polynomial(self)!r})"


def format_polynomial(p: Polynomial) -> str:
    """Render as "±c·monomial" terms in descending term order, unit coefficients and exponents suppressed."""
    pieces = []
    for monomial, coeff in p.terms().items():
        sign = "-" if coeff < 0 else "+"
        magnitude = abs(coeff)
        body = str(monomial)
        if monomial.degree == 0:
            text = str(magnitude)
        elif magnitude == 1:
            text = body
        else:
            text = f"{magnitude}·{body}"
        pieces.append((sign, text))
    if not pieces:
        return "0"
    first_sign, first_text = pieces[0]
    out = ("-" if first_sign == "-" else "") + first_text
    for sign, text in pieces[1:]:
        out += f" {sign} {text}"
    return out


def poly_arith(a: Polynomial, b: Polynomial, op: str) -> Polynomial:
    """Exact ring arithmetic: op is "add" or "mul"."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    raise PolynomialError(f"Unknown operation '{op}'")


@lru_cache(maxsize=None)
def weight_factor(n: int, i: int, j: int, double: bool = False) -> Polynomial:
    """x_i, or x_i + y_j - x_i·y_j in the double case."""
    if not (1 <= i <= n and 1 <= j <= n):
        raise PolynomialError(f"Cell ({i},{j}) lies outside the {n}x{n} grid")
    x = Polynomial.x(n, i)
    if not double:
        return x
    y = Polynomial.y(n, j)
    return x + y - x * y


def leading_monomial(p: Polynomial) -> Tuple[Monomial, int]:
    """
    The largest monomial under lex with x_n > ... > x_1 > y_n > ... > y_1.

    Raises:
        ZeroPolynomial: If p is zero.
    """
    if p.is_zero:
        raise ZeroPolynomial("The zero polynomial has no leading monomial")
    element = p._element
    return Monomial.from_ring_exponents(p.n, element.LM), int(element.LC)


def _degree_component(p: Polynomial, pick) -> Polynomial:
    if p.is_zero:
        raise ZeroPolynomial("The zero polynomial has no homogeneous components")
    target = pick(m.degree for m in p.terms())
    return p.filter(lambda m, _: m.degree == target)


def top_degree_component(p: Polynomial) -> Polynomial:
    """The sub-sum of maximal total degree."""
    return _degree_component(p, max)


def bottom_degree_component(p: Polynomial) -> Polynomial:
    """The sub-sum of minimal total degree."""
    return _degree_component(p, min)


def monomial(n: int, xexp, yexp=None) -> Polynomial:
    """A single monomial with coefficient 1."""
    yexp = tuple(yexp) if yexp is not None else (0,) * n
    return Polynomial.from_terms(n, {Monomial(tuple(xexp), yexp): 1})
