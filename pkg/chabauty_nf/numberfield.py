"""
Exact arithmetic in a number field K = Q[x]/(f_K) on the power basis, and
factorization of rational primes into places.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple, Union

from sympy import Poly, QQ, Rational as SympyRational, symbols
from sympy import discriminant as sympy_discriminant, resultant as sympy_resultant

from .errors import (
    DivisionByZero, IrreducibilityUnprovable, NotMonic, RamifiedOrIndexDivisor,
    Reducible,
)
from .utils import format_rational, parse_rational, primes_below

logger = logging.getLogger(__name__)

_X = symbols('x')

# Irreducibility is certified mod q for q up to this bound.
IRREDUCIBILITY_PRIME_BOUND = 1000


def _to_fraction(value) -> Fraction:
    value = SympyRational(value)
    return Fraction(int(value.p), int(value.q))


def _sympy_q(value: Fraction) -> SympyRational:
    return SympyRational(value.numerator, value.denominator)


def _int_poly(coeffs: Sequence[int], modulus: Optional[int] = None) -> Poly:
    """sympy Poly from low-to-high integer coefficients"""
    high_to_low = list(reversed([int(c) for c in coeffs]))
    if modulus is None:
        return Poly(high_to_low, _X, domain='ZZ')
    return Poly(high_to_low, _X, modulus=modulus)


def _poly_coeffs_mod(poly: Poly, p: int) -> Tuple[int, ...]:
    """Low-to-high coefficients of a polynomial over F_p, reduced to [0, p)"""
    return tuple(int(c) % p for c in reversed(poly.all_coeffs()))


class NumberField:
    """K = Q(theta) with theta a root of a monic irreducible integer polynomial"""

    def __init__(self, defining_poly: Sequence[int], name: str = "theta"):
        self.defining_poly: Tuple[int, ...] = tuple(int(c) for c in defining_poly)
        self.degree = len(self.defining_poly) - 1
        self.name = name
        self.disc = int(sympy_discriminant(_int_poly(self.defining_poly)))

    def __eq__(self, other) -> bool:
        return isinstance(other, NumberField) and self.defining_poly == other.defining_poly

    def __hash__(self) -> int:
        return hash(('NumberField', self.defining_poly))

    def __repr__(self) -> str:
        return f"NumberField({list(self.defining_poly)})"

    def element(self, coords: Sequence) -> 'NfElement':
        coords = [Fraction(c) for c in coords]
        if len(coords) > self.degree:
            return self._reduce_coeffs(coords)
        coords += [Fraction(0)] * (self.degree - len(coords))
        return NfElement(self, tuple(coords))

    def from_rational(self, value: Union[int, Fraction]) -> 'NfElement':
        return self.element([Fraction(value)])

    def from_int(self, value: int) -> 'NfElement':
        return self.from_rational(value)

    @property
    def zero(self) -> 'NfElement':
        return self.element([])

    @property
    def one(self) -> 'NfElement':
        return self.element([1])

    @property
    def theta(self) -> 'NfElement':
        if self.degree == 1:
            return self.from_rational(-self.defining_poly[0])
        return self.element([0, 1])

    def _reduce_coeffs(self, coeffs: List[Fraction]) -> 'NfElement':
        """Reduce a polynomial in theta modulo the monic defining polynomial"""
        d = self.degree
        coeffs = list(coeffs)
        f = self.defining_poly
        for k in range(len(coeffs) - 1, d - 1, -1):
            c = coeffs[k]
            if c:
                for i in range(d):
                    coeffs[k - d + i] -= c * f[i]
            coeffs[k] = Fraction(0)
        coeffs = coeffs[:d] + [Fraction(0)] * max(0, d - len(coeffs))
        return NfElement(self, tuple(coeffs))

    def parse_element(self, data) -> 'NfElement':
        """Element from its canonical encoding (list of rational strings)"""
        if isinstance(data, (str, int)):
            return self.from_rational(parse_rational(data))
        if not isinstance(data, (list, tuple)) or len(data) != self.degree:
            raise ValueError(f"Expected {self.degree} coordinates, got {data!r}")
        return self.element([parse_rational(c) for c in data])

    def norm(self, x: 'NfElement') -> Fraction:
        return x.norm()


class NfElement:
    """Element of a number field as exact power-basis coordinates"""

    __slots__ = ('field', 'coords')

    def __init__(self, field: NumberField, coords: Tuple[Fraction, ...]):
        self.field = field
        self.coords = coords

    def _coerce(self, other) -> 'NfElement':
        if isinstance(other, NfElement):
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.from_rational(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return NfElement(self.field, tuple(a + b for a, b in zip(self.coords, other.coords)))

    __radd__ = __add__

    def __neg__(self):
        return NfElement(self.field, tuple(-a for a in self.coords))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return NfElement(self.field, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return NfElement(self.field, tuple(a * other for a in self.coords))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        d = self.field.degree
        product = [Fraction(0)] * (2 * d - 1)
        for i, a in enumerate(self.coords):
            if not a:
                continue
            for j, b in enumerate(other.coords):
                if b:
                    product[i + j] += a * b
        return self.field._reduce_coeffs(product)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise DivisionByZero("division by zero in number field")
            return NfElement(self.field, tuple(a / other for a in self.coords))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * nf_invert(other, self.field)

    def __rtruediv__(self, other):
        return self._coerce(other) * nf_invert(self, self.field)

    def __pow__(self, n: int):
        if n < 0:
            return nf_invert(self, self.field) ** (-n)
        result = self.field.one
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = self.field.from_rational(other)
        if not isinstance(other, NfElement):
            return NotImplemented
        return self.field == other.field and self.coords == other.coords

    def __hash__(self) -> int:
        return hash(self.coords)

    def __repr__(self) -> str:
        return f"NfElement({self.encode()})"

    def is_zero(self) -> bool:
        return not any(self.coords)

    def is_rational(self) -> bool:
        return not any(self.coords[1:])

    def to_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self!r} is not rational")
        return self.coords[0]

    def denominator(self) -> int:
        den = 1
        for c in self.coords:
            den = den * c.denominator // math.gcd(den, c.denominator)
        return den

    def numerator_coeffs(self) -> List[int]:
        """Integer coordinates of denominator() * self"""
        den = self.denominator()
        return [int(c * den) for c in self.coords]

    def norm(self) -> Fraction:
        """Norm down to Q as a resultant with the defining polynomial"""
        if self.is_zero():
            return Fraction(0)
        if self.field.degree == 1:
            return self.coords[0]
        f = _int_poly(self.field.defining_poly)
        g = Poly([_sympy_q(c) for c in reversed(self.coords)], _X, domain=QQ)
        return _to_fraction(sympy_resultant(f.as_expr(), g.as_expr(), _X))

    def encode(self) -> List[str]:
        return [format_rational(c) for c in self.coords]


def nf_invert(x: NfElement, K: NumberField) -> NfElement:
    """Inverse by extended gcd in Q[x] modulo the defining polynomial"""
    if x.is_zero():
        raise DivisionByZero("zero has no inverse")
    if K.degree == 1:
        return K.from_rational(1 / x.coords[0])
    f = Poly(list(reversed(K.defining_poly)), _X, domain=QQ)
    g = Poly([_sympy_q(c) for c in reversed(x.coords)], _X, domain=QQ)
    inverse = g.invert(f)
    coeffs = [_to_fraction(c) for c in reversed(inverse.all_coeffs())]
    return K.element(coeffs)


def _certify_irreducible(coeffs: Tuple[int, ...], disc: int) -> Optional[int]:
    """A prime q with q not dividing disc and f irreducible mod q, if one exists"""
    for q in primes_below(IRREDUCIBILITY_PRIME_BOUND + 1):
        if disc % q == 0:
            continue
        if _int_poly(coeffs, modulus=q).is_irreducible:
            return q
    return None


def _small_factor(coeffs: Tuple[int, ...]) -> Optional[Poly]:
    """A rational factor of degree at most 2, if any"""
    degree = len(coeffs) - 1
    _, factors = _int_poly(coeffs).factor_list()
    for factor, multiplicity in factors:
        if factor.degree() < degree and factor.degree() <= 2:
            return factor
        if multiplicity > 1:
            return factor
    return None


def make_number_field(poly: Sequence[int], assume_irreducible: bool = False,
                      name: str = "theta") -> NumberField:
    """Validated number field from a monic integer polynomial (low to high)"""
    coeffs = list(poly)
    if len(coeffs) < 2:
        raise NotMonic(f"Defining polynomial must have degree >= 1: {coeffs}")
    for c in coeffs:
        if isinstance(c, bool) or not isinstance(c, int):
            if isinstance(c, Fraction) and c.denominator == 1:
                continue
            raise NotMonic(f"Coefficients must be integers: {coeffs}")
    coeffs = tuple(int(c) for c in coeffs)
    if coeffs[-1] != 1:
        raise NotMonic(f"Defining polynomial is not monic: {list(coeffs)}")

    field = NumberField(coeffs, name=name)
    if field.degree == 1:
        return field
    if field.disc == 0:
        raise Reducible(f"Defining polynomial has a repeated factor: {list(coeffs)}")

    q = _certify_irreducible(coeffs, field.disc)
    if q is not None:
        logger.debug("Irreducibility of %s certified modulo %d", list(coeffs), q)
        return field

    factor = _small_factor(coeffs)
    if factor is not None:
        raise Reducible(f"Defining polynomial has the factor {factor.as_expr()}")
    if not assume_irreducible:
        raise IrreducibilityUnprovable(
            f"No prime below {IRREDUCIBILITY_PRIME_BOUND} certifies irreducibility "
            f"of {list(coeffs)}; pass the irreducibility assertion to continue")
    logger.warning("Irreducibility of %s asserted by caller", list(coeffs))
    return field


@dataclass(frozen=True)
class Place:
    """A place of K above an odd unramified prime p"""
    field: NumberField
    p: int
    residue_degree: int
    factor_mod_p: Tuple[int, ...]  # monic, low to high, entries in [0, p)
    index: int = 0

    @property
    def uniformizer(self) -> int:
        return self.p

    @property
    def residue_size(self) -> int:
        return self.p ** self.residue_degree

    def label(self) -> str:
        return f"{self.p}:{list(self.factor_mod_p)}"

    def encode(self) -> dict:
        return {'p': self.p, 'factor': list(self.factor_mod_p)}


@lru_cache(maxsize=None)
def split_prime(p: int, K: NumberField) -> Tuple[Place, ...]:
    """Places of K above p, from the factorization of f_K mod p"""
    if p == 2 or p < 2:
        raise RamifiedOrIndexDivisor(f"p = {p} is not an odd prime")
    f = _int_poly(K.defining_poly, modulus=p)
    if f.gcd(f.diff(_X)).degree() > 0:
        raise RamifiedOrIndexDivisor(
            f"Defining polynomial is not squarefree modulo {p}")
    _, factors = f.factor_list()
    raw = []
    for factor, _ in factors:
        coeffs = _poly_coeffs_mod(factor, p)
        lead = coeffs[-1]
        if lead != 1:
            inv = pow(lead, -1, p)
            coeffs = tuple((c * inv) % p for c in coeffs)
        raw.append(coeffs)
    raw.sort(key=lambda c: (len(c), c))
    places = tuple(Place(K, p, len(c) - 1, c, index) for index, c in enumerate(raw))
    assert sum(v.residue_degree for v in places) == K.degree
    return places


def valuation_at(x: NfElement, v: Place, precision: int = 30) -> Union[int, float]:
    """ord_v(x) through the completion at v; math.inf only for exact zero"""
    from .localfield import embed, lift_place
    from .errors import PrecisionExhausted

    if x.is_zero():
        return math.inf
    ring = lift_place(v, precision)
    image = embed(x, ring)
    if image.is_zero():
        raise PrecisionExhausted(
            f"Nonzero element vanishes modulo {v.p}^{precision}; raise the precision")
    return image.valuation()
