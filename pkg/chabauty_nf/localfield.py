"""
Fixed-precision arithmetic in the unramified completions O_v and K_v.

A LocalElement stores p^shift * U where U is a polynomial in the basis
theta_v (theta_{v,i} = x^(i-1) modulo the Hensel-lifted factor g_v). The
field ``precision`` is absolute: the value is known modulo p^precision.
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np
from sympy.polys.domains import ZZ
from sympy.polys.factortools import dup_zz_hensel_lift

from .errors import (
    DivisionByZero, NonIntegralDenominator, NotASquare, NotAUnit,
    PrecisionAmbiguous,
)
from .finitefield import FiniteField, FqElement
from .numberfield import NfElement, Place
from .utils import p_valuation

logger = logging.getLogger(__name__)

DEFAULT_PRECISION = 30


def _int_valuation(n: int, p: int, cap: int) -> int:
    """Valuation of an integer, capped (zero gives cap)"""
    if n == 0:
        return cap
    v = 0
    while n % p == 0 and v < cap:
        n //= p
        v += 1
    return v


class LocalRing:
    """O_v = Z_p[x]/(g_v) at a fixed number of p-adic digits"""

    def __init__(self, place: Place, precision: int, lifted_factor: Sequence[int]):
        self.place = place
        self.p = place.p
        self.precision = precision
        self.degree = place.residue_degree
        self.modulus = self.p ** precision
        self.lifted_factor: Tuple[int, ...] = tuple(int(c) % self.modulus for c in lifted_factor)
        self.residue_field = FiniteField(self.p, place.factor_mod_p)
        self.number_field = place.field

    def __repr__(self) -> str:
        return f"LocalRing({self.place.label()}, N={self.precision})"

    # Raw coefficient arithmetic on length-degree integer vectors

    def reduce_poly(self, coeffs: Sequence[int]) -> List[int]:
        """Reduce an integer polynomial modulo (g_v, p^N)"""
        d = self.degree
        g = self.lifted_factor
        mod = self.modulus
        work = [int(c) % mod for c in coeffs]
        for k in range(len(work) - 1, d - 1, -1):
            c = work[k]
            if c:
                for i in range(d):
                    work[k - d + i] = (work[k - d + i] - c * g[i]) % mod
            work[k] = 0
        work = work[:d] + [0] * max(0, d - len(work))
        return work

    def mul_coeffs(self, a: Sequence[int], b: Sequence[int]) -> List[int]:
        if self.degree == 1:
            return [(a[0] * b[0]) % self.modulus]
        product = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    product[i + j] += x * y
        return self.reduce_poly(product)

    def unit_inverse(self, coeffs: Sequence[int], digits: int) -> List[int]:
        """Inverse of a unit modulo p^digits by Newton iteration"""
        p = self.p
        residue = self.residue_field.element([c % p for c in coeffs])
        if residue.is_zero():
            raise NotAUnit("element is not a unit")
        y = list(residue.inverse().coeffs)
        known = 1
        while known < digits:
            known = min(2 * known, digits)
            mod = p ** known
            wy = self.mul_coeffs(coeffs, y)
            correction = [(-c) % mod for c in wy]
            correction[0] = (correction[0] + 2) % mod
            y = [c % mod for c in self.mul_coeffs(y, correction)]
        mod = p ** digits
        return [c % mod for c in y]

    # Element construction

    def make(self, coeffs: Sequence[int], shift: int, precision: int) -> 'LocalElement':
        """Normalized element p^shift * coeffs known to absolute precision"""
        precision = min(precision, shift + self.precision)
        rel = precision - shift
        d = self.degree
        if rel <= 0:
            return LocalElement(self, (0,) * d, precision, precision)
        mod = self.p ** rel
        coeffs = [int(c) % mod for c in coeffs]
        m = min(_int_valuation(c, self.p, rel) for c in coeffs)
        if m >= rel:
            return LocalElement(self, (0,) * d, precision, precision)
        if m:
            scale = self.p ** m
            coeffs = [c // scale for c in coeffs]
            shift += m
            mod = self.p ** (precision - shift)
            coeffs = [c % mod for c in coeffs]
        return LocalElement(self, tuple(coeffs), shift, precision)

    def element(self, coeffs: Sequence[int], shift: int = 0,
                precision: Optional[int] = None) -> 'LocalElement':
        coeffs = list(coeffs) + [0] * (self.degree - len(coeffs))
        if precision is None:
            precision = shift + self.precision
        return self.make(coeffs, shift, precision)

    def from_fraction(self, value) -> 'LocalElement':
        value = Fraction(value)
        if value == 0:
            return self.zero
        k = p_valuation(value, self.p)
        num = value.numerator
        den = value.denominator
        if k > 0:
            num //= self.p ** k
        elif k < 0:
            den //= self.p ** (-k)
        unit = (num * pow(den, -1, self.modulus)) % self.modulus
        return self.make([unit] + [0] * (self.degree - 1), k, k + self.precision)

    def from_int(self, value: int) -> 'LocalElement':
        return self.from_fraction(value)

    def from_residue(self, value: FqElement) -> 'LocalElement':
        """Lift of a residue field element through the basis theta_v"""
        return self.element(list(value.coeffs))

    @property
    def zero(self) -> 'LocalElement':
        return LocalElement(self, (0,) * self.degree, self.precision, self.precision)

    @property
    def one(self) -> 'LocalElement':
        return self.element([1])

    def basis_element(self, i: int) -> 'LocalElement':
        """theta_{v,i+1} = x^i"""
        coeffs = [0] * self.degree
        coeffs[i] = 1
        return self.element(coeffs)


class LocalElement:
    """Element of K_v with absolute precision tracking"""

    __slots__ = ('ring', 'coeffs', 'shift', 'precision')
    __hash__ = None

    def __init__(self, ring: LocalRing, coeffs: Tuple[int, ...], shift: int, precision: int):
        self.ring = ring
        self.coeffs = coeffs
        self.shift = shift
        self.precision = precision

    @property
    def known_precision(self) -> int:
        return self.precision

    @property
    def relative_precision(self) -> int:
        return self.precision - self.shift

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def valuation(self) -> int:
        """Exact valuation, or the precision lower bound when indistinguishable from 0"""
        return self.precision if self.is_zero() else self.shift

    def is_integral(self) -> bool:
        return self.is_zero() or self.shift >= 0

    def is_unit(self) -> bool:
        return not self.is_zero() and self.shift == 0

    def _coerce(self, other) -> 'LocalElement':
        if isinstance(other, LocalElement):
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.from_fraction(other)
        if isinstance(other, NfElement):
            return embed(other, self.ring)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        precision = min(self.precision, other.precision)
        shift = min(self.shift, other.shift)
        if shift >= precision:
            return self.ring.make((0,) * self.ring.degree, precision, precision)
        p = self.ring.p
        a = p ** (self.shift - shift)
        b = p ** (other.shift - shift)
        coeffs = [x * a + y * b for x, y in zip(self.coeffs, other.coeffs)]
        return self.ring.make(coeffs, shift, precision)

    __radd__ = __add__

    def __neg__(self):
        mod = self.ring.p ** max(self.relative_precision, 0)
        return LocalElement(self.ring, tuple((-c) % mod for c in self.coeffs),
                            self.shift, self.precision)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        precision = min(self.precision + other.shift, other.precision + self.shift)
        if self.is_zero() or other.is_zero():
            return self.ring.make((0,) * self.ring.degree, precision, precision)
        shift = self.shift + other.shift
        return self.ring.make(self.ring.mul_coeffs(self.coeffs, other.coeffs), shift, precision)

    __rmul__ = __mul__

    def inverse(self) -> 'LocalElement':
        if self.is_zero():
            raise DivisionByZero("inverse of an element indistinguishable from zero")
        rel = self.relative_precision
        coeffs = self.ring.unit_inverse(self.coeffs, rel)
        return self.ring.make(coeffs, -self.shift, -self.shift + rel)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.ring.one
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return (self - other).is_zero()

    def __repr__(self) -> str:
        if self.is_zero():
            return f"O({self.ring.p}^{self.precision})"
        return f"{self.ring.p}^{self.shift}*{list(self.coeffs)} + O({self.ring.p}^{self.precision})"

    def with_precision(self, precision: int) -> 'LocalElement':
        """Same value, precision capped at the given absolute bound"""
        if precision >= self.precision:
            return self
        return self.ring.make(self.coeffs, self.shift, precision)

    def coordinates(self) -> Tuple[int, ...]:
        """Coordinates on theta_{v,1..d_v} as integers mod p^N"""
        if not self.is_integral():
            raise NonIntegralDenominator(f"{self!r} is not integral")
        mod = self.ring.modulus
        if self.is_zero():
            return (0,) * self.ring.degree
        scale = self.ring.p ** self.shift
        return tuple((c * scale) % mod for c in self.coeffs)

    def reduce(self) -> FqElement:
        """Image in the residue field"""
        if not self.is_integral():
            raise NonIntegralDenominator(f"{self!r} does not reduce")
        if self.is_zero() or self.shift > 0:
            return self.ring.residue_field.zero
        return self.ring.residue_field.element([c % self.ring.p for c in self.coeffs])


@lru_cache(maxsize=None)
def lift_place(v: Place, N: int = DEFAULT_PRECISION) -> LocalRing:
    """Completion at v with g_v Hensel-lifted to N digits"""
    from .numberfield import split_prime

    K = v.field
    p = v.p
    places = split_prime(p, K)
    if len(places) == 1:
        lifted = [c % p ** N for c in K.defining_poly]
    else:
        f_dense = [ZZ(int(c)) for c in reversed(K.defining_poly)]
        factors = [[ZZ(int(c)) for c in reversed(w.factor_mod_p)] for w in places]
        lifted_all = dup_zz_hensel_lift(ZZ(p), f_dense, factors, N, ZZ)
        lifted = [int(c) for c in reversed(lifted_all[v.index])]
    ring = LocalRing(v, N, lifted)
    logger.debug("Lifted %s to %d digits", v.label(), N)
    return ring


def embed(x: NfElement, R: LocalRing, integral: bool = False) -> LocalElement:
    """Image of x under theta -> (x mod g_v)"""
    if x.is_zero():
        return R.zero
    p = R.p
    den = x.denominator()
    k = 0
    while den % p == 0:
        den //= p
        k += 1
    if k and integral:
        raise NonIntegralDenominator(f"{x!r} has denominator divisible by {p}")
    nums = x.numerator_coeffs()
    coeffs = R.reduce_poly(nums)
    inv = pow(den, -1, R.modulus)
    coeffs = [(c * inv) % R.modulus for c in coeffs]
    return R.make(coeffs, -k, R.precision - k)


def coordinates(x: LocalElement) -> Tuple[int, ...]:
    return x.coordinates()


def from_coordinates(R: LocalRing, coords: Sequence[int],
                     precision: Optional[int] = None) -> LocalElement:
    return R.element(list(coords), 0, precision)


def hensel_sqrt(a: LocalElement, root: Optional[FqElement] = None) -> LocalElement:
    """Square root of a unit, congruent to the given (or canonical) residue root"""
    if not a.is_unit():
        raise NotAUnit(f"{a!r} is not a unit")
    residue = a.reduce()
    if root is None:
        if not residue.is_square():
            raise NotASquare(f"{residue!r} is not a square in the residue field")
        root = residue.sqrt()
    elif root * root != residue:
        raise NotASquare("given residue root does not square to the reduction")
    R = a.ring
    y = R.from_residue(root)
    half = R.from_fraction(Fraction(1, 2))
    target = a.precision
    known = 1
    while known < target:
        y = (y + a / y) * half
        known *= 2
    return R.make(y.coeffs, y.shift, target)


# Matrices over Z_p

@dataclass
class ZpMatrix:
    """Integer matrix mod p^N whose entries are trusted to known_precision digits"""
    p: int
    precision: int
    entries: np.ndarray
    known_precision: int
    denominator_exponent: int = 0

    def __post_init__(self):
        self.entries = np.array(self.entries, dtype=object)
        if self.entries.ndim != 2:
            raise ValueError("ZpMatrix entries must be two-dimensional")
        self.entries = self.entries % (self.p ** self.precision)

    @classmethod
    def from_rows(cls, p: int, precision: int, rows: Sequence[Sequence[int]], cols: int,
                  known_precision: Optional[int] = None) -> 'ZpMatrix':
        entries = np.zeros((len(rows), cols), dtype=object)
        for i, row in enumerate(rows):
            for j, value in enumerate(row):
                entries[i, j] = int(value)
        return cls(p, precision, entries,
                   precision if known_precision is None else known_precision)

    @classmethod
    def identity(cls, p: int, precision: int, n: int) -> 'ZpMatrix':
        return cls(p, precision, np.eye(n, dtype=int).astype(object), precision)

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    def __matmul__(self, other: 'ZpMatrix') -> 'ZpMatrix':
        product = self.entries.dot(other.entries) if self.cols else \
            np.zeros((self.rows, other.cols), dtype=object)
        return ZpMatrix(self.p, self.precision, product,
                        min(self.known_precision, other.known_precision))

    def mod_p(self) -> np.ndarray:
        return self.entries % self.p

    def valuations(self) -> np.ndarray:
        result = np.zeros(self.entries.shape, dtype=object)
        for index, value in np.ndenumerate(self.entries):
            result[index] = _int_valuation(int(value) % self.p ** self.known_precision,
                                           self.p, self.known_precision)
        return result

    def row_slice(self, start: int, stop: Optional[int] = None) -> 'ZpMatrix':
        return ZpMatrix(self.p, self.precision, self.entries[start:stop].copy(),
                        self.known_precision)

    def to_lists(self) -> List[List[int]]:
        return [[int(x) for x in row] for row in self.entries]


@dataclass
class HnfResult:
    U: ZpMatrix
    H: ZpMatrix
    h: int
    pivots: List[Tuple[int, int, int]] = field(default_factory=list)  # (row, col, valuation)

    @property
    def max_pivot_valuation(self) -> int:
        return max((v for _, _, v in self.pivots), default=0)


def hnf_zp(M: ZpMatrix, pivot_order: str = "lowest-row", guard_digits: int = 1) -> HnfResult:
    """Row echelon form U*M = H over Z_p with unimodular U

    Pivots are entries of minimal valuation among the unreduced rows. Ties go
    to the lowest row index, then the lowest column ("lowest-row"), or to the
    highest row index ("highest-row").
    """
    if M.denominator_exponent:
        raise ValueError("hnf_zp expects an integral matrix")
    p = M.p
    mod = p ** M.precision
    kp = M.known_precision
    H = M.entries.copy() % mod
    m, n = H.shape
    U = np.eye(m, dtype=int).astype(object)
    used_cols: set = set()
    pivots: List[Tuple[int, int, int]] = []
    row = 0
    while row < m:
        best = None
        candidates = range(row, m) if pivot_order == "lowest-row" else range(m - 1, row - 1, -1)
        for i in candidates:
            for j in range(n):
                if j in used_cols:
                    continue
                val = _int_valuation(int(H[i, j]) % p ** kp, p, kp)
                if val < kp and (best is None or val < best[0]):
                    best = (val, i, j)
        if best is None:
            break
        val, i, j = best
        if val >= kp - guard_digits:
            raise PrecisionAmbiguous(
                f"pivot of valuation {val} with only {kp} trusted digits")
        if i != row:
            H[[row, i]] = H[[i, row]]
            U[[row, i]] = U[[i, row]]
        unit = int(H[row, j]) // p ** val
        inv = pow(unit, -1, mod)
        H[row] = (H[row] * inv) % mod
        U[row] = (U[row] * inv) % mod
        for r in range(row + 1, m):
            c = int(H[r, j]) // p ** val
            if c:
                H[r] = (H[r] - c * H[row]) % mod
                U[r] = (U[r] - c * U[row]) % mod
        used_cols.add(j)
        pivots.append((row, j, val))
        row += 1
    h = m - row
    Umat = ZpMatrix(p, M.precision, U, kp)
    Hmat = ZpMatrix(p, M.precision, H, kp)
    return HnfResult(Umat, Hmat, h, pivots)
