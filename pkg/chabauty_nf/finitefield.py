"""
Finite fields F_q = F_p[x]/(g) used as residue fields, their quadratic
extensions F_q(sqrt(delta)), and numpy-vectorized arithmetic for counting.
"""

import itertools
from functools import lru_cache
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .errors import DivisionByZero, NotASquare


def tonelli_shanks(a, one, field_size: int, nonresidue):
    """Square root of a nonzero square in a field of odd size"""
    q1 = field_size - 1
    s, odd = 0, q1
    while odd % 2 == 0:
        odd //= 2
        s += 1
    c = nonresidue ** odd
    t = a ** odd
    root = a ** ((odd + 1) // 2)
    m = s
    while t != one:
        i, t2 = 0, t
        while t2 != one:
            t2 = t2 * t2
            i += 1
            if i == m:
                raise NotASquare(f"{a!r} is not a square")
        b = c ** (2 ** (m - i - 1))
        m = i
        c = b * b
        t = t * c
        root = root * b
    return root


class FiniteField:
    """F_q as polynomials over F_p modulo a monic irreducible g (low to high)"""

    def __init__(self, p: int, modulus: Sequence[int] = (0, 1)):
        self.p = p
        self.modulus: Tuple[int, ...] = tuple(int(c) % p for c in modulus)
        self.degree = len(self.modulus) - 1
        self.order = p ** self.degree
        self._nonresidue: Optional['FqElement'] = None
        self._square_table: Optional[np.ndarray] = None

    def __eq__(self, other) -> bool:
        return isinstance(other, FiniteField) and (self.p, self.modulus) == (other.p, other.modulus)

    def __hash__(self) -> int:
        return hash(('FiniteField', self.p, self.modulus))

    def __repr__(self) -> str:
        return f"FiniteField({self.p}, {list(self.modulus)})"

    # Scalar elements

    def reduce_coeffs(self, coeffs: Sequence[int]) -> Tuple[int, ...]:
        p, d, g = self.p, self.degree, self.modulus
        work = [int(c) % p for c in coeffs]
        for k in range(len(work) - 1, d - 1, -1):
            c = work[k]
            if c:
                for i in range(d):
                    work[k - d + i] = (work[k - d + i] - c * g[i]) % p
            work[k] = 0
        work = work[:d] + [0] * max(0, d - len(work))
        return tuple(work)

    def element(self, coeffs: Sequence[int]) -> 'FqElement':
        return FqElement(self, self.reduce_coeffs(coeffs))

    def from_int(self, value: int) -> 'FqElement':
        return self.element([value])

    @property
    def zero(self) -> 'FqElement':
        return FqElement(self, (0,) * self.degree)

    @property
    def one(self) -> 'FqElement':
        return self.element([1])

    def encode(self, x: 'FqElement') -> int:
        return sum(c * self.p ** i for i, c in enumerate(x.coeffs))

    def decode(self, n: int) -> 'FqElement':
        coeffs = []
        for _ in range(self.degree):
            n, r = divmod(n, self.p)
            coeffs.append(r)
        return FqElement(self, tuple(coeffs))

    def elements(self) -> Iterator['FqElement']:
        for coeffs in itertools.product(range(self.p), repeat=self.degree):
            yield FqElement(self, tuple(reversed(coeffs)))

    def random_element(self, rng: np.random.Generator) -> 'FqElement':
        return self.decode(int(rng.integers(0, self.order)))

    def nonresidue(self) -> 'FqElement':
        """Non-square of smallest encoding"""
        if self._nonresidue is None:
            for n in range(1, self.order):
                x = self.decode(n)
                if not x.is_square():
                    self._nonresidue = x
                    break
        return self._nonresidue

    # Vectorized arithmetic on arrays of shape (n, degree)

    def all_elements_array(self) -> np.ndarray:
        n = np.arange(self.order, dtype=np.int64)
        columns = []
        for _ in range(self.degree):
            columns.append(n % self.p)
            n = n // self.p
        return np.stack(columns, axis=1)

    def constant_array(self, x: 'FqElement', n: int) -> np.ndarray:
        return np.tile(np.array(x.coeffs, dtype=np.int64), (n, 1))

    def vadd(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return (a + b) % self.p

    def vsub(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return (a - b) % self.p

    def vmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        p, d = self.p, self.degree
        if d == 1:
            return (a * b) % p
        n = max(a.shape[0], b.shape[0])
        product = np.zeros((n, 2 * d - 1), dtype=np.int64)
        for i in range(d):
            for j in range(d):
                product[:, i + j] = (product[:, i + j] + a[:, i] * b[:, j]) % p
        g = self.modulus
        for k in range(2 * d - 2, d - 1, -1):
            c = product[:, k]
            for i in range(d):
                product[:, k - d + i] = (product[:, k - d + i] - c * g[i]) % p
        return product[:, :d] % p

    def vpow(self, a: np.ndarray, e: int) -> np.ndarray:
        result = self.constant_array(self.one, a.shape[0])
        base = a
        while e:
            if e & 1:
                result = self.vmul(result, base)
            base = self.vmul(base, base)
            e >>= 1
        return result

    def vchi(self, a: np.ndarray) -> np.ndarray:
        """Quadratic character elementwise: 0, 1 or -1"""
        if self.degree == 1:
            if self._square_table is None:
                table = -np.ones(self.p, dtype=np.int64)
                table[(np.arange(self.p, dtype=np.int64) ** 2) % self.p] = 1
                table[0] = 0
                self._square_table = table
            return self._square_table[a[:, 0]]
        powered = self.vpow(a, (self.order - 1) // 2)
        is_zero = ~a.any(axis=1)
        is_one = (powered[:, 0] == 1) & ~powered[:, 1:].any(axis=1)
        return np.where(is_zero, 0, np.where(is_one, 1, -1))

    def veval(self, coeffs: Sequence['FqElement'], a: np.ndarray) -> np.ndarray:
        """Evaluate a polynomial with coefficients in F_q at every row of a"""
        n = a.shape[0]
        result = np.zeros((n, self.degree), dtype=np.int64)
        for c in reversed(list(coeffs)):
            result = self.vadd(self.vmul(result, a), self.constant_array(c, n))
        return result


class FqElement:
    """Element of a finite field"""

    __slots__ = ('field', 'coeffs')

    def __init__(self, field: FiniteField, coeffs: Tuple[int, ...]):
        self.field = field
        self.coeffs = coeffs

    def _coerce(self, other) -> 'FqElement':
        if isinstance(other, FqElement):
            return other
        if isinstance(other, int):
            return self.field.from_int(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.field.p
        return FqElement(self.field, tuple((a + b) % p for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        p = self.field.p
        return FqElement(self.field, tuple((-a) % p for a in self.coeffs))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.field.p
        return FqElement(self.field, tuple((a - b) % p for a, b in zip(self.coeffs, other.coeffs)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        field = self.field
        if field.degree == 1:
            return FqElement(field, ((self.coeffs[0] * other.coeffs[0]) % field.p,))
        product = [0] * (2 * field.degree - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    product[i + j] += a * b
        return FqElement(field, field.reduce_coeffs(product))

    __rmul__ = __mul__

    def inverse(self) -> 'FqElement':
        if self.is_zero():
            raise DivisionByZero("inverse of zero in a finite field")
        if self.field.degree == 1:
            return FqElement(self.field, (pow(self.coeffs[0], -1, self.field.p),))
        return self ** (self.field.order - 2)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        if self.field.degree == 1:
            return FqElement(self.field, (pow(self.coeffs[0], n, self.field.p),))
        result = self.field.one
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = self.field.from_int(other)
        if not isinstance(other, FqElement):
            return NotImplemented
        return self.coeffs == other.coeffs and self.field == other.field

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        if self.field.degree == 1:
            return f"{self.coeffs[0]}"
        return f"Fq{list(self.coeffs)}"

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def encode(self) -> int:
        return self.field.encode(self)

    def chi(self) -> int:
        """Quadratic character"""
        if self.is_zero():
            return 0
        return 1 if self ** ((self.field.order - 1) // 2) == self.field.one else -1

    def is_square(self) -> bool:
        return self.chi() >= 0

    def sqrt(self) -> 'FqElement':
        """Square root with the smaller encoding of the two roots"""
        if self.is_zero():
            return self
        if not self.is_square():
            raise NotASquare(f"{self!r} is not a square")
        root = tonelli_shanks(self, self.field.one, self.field.order, self.field.nonresidue())
        other = -root
        return root if root.encode() <= other.encode() else other


@lru_cache(maxsize=None)
def quadratic_extension(base: FiniteField) -> 'QuadraticExtension':
    return QuadraticExtension(base)


class QuadraticExtension:
    """F_{q^2} = F_q(sqrt(delta)) with delta the canonical non-square of F_q"""

    def __init__(self, base: FiniteField):
        self.base = base
        self.delta = base.nonresidue()
        self.order = base.order ** 2
        self._nonresidue: Optional['Fq2Element'] = None

    @property
    def zero(self) -> 'Fq2Element':
        return Fq2Element(self, self.base.zero, self.base.zero)

    @property
    def one(self) -> 'Fq2Element':
        return Fq2Element(self, self.base.one, self.base.zero)

    def from_int(self, value: int) -> 'Fq2Element':
        return Fq2Element(self, self.base.from_int(value), self.base.zero)

    def embed(self, x: FqElement) -> 'Fq2Element':
        return Fq2Element(self, x, self.base.zero)

    def make(self, a: FqElement, b: FqElement) -> 'Fq2Element':
        return Fq2Element(self, a, b)

    def nonresidue(self) -> 'Fq2Element':
        if self._nonresidue is None:
            for n in range(self.base.order):
                candidate = Fq2Element(self, self.base.decode(n), self.base.one)
                if candidate.norm().chi() == -1:
                    self._nonresidue = candidate
                    break
        return self._nonresidue

    # Vectorized arithmetic on pairs (A, B) of (n, degree) arrays

    def vmul(self, x: Tuple[np.ndarray, np.ndarray], y: Tuple[np.ndarray, np.ndarray]):
        F = self.base
        a1, b1 = x
        a2, b2 = y
        n = max(a1.shape[0], a2.shape[0])
        delta = F.constant_array(self.delta, n)
        real = F.vadd(F.vmul(a1, a2), F.vmul(delta, F.vmul(b1, b2)))
        imag = F.vadd(F.vmul(a1, b2), F.vmul(a2, b1))
        return real, imag

    def vnorm(self, x: Tuple[np.ndarray, np.ndarray]) -> np.ndarray:
        F = self.base
        a, b = x
        delta = F.constant_array(self.delta, a.shape[0])
        return F.vsub(F.vmul(a, a), F.vmul(delta, F.vmul(b, b)))

    def veval(self, coeffs: Sequence[FqElement], x: Tuple[np.ndarray, np.ndarray]):
        """Evaluate an F_q-polynomial at every pair a + b*sqrt(delta)"""
        F = self.base
        n = x[0].shape[0]
        real = np.zeros((n, F.degree), dtype=np.int64)
        imag = np.zeros((n, F.degree), dtype=np.int64)
        for c in reversed(list(coeffs)):
            real, imag = self.vmul((real, imag), x)
            real = F.vadd(real, F.constant_array(c, n))
        return real, imag


class Fq2Element:
    """a + b*sqrt(delta) in F_{q^2}"""

    __slots__ = ('field', 'a', 'b')

    def __init__(self, field: QuadraticExtension, a: FqElement, b: FqElement):
        self.field = field
        self.a = a
        self.b = b

    def _coerce(self, other) -> 'Fq2Element':
        if isinstance(other, Fq2Element):
            return other
        if isinstance(other, FqElement):
            return self.field.embed(other)
        if isinstance(other, int):
            return self.field.from_int(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Fq2Element(self.field, self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __neg__(self):
        return Fq2Element(self.field, -self.a, -self.b)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Fq2Element(self.field, self.a - other.a, self.b - other.b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        delta = self.field.delta
        return Fq2Element(self.field,
                          self.a * other.a + delta * self.b * other.b,
                          self.a * other.b + self.b * other.a)

    __rmul__ = __mul__

    def conjugate(self) -> 'Fq2Element':
        return Fq2Element(self.field, self.a, -self.b)

    def norm(self) -> FqElement:
        return self.a * self.a - self.field.delta * self.b * self.b

    def inverse(self) -> 'Fq2Element':
        n = self.norm()
        if n.is_zero():
            raise DivisionByZero("inverse of zero in F_q^2")
        inv = n.inverse()
        return Fq2Element(self.field, self.a * inv, -self.b * inv)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field.one
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
        return self.a == other.a and self.b == other.b

    def __hash__(self) -> int:
        return hash((self.a, self.b))

    def __repr__(self) -> str:
        return f"({self.a!r} + {self.b!r}*s)"

    def is_zero(self) -> bool:
        return self.a.is_zero() and self.b.is_zero()

    def in_base(self) -> bool:
        return self.b.is_zero()

    def is_square(self) -> bool:
        return self.norm().chi() >= 0

    def sqrt(self) -> 'Fq2Element':
        if self.is_zero():
            return self
        if not self.is_square():
            raise NotASquare(f"{self!r} is not a square in F_q^2")
        return tonelli_shanks(self, self.field.one, self.field.order, self.field.nonresidue())
