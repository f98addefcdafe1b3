"""
Genus-2 curves y^2 = f(x) with deg f = 5 and their Jacobians in Mumford
representation, generic over the coefficient field (K, F_q or K_v).
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .errors import (
    BadReduction, NonIntegralDenominator, NotOnJacobian, PrecisionLoss,
    SingularModel, WrongDegree,
)
from .finitefield import FiniteField
from .localfield import DEFAULT_PRECISION, LocalRing, embed, lift_place
from .numberfield import NfElement, NumberField, Place
from .polynomials import PolyRing
from .utils import factorization

logger = logging.getLogger(__name__)

GENUS = 2


@dataclass(frozen=True)
class CurvePoint:
    """Point of the curve; x and y are None for the point at infinity"""
    x: Optional[object] = None
    y: Optional[object] = None

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def involution(self) -> 'CurvePoint':
        if self.is_infinity:
            return self
        return CurvePoint(self.x, -self.y)

    def __repr__(self) -> str:
        if self.is_infinity:
            return "CurvePoint(oo)"
        return f"CurvePoint({self.x!r}, {self.y!r})"


INFINITY = CurvePoint()


class CurveModel:
    """y^2 = f(x) with f of degree 5 over an abstract coefficient field"""

    def __init__(self, field, f: Sequence, check: bool = True):
        self.field = field
        self.ring = PolyRing(field)
        self.f: Tuple = tuple(self.ring.strip(f))
        self._local_models: Dict[Tuple[Place, int], 'CurveModel'] = {}
        self._residue_models: Dict[Place, 'CurveModel'] = {}
        self._disc = None
        self.cache: Dict = {}
        if check:
            if len(self.f) - 1 != 5:
                raise WrongDegree(f"Model must have degree 5, got {len(self.f) - 1}")
            if self.disc.is_zero():
                raise SingularModel("Discriminant of f vanishes")

    def __repr__(self) -> str:
        return f"CurveModel(f={list(self.f)!r})"

    @property
    def leading_coeff(self):
        return self.f[-1]

    @property
    def disc(self):
        if self._disc is None:
            self._disc = self.ring.discriminant(self.f)
        return self._disc

    @property
    def genus(self) -> int:
        return GENUS

    def evaluate(self, x):
        return self.ring.evaluate(self.f, x)

    def is_on_curve(self, P: CurvePoint) -> bool:
        if P.is_infinity:
            return True
        return (P.y * P.y - self.evaluate(P.x)).is_zero()

    def point(self, x, y) -> CurvePoint:
        P = CurvePoint(x, y)
        if not self.is_on_curve(P):
            raise NotOnJacobian(f"{P!r} is not on the curve")
        return P

    @property
    def infinity(self) -> CurvePoint:
        return INFINITY

    def identity(self) -> 'MumfordDivisor':
        return MumfordDivisor(self, (self.field.one,), ())

    # Number field models

    def bad_primes(self) -> Set[int]:
        """Rational primes below which reduction may be bad: 2, lc, disc, denominators"""
        if not isinstance(self.field, NumberField):
            raise TypeError("bad_primes is defined for curves over number fields")
        primes = {2}
        for value in (self.leading_coeff.norm(), self.disc.norm()):
            for part in (value.numerator, value.denominator):
                if abs(part) > 1:
                    primes.update(factorization(abs(part)))
        for c in self.f:
            den = c.denominator()
            if den > 1:
                primes.update(factorization(den))
        return primes

    def localize(self, R: LocalRing) -> 'CurveModel':
        """The same model over the completion R"""
        key = (R.place, R.precision)
        if key not in self._local_models:
            coeffs = [embed(c, R) for c in self.f]
            model = CurveModel(R, coeffs, check=False)
            model.global_model = self
            self._local_models[key] = model
        return self._local_models[key]

    def reduce_at(self, v: Place, precision: int = DEFAULT_PRECISION) -> 'CurveModel':
        """Reduction modulo v; BadReduction unless the model stays smooth of degree 5"""
        if v in self._residue_models:
            return self._residue_models[v]
        local = self.localize(lift_place(v, precision))
        try:
            coeffs = [c.reduce() for c in local.f]
        except NonIntegralDenominator:
            raise BadReduction(f"Model is not integral at {v.label()}")
        reduced = CurveModel(local.field.residue_field, coeffs, check=False)
        if len(reduced.f) != 6 or reduced.disc.is_zero():
            raise BadReduction(f"Model does not have good reduction at {v.label()}")
        self._residue_models[v] = reduced
        return reduced

    def has_good_reduction(self, v: Place) -> bool:
        try:
            self.reduce_at(v)
            return True
        except BadReduction:
            return False


def validate_curve(f: Sequence, field=None) -> CurveModel:
    """Validated curve model; over a number field also records the bad primes"""
    if field is None:
        if not f:
            raise WrongDegree("Empty polynomial")
        field = f[0].field
    model = CurveModel(field, f)
    if isinstance(field, NumberField):
        model.bad = model.bad_primes()
        logger.debug("Curve %r has bad primes among %s", model, sorted(model.bad))
    return model


class MumfordDivisor:
    """Reduced Mumford pair [u, v]: u monic, deg u <= 2, deg v < deg u, u | v^2 - f"""

    __slots__ = ('curve', 'u', 'v')

    def __init__(self, curve: CurveModel, u: Sequence, v: Sequence):
        self.curve = curve
        self.u = tuple(u)
        self.v = tuple(v)

    @property
    def degree(self) -> int:
        return len(self.u) - 1

    def is_identity(self) -> bool:
        return len(self.u) == 1

    def __add__(self, other: 'MumfordDivisor') -> 'MumfordDivisor':
        return cantor_add(self, other)

    def __neg__(self) -> 'MumfordDivisor':
        return MumfordDivisor(self.curve, self.u, self.curve.ring.neg(self.v))

    def __sub__(self, other: 'MumfordDivisor') -> 'MumfordDivisor':
        return cantor_add(self, -other)

    def __mul__(self, n: int) -> 'MumfordDivisor':
        return scalar_mul(n, self)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, MumfordDivisor):
            return NotImplemented
        ring = self.curve.ring
        return (len(self.u) == len(other.u) and ring.equal(self.u, other.u)
                and ring.equal(self.v, other.v))

    def __hash__(self) -> int:
        return hash((self.u, self.v))

    def __repr__(self) -> str:
        return f"MumfordDivisor(u={list(self.u)!r}, v={list(self.v)!r})"

    def key(self) -> Tuple:
        """Hashable canonical encoding over finite fields"""
        return (tuple(c.encode() for c in self.u), tuple(c.encode() for c in self.v))

    def is_valid(self) -> bool:
        ring = self.curve.ring
        remainder = ring.mod(ring.sub(ring.square(self.v), self.curve.f), self.u)
        return ring.is_zero(remainder)


def _normalize(curve: CurveModel, u: Sequence, v: Sequence) -> MumfordDivisor:
    ring = curve.ring
    u = ring.monic(u)
    if not u:
        raise NotOnJacobian("u must be nonzero")
    v = ring.mod(v, u)
    return MumfordDivisor(curve, u, v)


def _check_degree(poly: Sequence, expected: int) -> None:
    if len(poly) - 1 != expected:
        raise PrecisionLoss(
            f"leading coefficient lost its digits (degree {len(poly) - 1}, expected {expected})")


def cantor_reduce(curve: CurveModel, u: Sequence, v: Sequence) -> MumfordDivisor:
    """Reduce a semi-reduced pair until deg u <= 2"""
    ring = curve.ring
    u = ring.strip(u)
    v = ring.mod(v, u)
    while len(u) - 1 > GENUS:
        numerator = ring.sub(curve.f, ring.square(v))
        expected = max(5, 2 * (len(v) - 1)) - (len(u) - 1)
        u = ring.exact_div(numerator, u)
        _check_degree(u, expected)
        v = ring.mod(ring.neg(v), u)
    return _normalize(curve, u, v)


def cantor_add(D1: MumfordDivisor, D2: MumfordDivisor) -> MumfordDivisor:
    """Sum of two classes by composition and reduction"""
    curve = D1.curve
    ring = curve.ring
    if D1.is_identity():
        return D2
    if D2.is_identity():
        return D1
    u1, v1, u2, v2 = list(D1.u), list(D1.v), list(D2.u), list(D2.v)
    d1, e1, e2 = ring.xgcd(u1, u2)
    d, c1, c2 = ring.xgcd(d1, ring.add(v1, v2))
    if not d:
        d, c1, c2 = d1, [curve.field.one], []
    s1 = ring.mul(c1, e1)
    s2 = ring.mul(c1, e2)
    s3 = c2
    dd = ring.square(d)
    u = ring.exact_div(ring.mul(u1, u2), dd)
    _check_degree(u, len(u1) + len(u2) - 2 - 2 * (len(d) - 1))
    if len(u) == 1:
        return curve.identity()
    vv = ring.add(ring.add(ring.mul(s1, ring.mul(u1, v2)), ring.mul(s2, ring.mul(u2, v1))),
                  ring.mul(s3, ring.add(ring.mul(v1, v2), list(curve.f))))
    v = ring.mod(ring.exact_div(vv, d), u)
    return cantor_reduce(curve, u, v)


def scalar_mul(n: int, D: MumfordDivisor) -> MumfordDivisor:
    """n*D by double-and-add"""
    if n < 0:
        return scalar_mul(-n, -D)
    result = D.curve.identity()
    addend = D
    while n:
        if n & 1:
            result = cantor_add(result, addend)
        n >>= 1
        if n:
            addend = cantor_add(addend, addend)
    return result


def point_divisor(P: CurvePoint, C: CurveModel) -> MumfordDivisor:
    """[P - oo]"""
    if P.is_infinity:
        return C.identity()
    if not C.is_on_curve(P):
        raise NotOnJacobian(f"{P!r} is not on the curve")
    one = C.field.one
    return MumfordDivisor(C, (-P.x, one), C.ring.strip([P.y]))


def mumford_make(data, C: CurveModel) -> MumfordDivisor:
    """Canonical class from a list of points or a (u, v) pair (u may be non-monic)"""
    if isinstance(data, MumfordDivisor):
        return data
    if isinstance(data, dict):
        u, v = data['u'], data['v']
        return _from_pair(u, v, C)
    if isinstance(data, tuple) and len(data) == 2 and not isinstance(data[0], CurvePoint):
        return _from_pair(data[0], data[1], C)
    result = C.identity()
    for P in data or ():
        result = cantor_add(result, point_divisor(P, C))
    return result


def _from_pair(u: Sequence, v: Sequence, C: CurveModel) -> MumfordDivisor:
    ring = C.ring
    u = ring.monic(u)
    if not u:
        raise NotOnJacobian("u must be nonzero")
    v = ring.mod(list(v), u)
    remainder = ring.mod(ring.sub(ring.square(v), C.f), u)
    if not ring.is_zero(remainder):
        raise NotOnJacobian("u does not divide v^2 - f")
    return cantor_reduce(C, u, v)


def abel_jacobi(P: CurvePoint, P0: CurvePoint, C: CurveModel) -> MumfordDivisor:
    """[P - P0] = [P - oo] + [iota(P0) - oo]"""
    return cantor_add(point_divisor(P, C), point_divisor(P0.involution(), C))


# Local and residue images

def embed_divisor(D: MumfordDivisor, R: LocalRing) -> MumfordDivisor:
    """Image of a K-rational class over the completion R"""
    curve = D.curve.localize(R)
    u = [embed(c, R) for c in D.u]
    v = curve.ring.strip([embed(c, R) for c in D.v])
    return MumfordDivisor(curve, u, v)


def embed_point(P: CurvePoint, R: LocalRing) -> CurvePoint:
    if P.is_infinity:
        return P
    return CurvePoint(embed(P.x, R), embed(P.y, R))


def reduce_point(P: CurvePoint) -> CurvePoint:
    """Reduction of a point over K_v; non-integral x reduces to infinity"""
    if P.is_infinity or not P.x.is_integral():
        return INFINITY
    return CurvePoint(P.x.reduce(), P.y.reduce())


def _residue_divisor(Ck: CurveModel, u: Sequence, v: Sequence) -> MumfordDivisor:
    ring = Ck.ring
    u = ring.strip([c.reduce() for c in u])
    v = ring.strip([c.reduce() for c in v])
    return _normalize(Ck, u, v)


def reduce_local(E: MumfordDivisor, Ck: CurveModel) -> MumfordDivisor:
    """Reduction of a class over K_v to the residue curve Ck

    Points with non-integral x reduce to infinity and drop out; when only one
    root of a quadratic u is integral it is isolated from the Newton polygon
    of u by a fixed-point iteration, so no root extraction is needed.
    """
    u, v = list(E.u), list(E.v)
    deg = len(u) - 1
    if deg == 0:
        return Ck.identity()
    u_integral = all(c.is_integral() for c in u)
    v_integral = all(c.is_integral() for c in v)
    if u_integral:
        if v_integral:
            return _residue_divisor(Ck, u, v)
        # Both points reduce to a pair {R, iota(R)}.
        return Ck.identity()
    if deg == 1:
        return Ck.identity()
    b, a = u[0], u[1]
    va, vb = a.valuation(), b.valuation()
    # Single slope: both roots have valuation vb/2 < 0.
    if a.is_zero() or 2 * va >= vb:
        return Ck.identity()
    if vb - va < 0:
        return Ck.identity()
    # Small root x_b = -b/(a + x_b), large root of valuation va < 0.
    x = -b / a
    R = E.curve.field
    for _ in range(R.precision + 2):
        x = -b / (a + x)
    y = E.curve.ring.evaluate(v, x)
    if min(x.precision, y.precision) < 1:
        raise PrecisionLoss("isolated root known to fewer than one digit")
    point = CurvePoint(x.reduce(), y.reduce())
    return point_divisor(point, Ck)


def reduce_divisor(D: MumfordDivisor, v: Place,
                   precision: int = DEFAULT_PRECISION) -> MumfordDivisor:
    """Image of a K-rational class in J(k_v)"""
    Ck = D.curve.reduce_at(v)
    if D.is_identity():
        return Ck.identity()
    R = lift_place(v, precision)
    return reduce_local(embed_divisor(D, R), Ck)


def reduce_global_point(P: CurvePoint, v: Place, precision: int = DEFAULT_PRECISION) -> CurvePoint:
    if P.is_infinity:
        return P
    return reduce_point(embed_point(P, lift_place(v, precision)))


def encode_divisor(D: MumfordDivisor) -> Dict[str, List]:
    """Canonical text encoding of a K-rational pair"""
    return {'u': [c.encode() for c in D.u], 'v': [c.encode() for c in D.v]}
