"""
p-adic integrals of omega_k = x^(k-1) dx / y on genus-2 curves.

Expansions of omega_k in a well-behaved uniformizer around a point, tiny
integrals inside a unit ball, and integrals along divisors in the kernel of
reduction evaluated through power sums, so no roots of u are extracted.
Periods of K-rational classes are obtained by multiplying into that kernel.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import (
    IntegrationError, KernelAssertionFailed, NonIntegralDenominator, NonIntegralPoint,
    NotInKernel, OutOfBall,
)
from .localfield import LocalElement, LocalRing, lift_place
from .mumford import (
    CurveModel, CurvePoint, MumfordDivisor, embed_divisor, embed_point, reduce_local,
    scalar_mul,
)
from .numberfield import NfElement, Place
from .utils import floor_log, p_valuation

logger = logging.getLogger(__name__)

DIFFERENTIALS = (1, 2)
SAFETY_DIGITS = 2

FINITE_ORDINARY = "FiniteOrdinary"
FINITE_WEIERSTRASS = "FiniteWeierstrass"
INFINITY_KIND = "Infinity"


# Truncated power series over a local ring: lists of LocalElement, lowest first

def ps_mul(a: Sequence[LocalElement], b: Sequence[LocalElement], length: int,
           zero: LocalElement) -> List[LocalElement]:
    result = [zero] * length
    for i, x in enumerate(a[:length]):
        if x.is_zero():
            continue
        for j, y in enumerate(b[:length - i]):
            result[i + j] = result[i + j] + x * y
    return result


def ps_inv(a: Sequence[LocalElement], length: int, zero: LocalElement) -> List[LocalElement]:
    """Inverse of a series with unit constant term"""
    inv0 = a[0].inverse()
    result = [inv0] + [zero] * (length - 1)
    for n in range(1, length):
        acc = zero
        for k in range(1, min(n, len(a) - 1) + 1):
            acc = acc + a[k] * result[n - k]
        result[n] = -acc * inv0
    return result


def ps_sqrt(a: Sequence[LocalElement], root: LocalElement, length: int,
            zero: LocalElement) -> List[LocalElement]:
    """Square root with constant term root (root^2 = a[0], root a unit)"""
    a = list(a) + [zero] * max(0, length - len(a))
    inv2r = (root + root).inverse()
    result = [root] + [zero] * (length - 1)
    for n in range(1, length):
        acc = a[n]
        for k in range(1, n):
            acc = acc - result[k] * result[n - k]
        result[n] = acc * inv2r
    return result


def ps_poly(coeffs: Sequence, series: Sequence[LocalElement], length: int,
            zero: LocalElement) -> List[LocalElement]:
    """Polynomial with local coefficients evaluated at a series"""
    result = [zero] * length
    for c in reversed(list(coeffs)):
        result = ps_mul(result, series, length, zero)
        result[0] = result[0] + c
    return result


def ps_derivative(a: Sequence[LocalElement], zero: LocalElement) -> List[LocalElement]:
    result = [a[i] * i for i in range(1, len(a))]
    return result + [zero]


def ps_integrate(a: Sequence[LocalElement], zero: LocalElement) -> List[LocalElement]:
    """Antiderivative vanishing at 0, one term longer"""
    return [zero] + [c / (j + 1) for j, c in enumerate(a)]


def ps_shift(a: Sequence[LocalElement], k: int, length: int,
             zero: LocalElement) -> List[LocalElement]:
    """t^k * a"""
    return ([zero] * k + list(a))[:length]


def truncation_order(precision: int, p: int, extra: int = 0) -> int:
    """Minimal J with (J + 1) - floor(log_p(J + 1)) >= precision + extra"""
    target = precision + extra
    J = 0
    while (J + 1) - floor_log(J + 1, p) < target:
        J += 1
    return J


def _reversed_f(curve: CurveModel) -> List:
    """f_rev(s) = s^5 f(1/s)"""
    return list(reversed(curve.f))


# Uniformizers and expansions

@dataclass
class Uniformizer:
    """Well-behaved uniformizer t_Q at a point Q over K_v"""
    center: CurvePoint
    kind: str
    curve: CurveModel  # model over the local ring
    place: Place
    x0: Optional[LocalElement] = None
    y0: Optional[LocalElement] = None
    expansions: Dict[Tuple[int, int], 'Expansion'] = field(default_factory=dict)

    @property
    def ring(self) -> LocalRing:
        return self.curve.field

    def parameter(self, P: CurvePoint) -> LocalElement:
        """t_Q(P)"""
        R = self.ring
        if P.is_infinity:
            if self.kind != INFINITY_KIND:
                raise OutOfBall("infinity is not in a finite residue disc")
            return R.zero
        if self.kind == FINITE_ORDINARY:
            return P.x - self.x0
        if self.kind == FINITE_WEIERSTRASS:
            return P.y - self.y0
        return P.x * P.x / P.y


@dataclass
class Expansion:
    """omega = (alpha_0 + alpha_1 t + ...) dt truncated after alpha_{J-1}"""
    coefficients: List[LocalElement]
    order: int
    precision: int

    @property
    def alpha(self) -> LocalElement:
        return self.coefficients[0]


def _local_curve(curve: CurveModel, v: Place, precision: int) -> CurveModel:
    curve.reduce_at(v)
    return curve.localize(lift_place(v, precision))


def uniformizer_at(Q: CurvePoint, curve: CurveModel, v: Place, precision: int = 30) -> Uniformizer:
    """Uniformizer at Q; the kind follows the reduction of Q"""
    local = _local_curve(curve, v, precision)
    if Q.is_infinity:
        key = ('uniformizer', None)
        if key not in local.cache:
            local.cache[key] = Uniformizer(Q, INFINITY_KIND, local, v)
        return local.cache[key]
    P = embed_point(Q, local.field) if isinstance(Q.x, NfElement) else Q
    if not (P.x.is_integral() and P.y.is_integral()):
        raise NonIntegralPoint(f"{Q!r} is not integral at {v.label()}")
    key = ('uniformizer', P.x.coordinates(), P.y.coordinates())
    if key not in local.cache:
        kind = FINITE_WEIERSTRASS if P.y.reduce().is_zero() else FINITE_ORDINARY
        local.cache[key] = Uniformizer(Q, kind, local, v, P.x, P.y)
    return local.cache[key]


def _expand_ordinary(U: Uniformizer, k: int, length: int) -> List[LocalElement]:
    curve = U.curve
    R = U.ring
    zero = R.zero
    shifted = curve.ring.compose_linear(list(curve.f), U.x0)
    shifted = list(shifted) + [zero] * max(0, length - len(shifted))
    Y = ps_sqrt(shifted[:length], U.y0, length, zero)
    inv_y = ps_inv(Y, length, zero)
    x_series = [U.x0, R.one] + [zero] * (length - 2)
    factor = [R.one] + [zero] * (length - 1)
    for _ in range(k - 1):
        factor = ps_mul(factor, x_series, length, zero)
    return ps_mul(factor, inv_y, length, zero)


def _newton_steps(length: int) -> int:
    steps, known = 0, 1
    while known < length:
        known *= 2
        steps += 1
    return steps + 1


def _expand_weierstrass(U: Uniformizer, k: int, length: int) -> List[LocalElement]:
    curve = U.curve
    R = U.ring
    zero = R.zero
    f = list(curve.f)
    df = curve.ring.derivative(f)
    y_series = [U.y0, R.one] + [zero] * (length - 2)
    y_squared = ps_mul(y_series, y_series, length, zero)
    X = [U.x0] + [zero] * (length - 1)
    for _ in range(_newton_steps(length)):
        residual = ps_poly(f, X, length, zero)
        residual = [a - b for a, b in zip(residual, y_squared)]
        derivative = ps_poly(df, X, length, zero)
        step = ps_mul(residual, ps_inv(derivative, length, zero), length, zero)
        X = [a - b for a, b in zip(X, step)]
    inv_df = ps_inv(ps_poly(df, X, length, zero), length, zero)
    factor = [R.from_int(2)] + [zero] * (length - 1)
    for _ in range(k - 1):
        factor = ps_mul(factor, X, length, zero)
    return ps_mul(factor, inv_df, length, zero)


def _infinity_data(curve: CurveModel, length: int) -> Tuple[List[LocalElement], List[LocalElement]]:
    """sigma(t) = f_rev(s(t)) and its derivative, where s = 1/x solves s = t^2 f_rev(s)"""
    key = ('infinity-sigma', length)
    if key in curve.cache:
        return curve.cache[key]
    R = curve.field
    zero = R.zero
    f_rev = _reversed_f(curve)
    df_rev = curve.ring.derivative(f_rev)
    s = [zero] * length
    for _ in range(_newton_steps(length) + 1):
        sigma = ps_poly(f_rev, s, length, zero)
        residual = [a - b for a, b in zip(s, ps_shift(sigma, 2, length, zero))]
        slope = ps_shift(ps_poly(df_rev, s, length, zero), 2, length, zero)
        slope = [-c for c in slope]
        slope[0] = slope[0] + R.one
        step = ps_mul(residual, ps_inv(slope, length, zero), length, zero)
        s = [a - b for a, b in zip(s, step)]
    sigma = ps_poly(f_rev, s, length, zero)
    data = (sigma, ps_derivative(sigma, zero))
    curve.cache[key] = data
    return data


def _expand_infinity(U: Uniformizer, k: int, length: int) -> List[LocalElement]:
    R = U.ring
    zero = R.zero
    sigma, dsigma = _infinity_data(U.curve, length)
    if k == 1:
        # -t s'(t) with s = t^2 sigma
        first = ps_shift([c * 2 for c in sigma], 2, length, zero)
        second = ps_shift(dsigma, 3, length, zero)
        return [-(a + b) for a, b in zip(first, second)]
    ratio = ps_shift(ps_mul(dsigma, ps_inv(sigma, length, zero), length, zero), 1, length, zero)
    result = [-c for c in ratio]
    result[0] = result[0] - 2
    return result


def expand_differential(k: int, U: Uniformizer, J: int) -> Expansion:
    """alpha_0 .. alpha_{J-1} of omega_k in the uniformizer U"""
    if k not in DIFFERENTIALS:
        raise ValueError(f"Differential index must be 1 or 2, got {k}")
    length = max(J, 2)
    key = (k, length)
    cache = U.curve.cache if U.kind == INFINITY_KIND else U.expansions
    cache_key = ('expansion', k, length) if U.kind == INFINITY_KIND else key
    if cache_key in cache:
        return cache[cache_key]
    if U.kind == FINITE_ORDINARY:
        coeffs = _expand_ordinary(U, k, length)
    elif U.kind == FINITE_WEIERSTRASS:
        coeffs = _expand_weierstrass(U, k, length)
    else:
        coeffs = _expand_infinity(U, k, length)
    for j, c in enumerate(coeffs):
        if not c.is_integral():
            raise IntegrationError(f"alpha_{j} of omega_{k} is not integral")
    precision = min(c.precision for c in coeffs)
    expansion = Expansion(coeffs, length, precision)
    cache[cache_key] = expansion
    logger.debug("Expanded omega_%d at %s to %d terms", k, U.kind, length)
    return expansion


def alpha(Q: CurvePoint, curve: CurveModel, v: Place, k: int, precision: int = 30) -> LocalElement:
    """Leading coefficient alpha_0 of omega_k at Q"""
    U = uniformizer_at(Q, curve, v, precision)
    return expand_differential(k, U, 2).alpha


# Integrals

def _series_bound(length: int, valuation: int, p: int) -> int:
    """Lower bound on the valuation of every omitted term alpha_j/(j+1) t^(j+1), j >= length"""
    n = length + 1
    return n * valuation - floor_log(n, p)


def tiny_integral(U: Uniformizer, tP: LocalElement, E: Expansion) -> LocalElement:
    """int_Q^P omega for P in the unit ball of Q, from t_Q(P)"""
    R = U.ring
    if tP.is_zero():
        return R.zero
    m = tP.valuation()
    if m < 1:
        raise OutOfBall(f"t-value has valuation {m}")
    total = R.zero
    power = tP
    for j, c in enumerate(E.coefficients):
        total = total + c * power / (j + 1)
        power = power * tP
    bound = _series_bound(len(E.coefficients), m, R.p)
    return total.with_precision(bound)


def integrate_between(U: Uniformizer, P1: CurvePoint, P2: CurvePoint, k: int, J: int) -> LocalElement:
    """int_{P1}^{P2} omega_k for two points in the ball of U"""
    E = expand_differential(k, U, J)
    return tiny_integral(U, U.parameter(P2), E) - tiny_integral(U, U.parameter(P1), E)


def _power_sum_integral(coeffs: Sequence[LocalElement], s1: LocalElement, s2: LocalElement,
                        zero: LocalElement, offset: int = 1) -> LocalElement:
    """sum_j c_j p_{j+offset} with p_k the power sums of the roots of T^2 - s1 T + s2"""
    count = len(coeffs) + offset
    powers = [zero + 2, s1]
    for n in range(2, count):
        powers.append(s1 * powers[n - 1] - s2 * powers[n - 2])
    total = zero
    for j, c in enumerate(coeffs):
        total = total + c * powers[j + offset]
    return total


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise NotInKernel(message)


def _integral_at_infinity(D: MumfordDivisor, k: int, J: int, p: int) -> LocalElement:
    """Support reduces to infinity; t = x^2/y at each point"""
    curve = D.curve
    R = curve.field
    zero = R.zero
    U = uniformizer_at(CurvePoint(), curve.global_model, R.place, R.precision)
    E = expand_differential(k, U, J)
    if D.degree == 1:
        x1 = -D.u[0]
        y1 = D.v[0] if D.v else zero
        t = x1 * x1 / y1
        return tiny_integral(U, t, E)
    u0, u1 = D.u[0], D.u[1]
    v0 = D.v[0] if len(D.v) > 0 else zero
    v1 = D.v[1] if len(D.v) > 1 else zero
    e1, e2 = -u1, u0
    V = v1 * v1 * e2 + v1 * v0 * e1 + v0 * v0
    S = v1 * e2 * e1 + v0 * (e1 * e1 - e2 - e2)
    sigma1 = S / V
    sigma2 = e2 * e2 / V
    _require(sigma1.valuation() >= 1 and sigma2.valuation() >= 2,
             "parameters of the support are not in the disc at infinity")
    weights = [c / (j + 1) for j, c in enumerate(E.coefficients)]
    total = _power_sum_integral(weights, sigma1, sigma2, zero)
    return total.with_precision(_series_bound(len(weights), 1, p))


def _integral_at_pair(D: MumfordDivisor, c: LocalElement, k: int, J: int, p: int) -> LocalElement:
    """Support {P1, P2} reduces to {R, iota R} with R not a Weierstrass point

    The sum equals G(s1) + G(s2) with s = x - c, s1 + s2 = 0 and s1 s2 = u(c).
    """
    curve = D.curve
    R = curve.field
    zero = R.zero
    ring = curve.ring
    length = J + 1
    fc = curve.evaluate(c)
    g = [coeff / fc for coeff in ring.compose_linear(list(curve.f), c)]
    g = g + [zero] * max(0, length - len(g))
    phi = ps_inv(ps_sqrt(g[:length], R.one, length, zero), length, zero)
    integrand = list(phi)
    for _ in range(k - 1):
        integrand = ps_mul(integrand, [c, R.one] + [zero] * (length - 2), length, zero)
    big_phi = ps_integrate(integrand, zero)[:length]
    v0 = D.v[0] if len(D.v) > 0 else zero
    v1 = D.v[1] if len(D.v) > 1 else zero
    line = [v0 + v1 * c, v1] + [zero] * (length - 2)
    G = ps_mul(ps_mul(line, phi, length, zero), big_phi, length, zero)
    G = [coeff / fc for coeff in G]
    product = ring.evaluate(list(D.u), c)
    _require(product.valuation() >= 2, "support is not a pair in one residue disc")
    total = _power_sum_integral(G[1:], zero, product, zero)
    # omitted G_j p_j for j >= length has valuation >= (j - 1) - log_p(j)
    return total.with_precision(length - 1 - floor_log(length, p))


def _hensel_root(curve: CurveModel, c: LocalElement) -> LocalElement:
    """Root of f congruent to c (a simple root of the reduction)"""
    ring = curve.ring
    f = list(curve.f)
    df = ring.derivative(f)
    w = curve.field.from_residue(c.reduce())
    for _ in range(_newton_steps(curve.field.precision) + 1):
        w = w - ring.evaluate(f, w) / ring.evaluate(df, w)
    return w


def _integral_at_weierstrass(D: MumfordDivisor, c: LocalElement, k: int, J: int,
                             p: int) -> LocalElement:
    """Support in the disc of a Weierstrass point W; int_oo^W omega = 0 and t = y"""
    curve = D.curve
    R = curve.field
    zero = R.zero
    w = _hensel_root(curve, c)
    U = Uniformizer(CurvePoint(w, zero), FINITE_WEIERSTRASS, curve, R.place, w, zero)
    E = expand_differential(k, U, J)
    u0, u1 = D.u[0], D.u[1]
    v0 = D.v[0] if len(D.v) > 0 else zero
    v1 = D.v[1] if len(D.v) > 1 else zero
    e1, e2 = -u1, u0
    sigma1 = v1 * e1 + v0 + v0
    sigma2 = v1 * v1 * e2 + v1 * v0 * e1 + v0 * v0
    _require(sigma1.valuation() >= 1 and sigma2.valuation() >= 2,
             "y-values of the support are not small")
    weights = [coeff / (j + 1) for j, coeff in enumerate(E.coefficients)]
    total = _power_sum_integral(weights, sigma1, sigma2, zero)
    return total.with_precision(_series_bound(len(weights), 1, p))


def kernel_divisor_integral(D: MumfordDivisor, k: int, J: int) -> LocalElement:
    """int_D omega_k for a class over K_v in the kernel of reduction"""
    R = D.curve.field
    p = R.p
    if D.is_identity():
        return R.zero
    u_integral = all(c.is_integral() for c in D.u)
    if u_integral:
        _require(D.degree == 2, "a single finite point does not reduce to the identity")
        _require(not all(c.is_integral() for c in D.v), "class reduces to a nonzero class")
        c = -D.u[1] / 2
        if curve_value_is_unit(D.curve, c):
            return _integral_at_pair(D, c, k, J, p)
        return _integral_at_weierstrass(D, c, k, J, p)
    if D.degree == 2:
        b, a = D.u[0], D.u[1]
        va, vb = a.valuation(), b.valuation()
        both_large = vb < 0 and (a.is_zero() or 2 * va >= vb or vb - va < 0)
        _require(both_large, "one point of the support is integral")
    return _integral_at_infinity(D, k, J, p)


def curve_value_is_unit(curve: CurveModel, x: LocalElement) -> bool:
    return curve.evaluate(x).is_unit()


# Periods

@dataclass
class PeriodColumn:
    """tau_j(omega_1), tau_j(omega_2) at one place"""
    values: List[LocalElement]
    multiplier: int
    lost_digits: int


def period_column(D: MumfordDivisor, v: Place, precision: int = 30,
                  multiplier: Optional[int] = None) -> PeriodColumn:
    """int_D omega_k for k = 1, 2 via m_v * D in the kernel of reduction"""
    from .finitegeom import jacobian_order

    curve = D.curve
    Ck = curve.reduce_at(v)
    m = multiplier if multiplier is not None else jacobian_order(Ck)
    p = v.p
    lost = int(p_valuation(m, p))
    if D.is_identity():
        R = lift_place(v, precision)
        return PeriodColumn([R.zero, R.zero], m, lost)
    working = precision + lost + SAFETY_DIGITS
    R = lift_place(v, working)
    E = scalar_mul(m, embed_divisor(D, R))
    if not reduce_local(E, Ck).is_identity():
        raise KernelAssertionFailed(
            f"{m} * D does not reduce to the identity at {v.label()}")
    J = truncation_order(working, p, SAFETY_DIGITS)
    values = []
    for k in DIFFERENTIALS:
        try:
            value = kernel_divisor_integral(E, k, J)
        except NonIntegralDenominator as exc:
            raise IntegrationError(f"integration at {v.label()} failed: {exc}")
        values.append(value / m)
    logger.debug("Periods at %s: %s", v.label(), values)
    return PeriodColumn(values, m, lost)
