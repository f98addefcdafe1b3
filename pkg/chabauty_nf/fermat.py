"""
Back-substitution from points on the descent curves to x^2 + y^3 = z^10.

Case II (y even) uses the curves C_s over K = Q(theta), theta^3 = 2, where a
point (X, Y) gives u/v = theta (Y + 3 eps^s) / (Y - 3 eps^s) with eps = 1 - theta,
then x = u^3 + 2 v^3, y = -2uv and z^5 = u^3 - 2v^3.

Case I (y odd) uses Y^2 = 3(X^5 - 1) and Y^2 = X^5 - 3^7 over Q, where
(X, Y) = (b/a^2, 3c/2a^5) or (b/a^2, c/2a^5) with u - v = 2a^5 (resp.
2*3^4 a^5), u + v = c, then x = (u^3 + v^3)/2, y = -uv and z = ab (resp. 3ab).
"""

import logging
import math
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Set, Tuple

from .models import FermatCandidate
from .mumford import CurvePoint
from .numberfield import NfElement, NumberField
from .utils import exact_root

logger = logging.getLogger(__name__)

Solution = Tuple[int, int, int]


def is_solution(x: int, y: int, z: int) -> bool:
    return x * x + y ** 3 == z ** 10


def fundamental_unit(K: NumberField) -> NfElement:
    return K.one - K.theta


def unit_power(K: NumberField, s: int) -> NfElement:
    eps = fundamental_unit(K)
    return eps ** s if s >= 0 else (K.one / eps) ** (-s)


def _case_two_solutions(u: int, v: int) -> Optional[List[Solution]]:
    z = exact_root(u ** 3 - 2 * v ** 3, 5)
    if z is None:
        return None
    solution = (u ** 3 + 2 * v ** 3, -2 * u * v, z)
    assert is_solution(*solution), solution
    return [solution]


def recover_case_two(point: CurvePoint, s: int, K: NumberField) -> FermatCandidate:
    """Push a point of C_s back to (u, v) and then to (x, y, z)"""
    candidate = FermatCandidate(case="II", s=s, point=point)
    if point.is_infinity:
        # Infinity forces alpha = 0, so z = 0 with u, v not both odd and coprime.
        candidate.ratio_kind = "none"
        candidate.reason = "point at infinity gives no coprime (u, v)"
        return candidate
    shift = 3 * unit_power(K, s)
    if point.y == shift:
        candidate.ratio_kind = "infinite"
        for u in (1, -1):
            solutions = _case_two_solutions(u, 0)
            candidate.solutions.extend(solutions or [])
        candidate.u, candidate.v = 1, 0
        candidate.accepted = bool(candidate.solutions)
        candidate.reason = "v = 0 branch"
        return candidate
    quotient = K.theta * (point.y + shift) / (point.y - shift)
    if not quotient.is_rational():
        candidate.ratio_kind = "non-rational"
        candidate.reason = f"u/v = {quotient!r} is not rational"
        return candidate
    ratio = quotient.to_rational()
    candidate.ratio = ratio
    u, v = ratio.numerator, ratio.denominator
    candidate.u, candidate.v = u, v
    if u % 2 == 0:
        candidate.reason = f"u/v = {ratio} forces u even"
        return candidate
    for sign in (1, -1):
        solutions = _case_two_solutions(sign * u, sign * v)
        if solutions:
            candidate.solutions.extend(solutions)
    if not candidate.solutions:
        candidate.reason = f"u^3 - 2v^3 = {u ** 3 - 2 * v ** 3} is not a fifth power up to sign"
        return candidate
    candidate.accepted = True
    candidate.reason = "accepted"
    return candidate


CASE_ONE = {
    # variant: (Y scale, u - v scale, u^2 + uv + v^2 scale, z scale)
    'I.1': (Fraction(3, 2), 2, 1, 1),
    'I.2': (Fraction(1, 2), 2 * 3 ** 4, 3, 3),
}


def _case_one_pair(variant: str, a: int, c: int) -> Optional[Tuple[int, int]]:
    _, diff_scale, _, _ = CASE_ONE[variant]
    diff = diff_scale * a ** 5
    if (c + diff) % 2:
        return None
    return (c + diff) // 2, (c - diff) // 2


def _case_one_solutions(variant: str, u: int, v: int, a: int) -> Tuple[List[Solution], str]:
    _, _, norm_scale, z_scale = CASE_ONE[variant]
    if u % 2 == 0 or v % 2 == 0:
        return [], "u and v must both be odd"
    if math.gcd(u, v) != 1:
        return [], "u and v are not coprime"
    norm = u * u + u * v + v * v
    if norm % norm_scale:
        return [], f"u^2 + uv + v^2 = {norm} is not divisible by {norm_scale}"
    b = exact_root(norm // norm_scale, 5)
    if b is None:
        return [], f"u^2 + uv + v^2 = {norm} is not {norm_scale} times a fifth power"
    solution = ((u ** 3 + v ** 3) // 2, -u * v, z_scale * a * b)
    assert is_solution(*solution), solution
    return [solution], "accepted"


def recover_case_one(point: CurvePoint, variant: str) -> FermatCandidate:
    """Push a point of the Case I curve back to (x, y, z); the field is Q"""
    candidate = FermatCandidate(case=variant, s=None, point=point)
    y_scale, _, _, _ = CASE_ONE[variant]
    if point.is_infinity:
        candidate.ratio_kind = "infinite"
        reasons = []
        for u in (1, -1):
            solutions, reason = _case_one_solutions(variant, u, u, 0)
            candidate.solutions.extend(solutions)
            reasons.append(reason)
        candidate.u = candidate.v = 1
        candidate.accepted = bool(candidate.solutions)
        candidate.reason = "a = 0 branch" if candidate.accepted else reasons[0]
        return candidate
    X, Y = point.x.to_rational(), point.y.to_rational()
    root = math.isqrt(X.denominator)
    if root * root != X.denominator:
        candidate.reason = f"X = {X} has a non-square denominator"
        return candidate
    reasons = []
    for a in (root, -root):
        c = Y * a ** 5 / y_scale
        if c.denominator != 1:
            reasons.append(f"c = {c} is not an integer")
            continue
        pair = _case_one_pair(variant, a, int(c))
        if pair is None:
            reasons.append("u, v are not integers")
            continue
        u, v = pair
        solutions, reason = _case_one_solutions(variant, u, v, a)
        if solutions:
            candidate.u, candidate.v = u, v
            candidate.ratio = Fraction(u, v) if v else None
        candidate.solutions.extend(solutions)
        reasons.append(reason)
    candidate.accepted = bool(candidate.solutions)
    candidate.reason = "accepted" if candidate.accepted else reasons[0]
    return candidate


def fermat_recover(point: CurvePoint, case: str, s: Optional[int], K: NumberField) -> FermatCandidate:
    if case == "II":
        return recover_case_two(point, s, K)
    return recover_case_one(point, case)


def sign_orbit(solutions: Iterable[Solution]) -> Set[Solution]:
    """Closure under x -> -x and z -> -z"""
    orbit = set()
    for x, y, z in solutions:
        for sx in (1, -1):
            for sz in (1, -1):
                orbit.add((sx * x, y, sz * z))
    return orbit


def solution_set(candidates: Sequence[FermatCandidate]) -> List[Solution]:
    """Sorted sign-closed solutions of every accepted candidate"""
    found = [s for c in candidates if c.accepted for s in c.solutions]
    result = sorted(sign_orbit(found))
    logger.info("%d accepted candidates give %d solutions", sum(c.accepted for c in candidates),
                len(result))
    return result


def ratio_values(candidates: Sequence[FermatCandidate]) -> Set[Fraction]:
    """Rational u/v values met on the Case II curves"""
    return {c.ratio for c in candidates if c.case == "II" and c.ratio is not None}
