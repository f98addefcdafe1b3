"""
Curves and Jacobians over finite residue fields.

Point counts by enumeration of x, the Jacobian order from the counts over
F_q and F_{q^2}, the abelian group structure of J(F_q) by random sampling
and Sylow-by-Sylow extension, discrete logarithms by Pohlig-Hellman with a
digit-wise search in each elementary layer, and the Abel-Jacobi image of
C(F_q) used for sieve membership.
"""

import itertools
import logging
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np

from .errors import BudgetExhausted, NoSolution, NotSmooth
from .finitefield import FiniteField, quadratic_extension
from .lattice import diagonal, invariant_factors, normal_form
from .models import FiniteGroupInfo
from .mumford import (
    INFINITY, CurveModel, CurvePoint, MumfordDivisor, cantor_add, point_divisor, scalar_mul,
)
from .utils import crt_pair, factorization, is_smooth, lcm_list

logger = logging.getLogger(__name__)

CHUNK_ROWS = 1 << 18


# Point counts and Jacobian order

def count_points(curve: CurveModel, k: int = 1) -> int:
    """Projective points of y^2 = f(x) over F_{q^k} for k in {1, 2}"""
    F: FiniteField = curve.field
    q = F.order
    xs = F.all_elements_array()
    if k == 1:
        chi = F.vchi(F.veval(curve.f, xs))
        return 1 + q + int(chi.sum())
    if k != 2:
        raise ValueError(f"Extension degree must be 1 or 2, got {k}")
    E = quadratic_extension(F)
    total = 0
    step = max(1, CHUNK_ROWS // q)
    for start in range(0, q, step):
        block = xs[start:start + step]
        A = np.repeat(block, q, axis=0)
        B = np.tile(xs, (block.shape[0], 1))
        value = E.veval(curve.f, (A, B))
        total += int(F.vchi(E.vnorm(value)).sum())
    return 1 + q * q + total


def frobenius_sums(curve: CurveModel) -> Tuple[int, int]:
    """Power sums s_1, s_2 of the Frobenius eigenvalues"""
    q = curve.field.order
    n1 = count_points(curve, 1)
    n2 = count_points(curve, 2)
    return q + 1 - n1, q * q + 1 - n2


def jacobian_order(curve: CurveModel) -> int:
    """#J(F_q) = L(1) with L(T) = 1 - s1 T + e2 T^2 - q s1 T^3 + q^2 T^4"""
    q = curve.field.order
    s1, s2 = frobenius_sums(curve)
    e2 = (s1 * s1 - s2) // 2
    order = 1 - s1 + e2 - q * s1 + q * q
    if order <= 0:
        raise ValueError(f"Non-positive Jacobian order {order} over F_{q}")
    return order


def brute_force_class_count(curve: CurveModel) -> int:
    """#J(F_q) by enumerating reduced Mumford pairs (tiny fields only)"""
    F = curve.field
    ring = curve.ring
    elements = list(F.elements())
    count = 1
    for a in elements:
        count += 1 + curve.evaluate(a).chi()
    for u0, u1 in itertools.product(elements, repeat=2):
        u = [u0, u1, F.one]
        target = ring.mod(list(curve.f), u)
        for v0, v1 in itertools.product(elements, repeat=2):
            if ring.equal(ring.mod(ring.square([v0, v1]), u), target):
                count += 1
    return count


def rational_points(curve: CurveModel) -> List[CurvePoint]:
    """C(F_q) with infinity first, then affine points by encoding of x"""
    F = curve.field
    xs = F.all_elements_array()
    chi = F.vchi(F.veval(curve.f, xs))
    points = [INFINITY]
    for n in np.nonzero(chi >= 0)[0]:
        x = F.decode(int(n))
        y = curve.evaluate(x).sqrt()
        points.append(CurvePoint(x, y))
        if not y.is_zero():
            points.append(CurvePoint(x, -y))
    return points


def random_class(curve: CurveModel, rng: np.random.Generator) -> MumfordDivisor:
    """Sum of two classes [P - oo] or [Q + Q^sigma - 2 oo] with random x"""
    return cantor_add(_random_piece(curve, rng), _random_piece(curve, rng))


def _random_piece(curve: CurveModel, rng: np.random.Generator) -> MumfordDivisor:
    F = curve.field
    E = quadratic_extension(F)
    while True:
        a, b = F.random_element(rng), F.random_element(rng)
        if b.is_zero():
            value = curve.evaluate(a)
            if not value.is_square():
                continue
            y = value.sqrt()
            if rng.integers(0, 2):
                y = -y
            return point_divisor(CurvePoint(a, y), curve)
        xi = E.make(a, b)
        value = E.zero
        for c in reversed(curve.f):
            value = value * xi + c
        if not value.is_square():
            continue
        eta = value.sqrt()
        if rng.integers(0, 2):
            eta = -eta
        c, d = eta.a, eta.b
        slope = d / b
        u = (a * a - E.delta * b * b, -(a + a), F.one)
        v = curve.ring.strip([c - a * slope, slope])
        return MumfordDivisor(curve, u, v)


def element_order(D: MumfordDivisor, group_order: int) -> int:
    """Order of D given a multiple of it"""
    order = group_order
    for prime, e in factorization(group_order).items():
        for _ in range(e):
            if scalar_mul(order // prime, D).is_identity():
                order //= prime
            else:
                break
    return order


# Discrete logarithms in l-groups

def _combinations(elems: Sequence[MumfordDivisor], ell: int, identity: MumfordDivisor):
    """All sums sum c_i e_i with 0 <= c_i < ell, with their coefficients"""
    combos = [(identity, ())]
    for e in elems:
        extended = []
        for D, coeffs in combos:
            current = D
            for c in range(ell):
                extended.append((current, coeffs + (c,)))
                current = cantor_add(current, e)
        combos = extended
    return combos


def elementary_dlog(target: MumfordDivisor, elems: Sequence[MumfordDivisor],
                    ell: int) -> Optional[List[int]]:
    """Digits c_i in [0, ell) with sum c_i e_i = target, meet in the middle"""
    identity = target.curve.identity()
    half = len(elems) // 2
    table: Dict[Tuple, Tuple[int, ...]] = {}
    for D, coeffs in _combinations(elems[:half], ell, identity):
        table.setdefault(D.key(), coeffs)
    for D, coeffs in _combinations(elems[half:], ell, identity):
        found = table.get(cantor_add(target, -D).key())
        if found is not None:
            return list(found + coeffs)
    return None


def pgroup_dlog(target: MumfordDivisor, gens: Sequence[MumfordDivisor],
                exponents: Sequence[int], ell: int) -> Optional[List[int]]:
    """Coordinates of target on a basis of an ell-group (orders ell^a_i)

    Returns None when target is outside the span.
    """
    if not gens:
        return [] if target.is_identity() else None
    top = max(exponents)
    y = [0] * len(gens)
    residual = target
    lowered = [scalar_mul(ell ** (a - 1), g) for g, a in zip(gens, exponents)]
    for s in range(top):
        active = [i for i, a in enumerate(exponents) if a >= top - s]
        layer = scalar_mul(ell ** (top - 1 - s), residual)
        digits = elementary_dlog(layer, [lowered[i] for i in active], ell)
        if digits is None:
            return None
        for i, c in zip(active, digits):
            if c:
                shift = ell ** (exponents[i] - top + s)
                y[i] += c * shift
                residual = cantor_add(residual, -scalar_mul(c * shift, gens[i]))
    if not residual.is_identity():
        return None
    return y


def sylow_basis(curve: CurveModel, ell: int, exponent: int, cofactor: int,
                rng: np.random.Generator, budget: int) -> Tuple[List[MumfordDivisor], List[int]]:
    """Basis of the ell-Sylow subgroup of order ell^exponent with element orders ell^a_i"""
    gens: List[MumfordDivisor] = []
    exps: List[int] = []
    modulus = ell ** exponent
    samples = 0
    while sum(exps) < exponent:
        if samples >= budget:
            raise BudgetExhausted(
                f"{ell}-part not generated after {budget} samples "
                f"(have {ell}^{sum(exps)} of {ell}^{exponent})")
        samples += 1
        g = scalar_mul(cofactor, random_class(curve, rng))
        h, k = g, 0
        relation = pgroup_dlog(h, gens, exps, ell)
        while relation is None:
            h = scalar_mul(ell, h)
            k += 1
            relation = pgroup_dlog(h, gens, exps, ell)
        if k == 0:
            continue
        n = len(gens)
        R = np.zeros((n + 1, n + 1), dtype=object)
        for i, a in enumerate(exps):
            R[i, i] = ell ** a
        for i, x in enumerate(relation):
            R[n, i] = -x
        R[n, n] = ell ** k
        _, D, T = normal_form(R)
        extended = gens + [g]
        new_gens, new_exps = [], []
        for j, d in enumerate(diagonal(D)):
            d = abs(d)
            if d == 1:
                continue
            combo = curve.identity()
            for i, coefficient in enumerate(T[j]):
                coefficient = int(coefficient) % modulus
                if coefficient:
                    combo = cantor_add(combo, scalar_mul(coefficient, extended[i]))
            new_gens.append(combo)
            new_exps.append(factorization(d)[ell])
        gens, exps = new_gens, new_exps
        logger.debug("%d-part grown to exponents %s after %d samples", ell, exps, samples)
    return gens, exps


def group_structure(curve: CurveModel, budget: int = 200, seed: int = 0,
                    bound: int = 75, order: Optional[int] = None) -> FiniteGroupInfo:
    """Invariant factors n_1 | n_2 | ... of J(F_q) with a matching basis"""
    if order is None:
        order = jacobian_order(curve)
    factors = factorization(order)
    if not is_smooth(order, bound):
        raise NotSmooth(f"#J = {order} has a prime factor >= {bound}")
    rng = np.random.default_rng(seed)
    per_prime: Dict[int, List[Tuple[int, MumfordDivisor]]] = {}
    for ell, e in factors.items():
        gens, exps = sylow_basis(curve, ell, e, order // ell ** e, rng, budget)
        per_prime[ell] = sorted(zip(exps, gens), key=lambda pair: -pair[0])
    rank = max((len(v) for v in per_prime.values()), default=0)
    generators = []
    for j in range(rank):
        g_j = curve.identity()
        for pairs in per_prime.values():
            if j < len(pairs):
                g_j = cantor_add(g_j, pairs[j][1])
        generators.append(g_j)
    generators.reverse()
    invariants = invariant_factors([ell ** a for ell, pairs in per_prime.items() for a, _ in pairs])
    logger.info("J(F_%d) has order %d and invariant factors %s",
                curve.field.order, order, invariants)
    return FiniteGroupInfo(order=order, invariant_factors=invariants, generators=generators,
                           factorization=factors, smoothness_bound_ok=True, seed=seed)


def dlog_solve(targets: Iterable[MumfordDivisor], gens: Sequence[MumfordDivisor],
               orders: Sequence[int], bound: Optional[int] = None) -> List[List[int]]:
    """Coordinates of each target on a basis gens with the given orders"""
    gens = list(gens)
    exponent = lcm_list(orders)
    primes = factorization(exponent) if exponent > 1 else {}
    if bound is not None and any(ell >= bound for ell in primes):
        raise NotSmooth(f"group exponent {exponent} has a prime factor >= {bound}")
    layers = []
    for ell, e in primes.items():
        cofactor = exponent // ell ** e
        idx = [j for j, n in enumerate(orders) if n % ell == 0]
        exps = [factorization(orders[j])[ell] for j in idx]
        lifted = [scalar_mul(cofactor, gens[j]) for j in idx]
        layers.append((ell, cofactor, idx, exps, lifted))
    rows = []
    for target in targets:
        residues: List[List[int]] = [[] for _ in gens]
        moduli: List[List[int]] = [[] for _ in gens]
        for ell, cofactor, idx, exps, lifted in layers:
            y = pgroup_dlog(scalar_mul(cofactor, target), lifted, exps, ell)
            if y is None:
                raise NoSolution(f"target outside the span of the generators ({ell}-part)")
            for j, a, value in zip(idx, exps, y):
                residues[j].append(value)
                moduli[j].append(ell ** a)
        coords = [crt_pair(r, m)[0] if m else 0 for r, m in zip(residues, moduli)]
        combo = target.curve.identity()
        for c, g in zip(coords, gens):
            if c:
                combo = cantor_add(combo, scalar_mul(c, g))
        if combo != target:
            raise NoSolution("target outside the span of the generators")
        rows.append(coords)
    return rows


# Abel-Jacobi image

def aj_image_set(curve: CurveModel, base: CurvePoint = INFINITY) -> Set[Tuple]:
    """Canonical keys of [P - base] for P in C(F_q)"""
    shift = point_divisor(base.involution(), curve)
    return {cantor_add(point_divisor(P, curve), shift).key() for P in rational_points(curve)}


class ResidueJacobian:
    """J(k_v) of one good-reduction place with its structure and image coordinates"""

    def __init__(self, curve: CurveModel, place=None, budget: int = 200, seed: int = 0,
                 bound: int = 75):
        self.curve = curve
        self.place = place
        self.budget = budget
        self.seed = seed
        self.bound = bound
        self._order: Optional[int] = None
        self._info: Optional[FiniteGroupInfo] = None
        self._image: Dict[Tuple, Set[Tuple[int, ...]]] = {}
        self._sylow: Dict[int, Tuple[List[MumfordDivisor], List[int]]] = {}

    @property
    def residue_size(self) -> int:
        return self.curve.field.order

    @property
    def order(self) -> int:
        if self._order is None:
            self._order = jacobian_order(self.curve)
        return self._order

    @property
    def info(self) -> FiniteGroupInfo:
        if self._info is None:
            self._info = group_structure(self.curve, self.budget, self.seed, self.bound, self.order)
        return self._info

    @property
    def moduli(self) -> List[int]:
        return list(self.info.invariant_factors)

    def coordinates(self, classes: Iterable[MumfordDivisor]) -> List[List[int]]:
        """Coordinates on the structure basis, reduced modulo the invariant factors"""
        info = self.info
        rows = dlog_solve(classes, info.generators, info.invariant_factors, self.bound)
        return [[c % n for c, n in zip(row, info.invariant_factors)] for row in rows]

    def quotient_coordinates(self, classes: Iterable[MumfordDivisor], ell: int) -> List[List[int]]:
        """Coordinates in J(F_q) / ell J(F_q), read off an ell-Sylow basis; the cofactor acts invertibly"""
        e = factorization(self.order).get(ell, 0)
        classes = list(classes)
        if e == 0:
            return [[] for _ in classes]
        cofactor = self.order // ell ** e
        if ell not in self._sylow:
            rng = np.random.default_rng([self.seed, ell])
            self._sylow[ell] = sylow_basis(self.curve, ell, e, cofactor, rng, self.budget)
        gens, exps = self._sylow[ell]
        rows = []
        for D in classes:
            y = pgroup_dlog(scalar_mul(cofactor, D), gens, exps, ell)
            if y is None:
                raise NoSolution(f"class outside the {ell}-Sylow basis")
            rows.append([c % ell for c in y])
        return rows

    def image_coordinates(self, base: CurvePoint = INFINITY) -> Set[Tuple[int, ...]]:
        """Coordinates of [P - base] for P in C(F_q); one logarithm per x value"""
        key = (base.x.encode(), base.y.encode()) if not base.is_infinity else None
        if key in self._image:
            return self._image[key]
        moduli = self.moduli
        points = [P for P in rational_points(self.curve) if not P.is_infinity]
        seen: Dict[int, Tuple[CurvePoint, List[int]]] = {}
        for P in points:
            if P.x.encode() not in seen:
                seen[P.x.encode()] = (P, self.coordinates([point_divisor(P, self.curve)])[0])
        base_coords = [0] * len(moduli)
        if not base.is_infinity:
            base_coords = self.coordinates([point_divisor(base, self.curve)])[0]
        image = {tuple((-b) % n for b, n in zip(base_coords, moduli))}
        for P in points:
            Q, coords = seen[P.x.encode()]
            sign = 1 if P.y == Q.y else -1
            image.add(tuple((sign * c - b) % n for c, b, n in zip(coords, base_coords, moduli)))
        self._image[key] = image
        return image
