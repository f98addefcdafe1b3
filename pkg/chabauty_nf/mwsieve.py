"""
Mordell-Weil sieve, saturation and certification.

Elements of L_0 are written as integer vectors of length n = r + k on the
free generators D_1..D_r followed by the torsion generators T_1..T_k, so
every L_i is a full-rank sublattice of Z^n containing the relations t_j e_j
and W_i is a set of canonical representatives modulo L_i.

The index [J(K) : L_0] is never computed: saturation proves that no prime
q < B divides it and sieve places are required to have B-smooth #J(k_v).
"""

import itertools
import logging
import time
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Set, Tuple

import numpy as np

from .chabauty import ChabautyContext, check_prime_conditions
from .errors import (
    BudgetExhausted, ChabautyError, ExplosionGuard, NoSolution, NoUsablePrime, NotOnJacobian,
    RamifiedOrIndexDivisor, SchemaError, SoundnessViolation,
)
from .finitegeom import ResidueJacobian
from .lattice import (
    as_matrix, coset_representatives, hnf_rows, image_order, is_sublattice, kernel_mod,
    lattice_index, nullspace_mod_p, rank_mod_p, reduce_vector,
)
from .models import (
    AdmissibilityReport, Certificate, ChabautyData, SaturationResult, SieveState,
    SieveStepRecord, SolverConfig, Verdict, WitnessRecord,
)
from .mumford import (
    INFINITY, CurveModel, CurvePoint, MumfordDivisor, abel_jacobi, cantor_add,
    reduce_divisor, reduce_global_point, scalar_mul,
)
from .numberfield import Place, split_prime
from .utils import factorization, is_smooth, odd_primes, parallel_map, primes_below

logger = logging.getLogger(__name__)


@dataclass
class AbstractMW:
    """Generators of L_0, the base point P_0 and the known points with their decompositions"""
    curve: CurveModel
    generators: List[MumfordDivisor]
    torsion: List[Tuple[MumfordDivisor, int]] = field(default_factory=list)
    base_point: CurvePoint = INFINITY
    known_points: List[CurvePoint] = field(default_factory=list)
    decompositions: List[Tuple[int, ...]] = field(default_factory=list)

    @property
    def rank(self) -> int:
        return len(self.generators)

    @property
    def ngens(self) -> int:
        return self.rank + len(self.torsion)

    @property
    def all_generators(self) -> List[MumfordDivisor]:
        return list(self.generators) + [T for T, _ in self.torsion]

    @property
    def orders(self) -> List[int]:
        """0 for free generators, t_j for torsion ones"""
        return [0] * self.rank + [t for _, t in self.torsion]

    def normalize(self, coeffs: Sequence[int]) -> Tuple[int, ...]:
        return tuple(int(c) % t if t else int(c) for c, t in zip(coeffs, self.orders))

    def combination(self, coeffs: Sequence[int]) -> MumfordDivisor:
        result = self.curve.identity()
        for c, D in zip(coeffs, self.all_generators):
            if c:
                result = cantor_add(result, scalar_mul(int(c), D))
        return result

    def aj(self, Q: CurvePoint) -> MumfordDivisor:
        return abel_jacobi(Q, self.base_point, self.curve)

    def verify(self) -> None:
        """Exact checks of torsion orders and of every decomposition"""
        for j, (T, t) in enumerate(self.torsion):
            if t < 1 or not scalar_mul(t, T).is_identity():
                raise NotOnJacobian(f"torsion generator {j} is not killed by {t}")
            for ell in factorization(t):
                if scalar_mul(t // ell, T).is_identity():
                    raise NotOnJacobian(f"torsion generator {j} has order smaller than {t}")
        if self.base_point not in self.known_points:
            raise NotOnJacobian("the base point must be one of the known points")
        if len(self.decompositions) != len(self.known_points):
            raise NotOnJacobian("one decomposition per known point is required")
        for i, (Q, coeffs) in enumerate(zip(self.known_points, self.decompositions)):
            if len(coeffs) != self.ngens:
                raise NotOnJacobian(
                    f"decomposition {i} has {len(coeffs)} entries, expected {self.ngens}")
            if self.combination(coeffs) != self.aj(Q):
                raise NotOnJacobian(f"decomposition {i} does not match [Q - P0] for {Q!r}")
        logger.info("Verified %d decompositions and %d torsion orders",
                    len(self.decompositions), len(self.torsion))


def find_decomposition(mw: AbstractMW, Q: CurvePoint, bound: int = 3) -> Optional[Tuple[int, ...]]:
    """Coefficients c with sum c_i G_i = [Q - P0], free entries in [-bound, bound]

    Meet in the middle: sums over the first half of the generators are tabled,
    the second half is subtracted from the target and looked up.
    """
    target = mw.aj(Q)
    gens = mw.all_generators
    ranges = [range(-bound, bound + 1) if t == 0 else range(t) for t in mw.orders]
    if not gens:
        return () if target.is_identity() else None
    multiples = [{c: scalar_mul(c, G) for c in rng} for G, rng in zip(gens, ranges)]
    split = len(gens) // 2
    table: Dict[MumfordDivisor, Tuple[int, ...]] = {}
    for coeffs in itertools.product(*ranges[:split]):
        total = mw.curve.identity()
        for i, c in enumerate(coeffs):
            total = cantor_add(total, multiples[i][c])
        table.setdefault(total, coeffs)
    for coeffs in itertools.product(*ranges[split:]):
        rest = target
        for i, c in enumerate(coeffs):
            rest = cantor_add(rest, -multiples[split + i][c])
        if rest in table:
            found = tuple(table[rest]) + tuple(coeffs)
            logger.debug("Decomposition of %r: %s", Q, found)
            return found
    return None


@dataclass
class PlaceData:
    """Images of the L_0 generators in J(k_v) and the Abel-Jacobi image of C(k_v)"""
    place: Place
    jacobian: ResidueJacobian
    images: np.ndarray  # m x n, column i holds the coordinates of generator i
    base: CurvePoint

    @property
    def moduli(self) -> List[int]:
        return self.jacobian.moduli

    @property
    def image_set(self) -> Set[Tuple[int, ...]]:
        return self.jacobian.image_coordinates(self.base)

    def phi(self, vector: Sequence[int]) -> Tuple[int, ...]:
        """Coordinates in J(k_v) of the element of L_0 with the given coordinates"""
        values = self.images.dot(np.array([int(x) for x in vector], dtype=object))
        return tuple(int(x) % n for x, n in zip(values, self.moduli))


class MordellWeilSieve:
    """Sieve, saturation and certification for one AbstractMW"""

    def __init__(self, mw: AbstractMW, config: Optional[SolverConfig] = None,
                 context: Optional[ChabautyContext] = None):
        self.mw = mw
        self.config = config or SolverConfig()
        self.context = context or ChabautyContext(
            mw.curve, mw.generators, precision=self.config.precision,
            guard_digits=self.config.hnf_guard_digits,
            max_retries=self.config.max_precision_retries, workers=self.config.workers)
        self._reports: Dict[Place, AdmissibilityReport] = {}
        self._data: Dict[Place, PlaceData] = {}
        self._criteria: Dict[Tuple[int, int], ChabautyData] = {}
        self._failures: Dict[Tuple[int, int], str] = {}
        self._candidates: Optional[List[Place]] = None
        self._saturation_pool: Optional[List[Place]] = None
        self._quotients: Dict[Tuple[Place, int], List[List[int]]] = {}

    @property
    def n(self) -> int:
        return self.mw.ngens

    @property
    def K(self):
        return self.mw.curve.field

    # Places

    def admissible_place(self, v: Place, bound: Optional[int] = None) -> AdmissibilityReport:
        """Good reduction, #k_v within the sieve cap and #J(k_v) B-smooth"""
        bound = bound or self.config.smoothness_bound
        if bound == self.config.smoothness_bound and v in self._reports:
            return self._reports[v]
        report = AdmissibilityReport(place=v, admissible=False, residue_size=v.residue_size)
        if v.p % 2 == 0:
            report.reasons.append("place above 2")
        elif v.residue_size > self.config.sieve_residue_max:
            report.reasons.append(
                f"#k_v = {v.residue_size} exceeds {self.config.sieve_residue_max}")
        else:
            report.good_reduction = self.mw.curve.has_good_reduction(v)
            if not report.good_reduction:
                report.reasons.append("bad reduction")
            else:
                order = self.residue_jacobian(v).order
                report.order = order
                report.factorization = factorization(order)
                report.smooth = is_smooth(order, bound)
                if not report.smooth:
                    report.reasons.append(f"#J(k_v) = {order} is not {bound}-smooth")
        report.admissible = not report.reasons
        if bound == self.config.smoothness_bound:
            self._reports[v] = report
        return report

    def residue_jacobian(self, v: Place) -> ResidueJacobian:
        if v in self._data:
            return self._data[v].jacobian
        key = ('residue-jacobian', v)
        cache = self.mw.curve.cache
        if key not in cache:
            cache[key] = ResidueJacobian(self.mw.curve.reduce_at(v), v,
                                         budget=self.config.structure_budget,
                                         seed=self.config.seed,
                                         bound=self.config.smoothness_bound)
        return cache[key]

    def place_data(self, v: Place) -> PlaceData:
        """Generator images at an admissible place"""
        if v in self._data:
            return self._data[v]
        jac = self.residue_jacobian(v)
        reduced = [reduce_divisor(G, v) for G in self.mw.all_generators]
        moduli = jac.moduli
        coords = jac.coordinates(reduced) if reduced else []
        images = np.zeros((len(moduli), self.n), dtype=object)
        for i, row in enumerate(coords):
            for k, c in enumerate(row):
                images[k, i] = c
        base = reduce_global_point(self.mw.base_point, v)
        data = PlaceData(place=v, jacobian=jac, images=images, base=base)
        self._data[v] = data
        logger.info("Place %s: #J = %d, structure %s", v.label(), jac.order, moduli)
        return data

    def prepare(self, places: Sequence[Place], with_images: bool = True) -> None:
        """Per-place precomputation, in parallel when workers > 1"""
        def compute(v):
            data = self.place_data(v)
            if with_images:
                data.jacobian.image_coordinates(data.base)
            return v

        parallel_map(compute, [v for v in places if v not in self._data], self.config.workers)

    def candidate_places(self) -> List[Place]:
        """Admissible places above odd primes up to prime_pool_max, ordered by #k_v"""
        if self._candidates is not None:
            return self._candidates
        places = []
        for p in odd_primes(3, self.config.prime_pool_max):
            try:
                above = split_prime(p, self.K)
            except RamifiedOrIndexDivisor:
                continue
            for v in above:
                if v.residue_size <= self.config.sieve_residue_max:
                    places.append(v)
        places.sort(key=lambda v: (v.residue_size, v.p, v.index))
        self._candidates = [v for v in places if self.admissible_place(v).admissible]
        logger.info("%d admissible places up to p = %d", len(self._candidates),
                    self.config.prime_pool_max)
        return self._candidates

    def resolve_place(self, p: int, factor: Sequence[int]) -> Place:
        """The place above p whose residue polynomial is factor"""
        try:
            places = split_prime(int(p), self.K)
        except RamifiedOrIndexDivisor as exc:
            raise SchemaError(str(exc), "schedule")
        for v in places:
            if list(v.factor_mod_p) == [int(c) for c in factor]:
                return v
        raise SchemaError(f"no place above {p} with residue polynomial {list(factor)}",
                          "schedule")

    # Sieve

    def initial_state(self) -> SieveState:
        lattice = np.eye(self.n, dtype=int).astype(object) if self.n else as_matrix([], 0)
        return SieveState(index=0, lattice=lattice, cosets=[tuple([0] * self.n)])

    def sieve_step(self, state: SieveState, v: Place) -> SieveState:
        """L_{i+1} = kernel of L_i -> J(k_v); W_{i+1} = sums w + q whose image lies on the curve"""
        start = time.time()
        data = self.place_data(v)
        B = state.lattice
        moduli = data.moduli
        Y = kernel_mod(data.images.dot(B.T), moduli) if self.n else B
        new_lattice = hnf_rows(Y.dot(B)) if self.n else B
        index = lattice_index(hnf_rows(Y)) if self.n else 1
        candidates = len(state.cosets) * index
        if candidates > self.config.explosion_cap:
            raise ExplosionGuard(
                f"{candidates} candidate cosets at {v.label()} exceed {self.config.explosion_cap}")
        representatives = [tuple(int(x) for x in np.array(y, dtype=object).dot(B))
                           for y in coset_representatives(Y)] if self.n else [()]
        image = data.image_set
        phi_w = [data.phi(w) for w in state.cosets]
        phi_q = [data.phi(q) for q in representatives]
        survivors: Set[Tuple[int, ...]] = set()
        for w, a in zip(state.cosets, phi_w):
            for q, b in zip(representatives, phi_q):
                if tuple((x + y) % n for x, y, n in zip(a, b, moduli)) in image:
                    survivors.add(reduce_vector([x + y for x, y in zip(w, q)], new_lattice))
        if self.n and not is_sublattice(new_lattice, B):
            raise SoundnessViolation(f"L_(i+1) is not contained in L_i at {v.label()}")
        order = data.jacobian.order
        record = SieveStepRecord(place=v, order=order, factorization=factorization(order),
                                 index=index, cosets_before=len(state.cosets),
                                 cosets_candidates=candidates, cosets_after=len(survivors),
                                 seconds=time.time() - start)
        logger.debug("Step at %s: index %d, |W| %d -> %d", v.label(), index,
                     len(state.cosets), len(survivors))
        return SieveState(index=state.index + 1, lattice=new_lattice,
                          cosets=sorted(survivors), places=state.places + [v],
                          trace=state.trace + [record])

    def soundness_witness(self, state: SieveState) -> Dict[int, Tuple[int, ...]]:
        """Coset of W_i holding each known point; SoundnessViolation if one is missing"""
        cosets = set(state.cosets)
        witness = {}
        for i, coeffs in enumerate(self.mw.decompositions):
            w = reduce_vector(coeffs, state.lattice) if self.n else ()
            if w not in cosets:
                raise SoundnessViolation(
                    f"known point {i} has no coset after {state.index} steps")
            witness[i] = w
        return witness

    def target_places(self, p: int) -> List[PlaceData]:
        return [self.place_data(v) for v in split_prime(p, self.K)]

    def target_image(self, state: SieveState, target: Sequence[PlaceData]) -> int:
        """Order of the image of L_i in prod J(k_v), v | p"""
        if not target or not self.n:
            return 1
        images = np.vstack([data.images for data in target])
        moduli = [n for data in target for n in data.moduli]
        return image_order(images.dot(state.lattice.T), moduli)

    def progress(self, state: SieveState, target: Sequence[PlaceData]) -> Tuple[int, int]:
        """Surviving cosets of L_i meet K_p, then the image of L_i at p

        K_p is the kernel of L_0 -> prod J(k_v), v | p. A step that splits a
        coset into cosets all holding known points keeps the first entry and
        lowers the second.
        """
        image = self.target_image(state, target)
        return len(state.cosets) * image, image

    def matched(self, w: Sequence[int], target: Sequence[PlaceData]) -> List[int]:
        """Known points Q with [Q - P0] - w in the kernel at every target place"""
        goal = [data.phi(w) for data in target]
        return [i for i, coeffs in enumerate(self.mw.decompositions)
                if [data.phi(coeffs) for data in target] == goal]

    def lattice_in_kernel(self, lattice: np.ndarray, target: Sequence[PlaceData]) -> bool:
        return all(not any(data.phi(row)) for data in target for row in lattice)

    def ready(self, state: SieveState, target: Sequence[PlaceData]) -> bool:
        if not target:
            return False
        return (self.lattice_in_kernel(state.lattice, target)
                and all(self.matched(w, target) for w in state.cosets))

    def run_sieve(self, chabauty_prime: Optional[int] = None,
                  schedule: Optional[Sequence[Place]] = None) -> SieveState:
        """Sieve chain along a pinned schedule, or greedily towards the Chabauty prime"""
        state = self.initial_state()
        if schedule is None and self.config.schedule:
            schedule = [self.resolve_place(p, g) for p, g in self.config.schedule]
        if schedule is not None:
            for v in schedule:
                report = self.admissible_place(v)
                if not report.admissible:
                    raise SchemaError(f"{v.label()} is not admissible: {report.reasons}",
                                      "schedule")
            self.prepare(schedule)
            for v in schedule:
                state = self.sieve_step(state, v)
                self.soundness_witness(state)
            logger.info("Pinned sieve: %d steps, |W| = %d", state.index, len(state.cosets))
            return state

        target: List[PlaceData] = []
        if chabauty_prime:
            reasons = self.prime_conditions(chabauty_prime)
            if reasons:
                logger.warning("Chabauty prime %d unusable for the sieve: %s", chabauty_prime, reasons)
            else:
                target = self.target_places(chabauty_prime)
        pool = self.candidate_places()
        used: Set[Place] = set()
        for _ in range(self.config.max_sieve_steps):
            if not state.cosets or self.ready(state, target):
                break
            current = self.progress(state, target)
            window = [v for v in pool if v not in used][:self.config.sieve_candidates]
            self.prepare(window)
            best = None
            for v in window:
                try:
                    trial = self.sieve_step(state, v)
                except ExplosionGuard as exc:
                    logger.debug("Skipping %s: %s", v.label(), exc)
                    continue
                score = self.progress(trial, target) + (len(trial.cosets), v.residue_size)
                if best is None or score < best[0]:
                    best = (score, v, trial)
            if best is None or best[0][:2] >= current:
                logger.warning("No place in the window reduces the %d surviving cosets", current[0])
                break
            _, v, state = best
            used.add(v)
            self.soundness_witness(state)
            logger.info("Step %d at %s: |W| = %d, survivors %d", state.index, v.label(),
                        len(state.cosets), best[0][0])
        return state

    # Saturation

    def saturation_places(self) -> Iterator[Place]:
        """Good-reduction places above odd primes up to saturation_prime_max, by #k_v

        No smoothness is required; #J(k_v) is computed on demand and cached.
        """
        if self._saturation_pool is None:
            places = []
            for p in odd_primes(3, self.config.saturation_prime_max):
                try:
                    above = split_prime(p, self.K)
                except RamifiedOrIndexDivisor:
                    continue
                places.extend(v for v in above
                              if v.residue_size <= self.config.saturation_residue_max)
            places.sort(key=lambda v: (v.residue_size, v.p, v.index))
            self._saturation_pool = places
        for v in self._saturation_pool:
            if self.mw.curve.has_good_reduction(v):
                yield v

    def quotient_rows(self, v: Place, q: int, basis: Sequence[int]) -> List[List[int]]:
        """Rows of the map L_0 / q L_0 -> J(k_v) / q J(k_v) restricted to basis"""
        key = (v, q)
        if key not in self._quotients:
            jac = self.residue_jacobian(v)
            reduced = [reduce_divisor(G, v) for G in self.mw.all_generators]
            columns = jac.quotient_coordinates(reduced, q)
            width = len(columns[0]) if columns else 0
            self._quotients[key] = [[columns[i][k] for i in range(self.n)] for k in range(width)]
        return [[row[i] for i in basis] for row in self._quotients[key]]

    def saturation_check(self, q: int, places: Optional[Sequence[Place]] = None) -> SaturationResult:
        """Proven when L_0/qL_0 injects into the product of J(k_v)/qJ(k_v)

        The kernel is accumulated place by place as a null space over F_q.
        Without places, the saturation pool is scanned for places with
        q | #J(k_v); with places given only those are used.
        """
        basis = [i for i, t in enumerate(self.mw.orders) if t == 0 or t % q == 0]
        dim = len(basis)
        result = SaturationResult(q=q, verdict=Verdict.PROVEN, dimension=dim,
                                  remaining_dimension=dim)
        if dim == 0:
            return result
        rows: List[List[int]] = []
        kernel = [[int(i == j) for j in range(dim)] for i in range(dim)]
        search = places is None
        pool = self.saturation_places() if search else iter(places)
        tried = 0
        for v in pool:
            if search and tried >= self.config.saturation_place_budget:
                break
            if self.residue_jacobian(v).order % q:
                continue
            tried += 1
            try:
                rows.extend(self.quotient_rows(v, q, basis))
            except (BudgetExhausted, NoSolution) as exc:
                logger.debug("q = %d: skipping %s: %s", q, v.label(), exc)
                continue
            new_kernel = nullspace_mod_p(rows, q, dim)
            if len(new_kernel) < len(kernel):
                result.places.append(v)
                kernel = new_kernel
                logger.debug("q = %d: kernel dimension %d after %s", q, len(kernel), v.label())
            elif not search:
                result.places.append(v)
            if not kernel:
                break
        result.remaining_dimension = len(kernel)
        result.verdict = Verdict.PROVEN if not kernel else Verdict.INCONCLUSIVE
        logger.info("Saturation at q = %d: %s (%d places)", q, result.verdict.value,
                    len(result.places))
        return result

    def saturate(self, bound: Optional[int] = None) -> List[SaturationResult]:
        """saturation_check for every prime q < B"""
        bound = bound or self.config.smoothness_bound
        return [self.saturation_check(q) for q in primes_below(bound)]

    # Certification

    def prime_conditions(self, p: int) -> List[str]:
        """Conditions (p1)-(p3) and smoothness of #J(k_v) for every v | p"""
        reasons = check_prime_conditions(p, self.mw.curve)
        if reasons:
            return reasons
        for v in split_prime(p, self.K):
            report = self.admissible_place(v)
            if not report.admissible:
                reasons.extend(f"{v.label()}: {reason}" for reason in report.reasons)
        return reasons

    def criterion(self, point_index: int, p: int) -> ChabautyData:
        key = (point_index, p)
        if key in self._failures:
            raise ChabautyError(self._failures[key])
        if key not in self._criteria:
            try:
                self._criteria[key] = self.context.criterion(self.mw.known_points[point_index], p)
            except (ChabautyError, ArithmeticError) as exc:
                self._failures[key] = f"criterion at p = {p}: {exc}"
                raise
        return self._criteria[key]

    def choose_chabauty_prime(self) -> Optional[int]:
        """First prime of the pool meeting (a) and (d) at which every known point is UniqueInBall"""
        if self.config.chabauty_prime:
            return self.config.chabauty_prime
        tried = 0
        for p in odd_primes(3, self.config.prime_pool_max):
            if tried >= self.config.sieve_candidates:
                break
            try:
                if self.prime_conditions(p):
                    continue
            except RamifiedOrIndexDivisor:
                continue
            tried += 1
            try:
                if all(self.criterion(i, p).verdict == Verdict.UNIQUE_IN_BALL
                       for i in range(len(self.mw.known_points))):
                    logger.info("Chabauty prime %d", p)
                    return p
            except (ChabautyError, ArithmeticError) as exc:
                logger.debug("p = %d rejected: %s", p, exc)
        return None

    def _prime_pool(self, first: Optional[int]) -> Iterator[int]:
        if first:
            yield first
        tried = 0
        for p in odd_primes(3, self.config.prime_pool_max):
            if p == first:
                continue
            if tried >= self.config.sieve_candidates:
                return
            tried += 1
            yield p

    def certify_coset(self, w: Tuple[int, ...], state: SieveState,
                      first_prime: Optional[int] = None) -> WitnessRecord:
        """A prime p and Q with conditions (a)-(d) for w; NoUsablePrime when the pool runs out"""
        diagnostics: List[str] = []
        for p in self._prime_pool(first_prime):
            try:
                reasons = self.prime_conditions(p)
            except RamifiedOrIndexDivisor as exc:
                reasons = [str(exc)]
            if reasons:
                if p == first_prime:
                    diagnostics.append(f"p = {p}: {'; '.join(reasons)}")
                continue
            target = self.target_places(p)
            if not self.lattice_in_kernel(state.lattice, target):
                if p == first_prime:
                    diagnostics.append(f"p = {p}: L_s does not map to 0")
                continue
            for i in self.matched(w, target):
                try:
                    data = self.criterion(i, p)
                except (ChabautyError, ArithmeticError) as exc:
                    diagnostics.append(str(exc))
                    continue
                if data.verdict != Verdict.UNIQUE_IN_BALL:
                    diagnostics.append(f"p = {p}, point {i}: rank {data.rank} < {data.field_degree}")
                    continue
                return WitnessRecord(coset=w, point_index=i, p=p,
                                     places=list(data.places), h=data.h,
                                     rank=data.rank, verdict=data.verdict.value,
                                     M_mod_p=data.M_mod_p, diagnostics=diagnostics)
        raise NoUsablePrime("; ".join(diagnostics) or f"no usable prime for coset {w}")

    def certify(self, state: SieveState, saturation: Sequence[SaturationResult],
                chabauty_prime: Optional[int] = None) -> Certificate:
        """Match every surviving coset; NotCertified as soon as one is left over"""
        certificate = Certificate(problem_name="", problem_hash="", version="",
                                  config=self.config.to_dict(), saturation=list(saturation),
                                  sieve=state, chabauty_prime=chabauty_prime)
        covered = {s.q for s in saturation if s.verdict == Verdict.PROVEN}
        missing = [q for q in primes_below(self.config.smoothness_bound) if q not in covered]
        if missing:
            certificate.notes.append(f"saturation not proven for q = {missing}")
        records = []
        for w in state.cosets:
            try:
                records.append(self.certify_coset(w, state, chabauty_prime))
            except NoUsablePrime as exc:
                records.append(WitnessRecord(coset=w, point_index=None, p=None,
                                             diagnostics=[str(exc)]))
                certificate.notes.append(f"coset {list(w)} unmatched")
        certificate.records = records
        certified = not missing and all(r.verdict == Verdict.UNIQUE_IN_BALL.value for r in records)
        certificate.verdict = Verdict.CERTIFIED if certified else Verdict.NOT_CERTIFIED
        logger.info("Certification: %s (%d cosets)", certificate.verdict.value, len(records))
        return certificate

    def recheck(self, certificate: Certificate) -> List[str]:
        """Replay of a certificate without integration; the list of failures is empty on success"""
        problems: List[str] = []
        covered = set()
        for result in certificate.saturation:
            if result.verdict != Verdict.PROVEN:
                continue
            replay = self.saturation_check(result.q, result.places)
            if replay.verdict != Verdict.PROVEN:
                problems.append(f"saturation at q = {result.q} does not replay")
            else:
                covered.add(result.q)
        bound = int(certificate.config.get('smoothness_bound', self.config.smoothness_bound))
        missing = [q for q in primes_below(bound) if q not in covered]
        if missing:
            problems.append(f"saturation missing for q = {missing}")

        stored = certificate.sieve
        if stored is None:
            return problems + ["no sieve transcript"]
        try:
            state = self.run_sieve(schedule=stored.places)
        except ChabautyError as exc:
            return problems + [f"sieve replay failed: {exc}"]
        if self.n and [list(r) for r in state.lattice] != [list(r) for r in stored.lattice]:
            problems.append("replayed L_s differs from the stored lattice")
        if set(state.cosets) != set(tuple(w) for w in stored.cosets):
            problems.append("replayed W_s differs from the stored cosets")

        by_coset = {tuple(r.coset): r for r in certificate.records}
        d = self.K.degree
        for w in state.cosets:
            record = by_coset.get(tuple(w))
            if record is None or record.p is None:
                problems.append(f"coset {list(w)} has no witness")
                continue
            p = record.p
            reasons = self.prime_conditions(p)
            if reasons:
                problems.append(f"coset {list(w)}: p = {p} fails {reasons}")
                continue
            target = self.target_places(p)
            if not self.lattice_in_kernel(state.lattice, target):
                problems.append(f"coset {list(w)}: L_s does not vanish at p = {p}")
            if record.point_index not in self.matched(w, target):
                problems.append(f"coset {list(w)}: point {record.point_index} does not match")
            if rank_mod_p(record.M_mod_p, p) != d:
                problems.append(f"coset {list(w)}: stored matrix has rank below {d}")
        return problems


def schedule_places(state: SieveState) -> List[Tuple[int, List[int]]]:
    """Sieve places as (p, residue polynomial) pairs for SolverConfig.schedule"""
    return [(v.p, list(v.factor_mod_p)) for v in state.places]
