"""
The single-unit-ball criterion at a prime p.

T stacks the coordinates of the periods tau_j(omega_k) place by place and
differential by differential; A is block diagonal with the multiplication by
alpha_0(omega_k) at Q. After a Hermite reduction U (p^a T) over Z_p the last
h rows of U A form M_p(Q); Q is alone in its p-unit ball when M_p(Q) has full
rank d modulo p.
"""

import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .coleman import DIFFERENTIALS, alpha, period_column
from .errors import (
    PrecisionAmbiguous, PrecisionExhausted, RamifiedOrIndexDivisor, RankDefect,
)
from .finitegeom import jacobian_order
from .lattice import rank_mod_p
from .localfield import LocalElement, ZpMatrix, hnf_zp
from .models import ChabautyData, Verdict
from .mumford import GENUS, CurveModel, CurvePoint, MumfordDivisor
from .numberfield import Place, split_prime
from .utils import parallel_map

logger = logging.getLogger(__name__)


def check_prime_conditions(p: int, curve: CurveModel) -> List[str]:
    """Reasons p fails to be odd, unramified, and of good reduction at every place above it"""
    reasons = []
    if p % 2 == 0:
        return ["p is even"]
    try:
        places = split_prime(p, curve.field)
    except RamifiedOrIndexDivisor as exc:
        return [str(exc)]
    for v in places:
        if not curve.has_good_reduction(v):
            reasons.append(f"bad reduction at {v.label()}")
    return reasons


def multiplication_matrix(x: LocalElement) -> List[List[int]]:
    """Matrix of y -> x*y on the theta_v basis (columns are images)"""
    R = x.ring
    d = R.degree
    columns = [(x * R.basis_element(j)).coordinates() for j in range(d)]
    return [[columns[j][i] for j in range(d)] for i in range(d)]


class ChabautyContext:
    """Criterion evaluations for one curve and basis, with T cached per prime"""

    def __init__(self, curve: CurveModel, basis: Sequence[MumfordDivisor], precision: int = 30,
                 pivot_order: str = "lowest-row", guard_digits: int = 1,
                 max_retries: int = 2, workers: int = 1,
                 place_order: Optional[Dict[int, Sequence[int]]] = None):
        self.curve = curve
        self.basis = list(basis)
        self.precision = precision
        self.pivot_order = pivot_order
        self.guard_digits = guard_digits
        self.max_retries = max_retries
        self.workers = workers
        self.place_order = place_order or {}
        self._T: Dict[Tuple[int, int], Tuple[ZpMatrix, int]] = {}
        self._orders: Dict[Place, int] = {}

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def degree(self) -> int:
        return self.curve.field.degree

    def places(self, p: int) -> List[Place]:
        """Places above p in stacking order"""
        places = list(split_prime(p, self.curve.field))
        order = self.place_order.get(p)
        if order is not None:
            places = [places[i] for i in order]
        return places

    def group_order(self, v: Place) -> int:
        if v not in self._orders:
            self._orders[v] = jacobian_order(self.curve.reduce_at(v))
        return self._orders[v]

    def build_T(self, p: int, precision: Optional[int] = None) -> Tuple[ZpMatrix, int]:
        """p^a T as an integral matrix over Z_p together with a"""
        N = precision or self.precision
        key = (p, N)
        if key in self._T:
            return self._T[key]
        places = self.places(p)
        for v in places:
            self.group_order(v)
        tasks = [(j, v) for j in range(self.rank) for v in places]

        def compute(task):
            j, v = task
            return period_column(self.basis[j], v, N, self._orders[v]).values

        results = dict(zip(tasks, parallel_map(compute, tasks, self.workers)))
        column_values: List[List[LocalElement]] = []
        for j in range(self.rank):
            column = []
            for v in places:
                column.extend(results[(j, v)])
            column_values.append(column)
        shifts = [value.shift for column in column_values for value in column
                  if not value.is_zero()]
        a = max(0, -min(shifts)) if shifts else 0
        gd = GENUS * self.degree
        entries = np.zeros((gd, self.rank), dtype=object)
        known = N
        modulus = p ** N
        for j, column in enumerate(column_values):
            row = 0
            for v_index, v in enumerate(places):
                for k_index, _ in enumerate(DIFFERENTIALS):
                    value = column[GENUS * v_index + k_index] * (p ** a)
                    known = min(known, value.precision)
                    for coordinate in value.coordinates():
                        entries[row, j] = coordinate % modulus
                        row += 1
        T = ZpMatrix(p, N, entries, known)
        logger.info("Built T at p = %d: %dx%d, a = %d, %d trusted digits",
                    p, gd, self.rank, a, known)
        self._T[key] = (T, a)
        return T, a

    def build_A(self, Q: CurvePoint, p: int, precision: Optional[int] = None) -> np.ndarray:
        """Block-diagonal gd x d matrix of multiplication by alpha_0 at Q"""
        N = precision or self.precision
        places = self.places(p)
        d = self.degree
        A = np.zeros((GENUS * d, d), dtype=object)
        row, col = 0, 0
        modulus = p ** N
        for v in places:
            dv = v.residue_degree
            for k in DIFFERENTIALS:
                block = multiplication_matrix(alpha(Q, self.curve, v, k, N))
                for i in range(dv):
                    for j in range(dv):
                        A[row + i, col + j] = block[i][j] % modulus
                row += dv
            col += dv
        return A

    def _criterion_once(self, Q: CurvePoint, p: int, N: int) -> ChabautyData:
        places = self.places(p)
        d = self.degree
        gd = GENUS * d
        r = self.rank
        A = self.build_A(Q, p, N)
        modulus = p ** N
        data = ChabautyData(p=p, places=places, rank_basis=r, field_degree=d,
                            A=[[int(x) for x in row] for row in A], precision=N,
                            pivot_order=self.pivot_order)
        if r == 0:
            M = A
            data.h = gd
            data.U = [[int(i == j) for j in range(gd)] for i in range(gd)]
            data.trusted_digits = N
        else:
            T, a = self.build_T(p, N)
            result = hnf_zp(T, self.pivot_order, self.guard_digits)
            expected = max(gd - r, 0)
            if result.h != expected:
                raise RankDefect(
                    f"Hermite form of p^a T has {result.h} zero rows, expected {expected}")
            trusted = T.known_precision - result.max_pivot_valuation
            if trusted < 1:
                raise PrecisionAmbiguous(f"only {trusted} trusted digits in U")
            UA = result.U.entries.dot(A) % modulus
            M = UA[gd - result.h:]
            data.T = T.to_lists()
            data.a = a
            data.U = result.U.to_lists()
            data.H = result.H.to_lists()
            data.h = result.h
            data.trusted_digits = trusted
        data.M = [[int(x) for x in row] for row in M]
        data.M_mod_p = [[int(x) % p for x in row] for row in M]
        data.rank = rank_mod_p(data.M_mod_p, p)
        data.verdict = Verdict.UNIQUE_IN_BALL if data.rank == d else Verdict.INCONCLUSIVE
        return data

    def criterion(self, Q: CurvePoint, p: int) -> ChabautyData:
        """UniqueInBall when M_p(Q) mod p has rank d; precision doubles on ambiguity"""
        N = self.precision
        last_error: Optional[Exception] = None
        for attempt in range(self.max_retries + 1):
            try:
                data = self._criterion_once(Q, p, N)
                logger.info("Criterion at p = %d for %r: h = %d, rank %d, %s",
                            p, Q, data.h, data.rank, data.verdict.value)
                return data
            except PrecisionExhausted as exc:
                last_error = exc
                logger.warning("Precision %d insufficient at p = %d (%s); retrying", N, p, exc)
                N *= 2
        raise PrecisionAmbiguous(f"criterion at p = {p} still ambiguous: {last_error}")
