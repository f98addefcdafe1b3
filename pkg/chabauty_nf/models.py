from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple


class Verdict(str, Enum):
    """Outcomes reported by the criterion, saturation and certification steps"""
    UNIQUE_IN_BALL = "UniqueInBall"
    INCONCLUSIVE = "Inconclusive"
    PROVEN = "Proven"
    CERTIFIED = "Certified"
    NOT_CERTIFIED = "NotCertified"


@dataclass
class SolverConfig:
    """Configuration for a certification run"""
    precision: int = 30
    smoothness_bound: int = 75
    residue_cap: int = 2 ** 20  # enumeration cap on #k_v
    sieve_residue_max: int = 1000  # cap on #k_v for sieve and certification places
    prime_pool_max: int = 1000
    explosion_cap: int = 100000
    max_sieve_steps: int = 60
    sieve_candidates: int = 40
    saturation_place_budget: int = 200
    saturation_prime_max: int = 5000
    saturation_residue_max: int = 5000  # saturation places only need q | #J(k_v)
    structure_budget: int = 200
    seed: int = 0
    workers: int = 1
    max_precision_retries: int = 2
    hnf_guard_digits: int = 1
    decomposition_search_bound: int = 3
    assume_irreducible: bool = False
    chabauty_prime: Optional[int] = None
    schedule: Optional[List[Tuple[int, List[int]]]] = None
    output_format: str = "text"  # text, json
    output_file: Optional[str] = None
    verbose: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {
            'precision': self.precision,
            'smoothness_bound': self.smoothness_bound,
            'residue_cap': self.residue_cap,
            'sieve_residue_max': self.sieve_residue_max,
            'prime_pool_max': self.prime_pool_max,
            'explosion_cap': self.explosion_cap,
            'max_sieve_steps': self.max_sieve_steps,
            'sieve_candidates': self.sieve_candidates,
            'saturation_place_budget': self.saturation_place_budget,
            'saturation_prime_max': self.saturation_prime_max,
            'saturation_residue_max': self.saturation_residue_max,
            'structure_budget': self.structure_budget,
            'seed': self.seed,
            'max_precision_retries': self.max_precision_retries,
            'hnf_guard_digits': self.hnf_guard_digits,
            'decomposition_search_bound': self.decomposition_search_bound,
            'chabauty_prime': self.chabauty_prime,
            'schedule': [[p, list(g)] for p, g in self.schedule] if self.schedule else None,
        }


@dataclass
class FiniteGroupInfo:
    """Structure of J(k_v): invariant factors n_1 | n_2 | ... with generators"""
    order: int
    invariant_factors: List[int] = field(default_factory=list)
    generators: List[Any] = field(default_factory=list)  # MumfordDivisor over k_v
    factorization: Dict[int, int] = field(default_factory=dict)
    smoothness_bound_ok: bool = True
    seed: int = 0

    @property
    def exponent(self) -> int:
        return self.invariant_factors[-1] if self.invariant_factors else 1


@dataclass
class ChabautyData:
    """Matrices of one (Q, p) criterion evaluation"""
    p: int
    places: List[Any]  # Place
    rank_basis: int
    field_degree: int
    T: List[List[int]] = field(default_factory=list)
    A: List[List[int]] = field(default_factory=list)
    a: int = 0
    U: List[List[int]] = field(default_factory=list)
    H: List[List[int]] = field(default_factory=list)
    h: int = 0
    M: List[List[int]] = field(default_factory=list)
    M_mod_p: List[List[int]] = field(default_factory=list)
    rank: int = 0
    precision: int = 30
    trusted_digits: int = 0
    verdict: Verdict = Verdict.INCONCLUSIVE
    pivot_order: str = "lowest-row"


@dataclass
class AdmissibilityReport:
    """Whether a place can be used by the sieve"""
    place: Any
    admissible: bool
    good_reduction: bool = False
    residue_size: int = 0
    order: Optional[int] = None
    factorization: Dict[int, int] = field(default_factory=dict)
    smooth: bool = False
    reasons: List[str] = field(default_factory=list)


@dataclass
class SaturationResult:
    """Outcome of a q-saturation check"""
    q: int
    verdict: Verdict
    dimension: int
    places: List[Any] = field(default_factory=list)
    remaining_dimension: int = 0


@dataclass
class SieveStepRecord:
    """One step of the sieve chain"""
    place: Any
    order: int
    factorization: Dict[int, int]
    index: int
    cosets_before: int
    cosets_candidates: int
    cosets_after: int
    seconds: float = 0.0


@dataclass
class SieveState:
    """L_i as an HNF basis in L_0 coordinates and the surviving coset set W_i"""
    index: int
    lattice: Any  # numpy object array, rows are a basis
    cosets: List[Tuple[int, ...]] = field(default_factory=list)
    places: List[Any] = field(default_factory=list)
    trace: List[SieveStepRecord] = field(default_factory=list)


@dataclass
class WitnessRecord:
    """Certification of one surviving coset w"""
    coset: Tuple[int, ...]
    point_index: Optional[int]
    p: Optional[int]
    places: List[Any] = field(default_factory=list)
    h: Optional[int] = None
    rank: Optional[int] = None
    verdict: str = Verdict.NOT_CERTIFIED.value
    M_mod_p: List[List[int]] = field(default_factory=list)
    diagnostics: List[str] = field(default_factory=list)


@dataclass
class Certificate:
    """Transcript of a full certification"""
    problem_name: str
    problem_hash: str
    version: str
    config: Dict[str, Any]
    saturation: List[SaturationResult] = field(default_factory=list)
    sieve: Optional[SieveState] = None
    chabauty_prime: Optional[int] = None
    records: List[WitnessRecord] = field(default_factory=list)
    verdict: Verdict = Verdict.NOT_CERTIFIED
    notes: List[str] = field(default_factory=list)


@dataclass
class FermatCandidate:
    """A point of a descent curve pushed back to x^2 + y^3 = z^10"""
    case: str
    s: Optional[int]
    point: Any
    ratio: Optional[Fraction] = None  # u/v, None for the v = 0 branch or rejections
    ratio_kind: str = "rational"  # rational, infinite, non-rational, none
    u: Optional[int] = None
    v: Optional[int] = None
    solutions: List[Tuple[int, int, int]] = field(default_factory=list)
    accepted: bool = False
    reason: str = ""


@dataclass
class JacobianStats:
    """Per-place Jacobian data for the jacstats report"""
    place: str
    residue_size: int
    n1: int
    n2: int
    order: int
    factorization: str
    invariant_factors: List[int] = field(default_factory=list)
    smooth: bool = True
