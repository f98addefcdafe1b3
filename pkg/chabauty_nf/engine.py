import logging
from dataclasses import replace
from typing import Dict, List, Optional, Sequence, Tuple

from .chabauty import ChabautyContext
from .errors import NotSmooth, RamifiedOrIndexDivisor
from .exporters import DataExporter, ReportGenerator
from .fermat import fermat_recover, ratio_values, solution_set
from .finitegeom import count_points
from .models import (
    Certificate, ChabautyData, FermatCandidate, JacobianStats, SaturationResult, SieveState,
    SolverConfig, Verdict,
)
from .mwsieve import MordellWeilSieve, schedule_places
from .numberfield import split_prime
from .problem_io import Problem, emit_certificate, list_fixtures, load_fixture, merge_config, stamp_certificate
from .utils import canonical_json, factorization, format_factorization, is_smooth

logger = logging.getLogger(__name__)

REPLAY_KEYS = ('smoothness_bound', 'sieve_residue_max')


class ChabautyEngine:
    """Orchestrates saturation, sieving and certification for one problem at a time"""

    def __init__(self, config: SolverConfig, explicit: Sequence[str] = ()):
        self.config = config
        self.explicit = set(explicit)
        self.exporter = DataExporter()
        self.report_generator = ReportGenerator()
        self._sieves: Dict[str, MordellWeilSieve] = {}

    def validate_config(self) -> bool:
        """Validate solver configuration"""
        ok = True
        if self.config.smoothness_bound < 3:
            print("❌ Error: smoothness bound must be at least 3")
            ok = False
        if self.config.precision < 2:
            print("❌ Error: precision must be at least 2 digits")
            ok = False
        for name in ('residue_cap', 'sieve_residue_max', 'prime_pool_max', 'explosion_cap',
                     'max_sieve_steps', 'sieve_candidates', 'saturation_place_budget',
                     'saturation_prime_max', 'saturation_residue_max', 'structure_budget', 'workers'):
            if getattr(self.config, name) <= 0:
                print(f"❌ Error: {name} must be greater than 0")
                ok = False
        if self.config.sieve_residue_max > self.config.residue_cap:
            print("❌ Error: sieve_residue_max cannot exceed residue_cap")
            ok = False
        if self.config.output_format not in ('text', 'json'):
            print(f"❌ Error: unknown output format {self.config.output_format}")
            ok = False
        return ok

    def config_for(self, problem: Problem) -> SolverConfig:
        return merge_config(self.config, problem, self.explicit)

    def sieve_for(self, problem: Problem) -> MordellWeilSieve:
        if problem.hash not in self._sieves:
            config = self.config_for(problem)
            self._sieves[problem.hash] = MordellWeilSieve(problem.mw, config)
        return self._sieves[problem.hash]

    def _say(self, message: str) -> None:
        if self.config.output_format != "json":
            print(message)

    # Subcommands

    def run_criterion(self, problem: Problem, point_index: int, p: int) -> ChabautyData:
        """Single unit-ball check for one known point"""
        point = problem.mw.known_points[point_index]
        self._say(f"🚀 Criterion for {problem.name} at p = {p}, point {point_index}")
        config = self.config_for(problem)
        context = ChabautyContext(problem.curve, problem.mw.generators,
                                  precision=config.precision,
                                  guard_digits=config.hnf_guard_digits,
                                  max_retries=config.max_precision_retries,
                                  workers=config.workers)
        data = context.criterion(point, p)
        self._say(f"📊 h = {data.h}, rank {data.rank} of {data.field_degree}: {data.verdict.value}")
        return data

    def run_saturation(self, problem: Problem) -> List[SaturationResult]:
        sieve = self.sieve_for(problem)
        bound = sieve.config.smoothness_bound
        self._say(f"🚀 Saturation of L_0 for {problem.name} at every prime below {bound}")
        results = sieve.saturate(bound)
        proven = sum(1 for s in results if s.verdict == Verdict.PROVEN)
        self._say(f"📊 {proven}/{len(results)} primes proven coprime to the index")
        return results

    def run_sieve(self, problem: Problem, p: Optional[int] = None) -> Tuple[SieveState, bool]:
        """Greedy sieve; the flag is set when W_s is empty or ready for certification at p"""
        sieve = self.sieve_for(problem)
        if p is None:
            p = sieve.choose_chabauty_prime()
        self._say(f"🚀 Sieving {problem.name} towards p = {p}")
        state = sieve.run_sieve(chabauty_prime=p)
        resolved = not state.cosets
        if not resolved and p and not sieve.prime_conditions(p):
            resolved = sieve.ready(state, sieve.target_places(p))
        icon = "✅" if resolved else "⚠️ "
        self._say(f"{icon} {state.index} places used, |W_s| = {len(state.cosets)}")
        return state, resolved

    def run_verify(self, problem: Problem, output_file: Optional[str] = None) -> Certificate:
        """Saturation, sieve and certification"""
        sieve = self.sieve_for(problem)
        self._say(f"🚀 Certifying the rational points of {problem.name}")
        self._say(f"📊 r = {problem.mw.rank}, torsion generators {len(problem.mw.torsion)}, "
                  f"known points {len(problem.mw.known_points)}")
        saturation = self.run_saturation(problem)
        p = sieve.choose_chabauty_prime()
        if p is None:
            self._say("⚠️  No Chabauty prime found in the pool")
        else:
            self._say(f"🔍 Chabauty prime p = {p}")
        state = sieve.run_sieve(chabauty_prime=p)
        self._say(f"🔬 Sieve finished after {state.index} places with |W_s| = {len(state.cosets)}")
        certificate = stamp_certificate(sieve.certify(state, saturation, p), problem)
        certificate.config['schedule'] = [[q, g] for q, g in schedule_places(state)]
        if output_file:
            emit_certificate(certificate, output_file)
            self._say(f"📄 Certificate written to: {output_file}")
        icon = "✅" if certificate.verdict == Verdict.CERTIFIED else "❌"
        self._say(f"{icon} {problem.name}: {certificate.verdict.value}")
        return certificate

    def recheck_sieve(self, problem: Problem, certificate: Certificate) -> MordellWeilSieve:
        """Sieve object using the admissibility settings stored in the certificate"""
        config = self.config_for(problem)
        stored = {key: int(certificate.config[key]) for key in REPLAY_KEYS
                  if certificate.config.get(key) is not None}
        if all(getattr(config, key) == value for key, value in stored.items()):
            return self.sieve_for(problem)
        return MordellWeilSieve(problem.mw, replace(config, **stored))

    def run_recheck(self, problem: Problem, certificate: Certificate) -> List[str]:
        """Replay a certificate; the returned list holds the failures"""
        self._say(f"🚀 Replaying certificate for {problem.name}")
        problems: List[str] = []
        if certificate.problem_hash and certificate.problem_hash != problem.hash:
            problems.append("certificate was issued for a different problem file")
        problems.extend(self.recheck_sieve(problem, certificate).recheck(certificate))
        if certificate.verdict != Verdict.CERTIFIED:
            problems.append(f"stored verdict is {certificate.verdict.value}")
        for issue in problems:
            self._say(f"❌ {issue}")
        return problems

    def run_jacstats(self, problem: Problem, primes: Sequence[int]) -> List[JacobianStats]:
        """#C, #J and structure of J(k_v) at every place above the given primes"""
        sieve = self.sieve_for(problem)
        bound = sieve.config.smoothness_bound
        stats = []
        for p in primes:
            try:
                places = split_prime(p, problem.field)
            except RamifiedOrIndexDivisor as exc:
                self._say(f"⚠️  p = {p}: {exc}")
                continue
            for v in places:
                if not problem.curve.has_good_reduction(v):
                    self._say(f"⚠️  {v.label()}: bad reduction")
                    continue
                curve = problem.curve.reduce_at(v)
                jac = sieve.residue_jacobian(v)
                order = jac.order
                smooth = is_smooth(order, bound)
                invariants: List[int] = []
                if smooth:
                    try:
                        invariants = jac.moduli
                    except NotSmooth:
                        smooth = False
                stats.append(JacobianStats(
                    place=v.label(), residue_size=v.residue_size,
                    n1=count_points(curve, 1), n2=count_points(curve, 2), order=order,
                    factorization=format_factorization(factorization(order)), invariant_factors=invariants, smooth=smooth))
        self._say(f"📊 {len(stats)} places analysed")
        return stats

    def run_fermat(self, names: Optional[Sequence[str]] = None,
                   verify: bool = True) -> Tuple[List[FermatCandidate], List[Tuple[int, int, int]], bool]:
        """Back-substitute the points of every descent fixture; certified unless verify is off"""
        names = list(names or list_fixtures())
        candidates: List[FermatCandidate] = []
        all_certified = True
        for name in names:
            problem = load_fixture(name)
            if not problem.fermat:
                continue
            if verify:
                certificate = self.run_verify(problem)
                if certificate.verdict != Verdict.CERTIFIED:
                    all_certified = False
            case, s = problem.fermat['case'], problem.fermat.get('s')
            for point in problem.mw.known_points:
                candidates.append(fermat_recover(point, case, s, problem.field))
        solutions = solution_set(candidates)
        ratios = sorted(ratio_values(candidates))
        self._say(f"📊 {len(candidates)} candidates, u/v values {[str(r) for r in ratios]}")
        return candidates, solutions, all_certified

    def export_results(self, frame, data, report: str, output_file: Optional[str] = None) -> None:
        """Print in the configured format; write CSV or JSON when an output file is given"""
        if self.config.output_format == 'json':
            print(canonical_json(data), end="")
        else:
            print("\n" + report)
        if output_file:
            if output_file.endswith('.json') or frame is None or frame.empty:
                self.exporter.export_to_json(data, output_file)
            else:
                self.exporter.export_to_csv(frame, output_file)
            self._say(f"📄 Results exported to: {output_file}")
