import json
from datetime import datetime
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd

from .models import (
    Certificate, ChabautyData, FermatCandidate, JacobianStats, SaturationResult, SieveState,
)
from .mumford import CurvePoint
from .problem_io import certificate_to_dict, encode_point
from .utils import canonical_json, format_factorization, format_rational


def _point_text(P: CurvePoint) -> str:
    if P.is_infinity:
        return "oo"
    return f"({P.x!r}, {P.y!r})"


def _matrix_lines(matrix: Sequence[Sequence[int]], indent: str = "   ") -> List[str]:
    if not matrix:
        return [f"{indent}(empty)"]
    width = max(len(str(x)) for row in matrix for x in row) if matrix[0] else 1
    return [indent + "[" + " ".join(str(x).rjust(width) for x in row) + "]" for row in matrix]


class DataExporter:
    """Tables and JSON documents for every subcommand"""

    def jacstats_frame(self, stats: List[JacobianStats]) -> pd.DataFrame:
        if not stats:
            return pd.DataFrame()
        return pd.DataFrame([{
            'place': s.place,
            'residue_size': s.residue_size,
            'n1': s.n1,
            'n2': s.n2,
            'order': s.order,
            'factorization': s.factorization,
            'invariant_factors': " x ".join(str(n) for n in s.invariant_factors),
            'smooth': s.smooth,
        } for s in stats])

    def sieve_frame(self, state: SieveState) -> pd.DataFrame:
        if not state.trace:
            return pd.DataFrame()
        return pd.DataFrame([{
            'step': i + 1,
            'place': step.place.label(),
            'residue_size': step.place.residue_size,
            'order': step.order,
            'factorization': format_factorization(step.factorization),
            'index': step.index,
            'cosets_before': step.cosets_before,
            'cosets_candidates': step.cosets_candidates,
            'cosets_after': step.cosets_after,
            'seconds': round(step.seconds, 3),
        } for i, step in enumerate(state.trace)])

    def saturation_frame(self, results: List[SaturationResult]) -> pd.DataFrame:
        return pd.DataFrame([{
            'q': s.q,
            'verdict': s.verdict.value,
            'dimension': s.dimension,
            'remaining_dimension': s.remaining_dimension,
            'places': len(s.places),
        } for s in results])

    def records_frame(self, cert: Certificate) -> pd.DataFrame:
        return pd.DataFrame([{
            'coset': " ".join(str(x) for x in r.coset),
            'point_index': r.point_index,
            'p': r.p,
            'h': r.h,
            'rank': r.rank,
            'verdict': r.verdict,
        } for r in cert.records])

    def fermat_frame(self, candidates: List[FermatCandidate]) -> pd.DataFrame:
        return pd.DataFrame([{
            'case': c.case,
            's': c.s,
            'point': _point_text(c.point),
            'ratio': format_rational(c.ratio) if c.ratio is not None else c.ratio_kind,
            'accepted': c.accepted,
            'solutions': "; ".join(str(s) for s in c.solutions),
            'reason': c.reason,
        } for c in candidates])

    def export_to_csv(self, frame: pd.DataFrame, output_file: str) -> None:
        frame.to_csv(output_file, index=False)

    def export_to_json(self, data: Dict[str, Any], output_file: str) -> None:
        with open(output_file, 'w', encoding='utf-8') as jsonfile:
            jsonfile.write(canonical_json(data))

    # JSON documents

    def criterion_to_dict(self, data: ChabautyData, point: Optional[CurvePoint] = None) -> Dict[str, Any]:
        return {
            'p': data.p,
            'point': encode_point(point) if point is not None else None,
            'places': [v.encode() for v in data.places],
            'precision': data.precision,
            'trusted_digits': data.trusted_digits,
            'a': data.a,
            'h': data.h,
            'rank': data.rank,
            'M_mod_p': data.M_mod_p,
            'verdict': data.verdict.value,
        }

    def sieve_to_dict(self, state: SieveState) -> Dict[str, Any]:
        return {
            'steps': state.index,
            'lattice': [[str(int(x)) for x in row] for row in state.lattice],
            'cosets': [[str(x) for x in w] for w in state.cosets],
            'places': [v.encode() for v in state.places],
            'trace': json.loads(self.sieve_frame(state).to_json(orient='records')),
        }

    def saturation_to_dict(self, results: List[SaturationResult]) -> Dict[str, Any]:
        return {'results': [{
            'q': s.q, 'verdict': s.verdict.value, 'dimension': s.dimension,
            'remaining_dimension': s.remaining_dimension,
            'places': [v.encode() for v in s.places],
        } for s in results]}

    def jacstats_to_dict(self, stats: List[JacobianStats]) -> Dict[str, Any]:
        return {'places': json.loads(self.jacstats_frame(stats).to_json(orient='records'))}

    def fermat_to_dict(self, candidates: List[FermatCandidate], solutions) -> Dict[str, Any]:
        return {
            'candidates': json.loads(self.fermat_frame(candidates).to_json(orient='records')),
            'solutions': [list(s) for s in solutions],
        }

    def certificate_to_dict(self, cert: Certificate) -> Dict[str, Any]:
        return certificate_to_dict(cert)


class ReportGenerator:
    """Human readable reports"""

    def __init__(self):
        self.exporter = DataExporter()

    def _header(self, title: str) -> List[str]:
        return ["=" * 60, title, "=" * 60,
                f"Generated: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}", ""]

    def generate_criterion_report(self, data: ChabautyData, point: Optional[CurvePoint] = None) -> str:
        lines = self._header("UNIT BALL CRITERION")
        if point is not None:
            lines.append(f"Point: {_point_text(point)}")
        lines.append(f"Prime: {data.p} ({len(data.places)} places: "
                     f"{', '.join(v.label() for v in data.places)})")
        lines.append(f"Precision: {data.precision} digits, {data.trusted_digits} trusted, a = {data.a}")
        lines.append(f"h = {data.h}, rank of M mod p = {data.rank} (d = {data.field_degree})")
        lines.append("M mod p:")
        lines.extend(_matrix_lines(data.M_mod_p))
        lines.append("")
        lines.append(f"Verdict: {data.verdict.value}")
        lines.append("=" * 60)
        return "\n".join(lines)

    def generate_sieve_report(self, state: SieveState) -> str:
        lines = self._header("MORDELL-WEIL SIEVE")
        lines.append(f"Steps: {state.index}")
        lines.append(f"|W_s| = {len(state.cosets)}")
        lines.append("")
        lines.append("L_s")
        lines.append("-" * 20)
        lines.extend(_matrix_lines([[int(x) for x in row] for row in state.lattice]))
        lines.append("")
        lines.append("W_s")
        lines.append("-" * 20)
        for w in state.cosets:
            lines.append(f"   {list(w)}")
        frame = self.exporter.sieve_frame(state)
        if not frame.empty:
            lines.append("")
            lines.append("TRACE")
            lines.append("-" * 20)
            lines.append(frame.to_string(index=False))
        lines.append("")
        lines.append("=" * 60)
        return "\n".join(lines)

    def generate_saturation_report(self, results: List[SaturationResult]) -> str:
        lines = self._header("SATURATION")
        proven = [s.q for s in results if s.verdict.value == "Proven"]
        lines.append(f"Primes proven coprime to the index: {len(proven)}/{len(results)}")
        lines.append("")
        if results:
            lines.append(self.exporter.saturation_frame(results).to_string(index=False))
        lines.append("")
        lines.append("=" * 60)
        return "\n".join(lines)

    def generate_jacstats_report(self, stats: List[JacobianStats]) -> str:
        lines = self._header("JACOBIANS OVER RESIDUE FIELDS")
        frame = self.exporter.jacstats_frame(stats)
        lines.append(frame.to_string(index=False) if not frame.empty else "No places")
        lines.append("")
        lines.append("=" * 60)
        return "\n".join(lines)

    def generate_certificate_report(self, cert: Certificate) -> str:
        lines = self._header("CERTIFICATE")
        lines.append(f"Problem: {cert.problem_name} ({cert.problem_hash[:12]})")
        lines.append(f"Chabauty prime: {cert.chabauty_prime}")
        proven = sum(1 for s in cert.saturation if s.verdict.value == "Proven")
        lines.append(f"Saturation: {proven}/{len(cert.saturation)} primes proven")
        if cert.sieve is not None:
            lines.append(f"Sieve: {cert.sieve.index} places, |W_s| = {len(cert.sieve.cosets)}")
        lines.append("")
        if cert.records:
            lines.append("WITNESSES")
            lines.append("-" * 20)
            lines.append(self.exporter.records_frame(cert).to_string(index=False))
            lines.append("")
        if cert.notes:
            lines.append("NOTES")
            lines.append("-" * 20)
            lines.extend(f"   • {note}" for note in cert.notes)
            lines.append("")
        lines.append(f"Verdict: {cert.verdict.value}")
        lines.append("=" * 60)
        return "\n".join(lines)

    def generate_fermat_report(self, candidates: List[FermatCandidate], solutions) -> str:
        lines = self._header("x^2 + y^3 = z^10")
        lines.append("CANDIDATES")
        lines.append("-" * 20)
        frame = self.exporter.fermat_frame(candidates)
        if not frame.empty:
            lines.append(frame.to_string(index=False))
        lines.append("")
        lines.append("SOLUTIONS")
        lines.append("-" * 20)
        for x, y, z in solutions:
            lines.append(f"   ({x}, {y}, {z})")
        lines.append("")
        lines.append("=" * 60)
        return "\n".join(lines)
