"""
Problem and certificate files.

Both are JSON with sorted keys and two-space indentation; exact rationals are
strings "num/den", number field elements are lists of d rationals on the
power basis, polynomials run from the constant term upwards and points are
either "infinity" or an [x, y] pair.
"""

import json
import logging
import os
from dataclasses import dataclass, field, fields, replace
from typing import Any, Dict, Iterable, List, Optional, Tuple

import numpy as np

from . import __version__
from .errors import ChabautyError, SchemaError
from .models import (
    Certificate, SaturationResult, SieveState, SieveStepRecord, SolverConfig, Verdict,
    WitnessRecord,
)
from .mumford import INFINITY, CurveModel, CurvePoint, MumfordDivisor, mumford_make, validate_curve
from .mwsieve import AbstractMW, find_decomposition
from .numberfield import NumberField, Place, make_number_field, split_prime
from .utils import canonical_json, content_hash, parse_rational

logger = logging.getLogger(__name__)

FIXTURE_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'fixtures')
CERTIFICATE_FORMAT = "chabauty-nf-certificate"

PROBLEM_KEYS = {'name', 'description', 'field', 'curve', 'generators', 'torsion',
                'base_point', 'known_points', 'config', 'fermat'}
REQUIRED_KEYS = {'name', 'field', 'curve', 'known_points'}
CONFIG_KEYS = {f.name for f in fields(SolverConfig)} - {'output_format', 'output_file',
                                                         'verbose', 'workers'}
FERMAT_CASES = {'II', 'I.1', 'I.2'}


@dataclass
class Problem:
    """A validated problem file"""
    name: str
    field: NumberField
    curve: CurveModel
    mw: AbstractMW
    description: str = ""
    config: Dict[str, Any] = field(default_factory=dict)
    fermat: Dict[str, Any] = field(default_factory=dict)
    raw: Dict[str, Any] = field(default_factory=dict)
    path: Optional[str] = None

    @property
    def hash(self) -> str:
        return content_hash(self.raw)


# Parsing helpers

def _expect(condition: bool, message: str, location: str) -> None:
    if not condition:
        raise SchemaError(message, location)


def _check_keys(data: Dict, allowed: Iterable[str], required: Iterable[str], location: str) -> None:
    _expect(isinstance(data, dict), "expected an object", location)
    unknown = sorted(set(data) - set(allowed))
    _expect(not unknown, f"unknown keys {unknown}", location)
    missing = sorted(set(required) - set(data))
    _expect(not missing, f"missing keys {missing}", location)


def _element(K: NumberField, data, location: str):
    try:
        return K.parse_element(data)
    except (ValueError, ZeroDivisionError) as exc:
        raise SchemaError(str(exc), location)


def _elements(K: NumberField, data, location: str) -> List:
    _expect(isinstance(data, list), "expected a list of field elements", location)
    return [_element(K, c, f"{location}[{i}]") for i, c in enumerate(data)]


def parse_point(K: NumberField, curve: CurveModel, data, location: str) -> CurvePoint:
    if data == "infinity":
        return INFINITY
    _expect(isinstance(data, list) and len(data) == 2, "expected \"infinity\" or [x, y]", location)
    x = _element(K, data[0], f"{location}.x")
    y = _element(K, data[1], f"{location}.y")
    P = CurvePoint(x, y)
    _expect(curve.is_on_curve(P), "point is not on the curve", location)
    return P


def encode_point(P: CurvePoint):
    if P.is_infinity:
        return "infinity"
    return [P.x.encode(), P.y.encode()]


def parse_divisor(K: NumberField, curve: CurveModel, data, location: str) -> MumfordDivisor:
    """A class from {"u": ..., "v": ...} (u may be non-monic) or {"points": [...]}"""
    _expect(isinstance(data, dict), "expected a divisor object", location)
    try:
        if 'points' in data:
            _check_keys(data, {'points'}, {'points'}, location)
            points = [parse_point(K, curve, P, f"{location}.points[{i}]")
                      for i, P in enumerate(data['points'])]
            return mumford_make(points, curve)
        _check_keys(data, {'u', 'v'}, {'u', 'v'}, location)
        u = _elements(K, data['u'], f"{location}.u")
        v = _elements(K, data['v'], f"{location}.v")
        return mumford_make({'u': u, 'v': v}, curve)
    except SchemaError:
        raise
    except ChabautyError as exc:
        raise SchemaError(str(exc), location)


def _int(data, location: str) -> int:
    _expect(isinstance(data, int) and not isinstance(data, bool), "expected an integer", location)
    return data


def parse_config(data: Dict, location: str = "config") -> Dict[str, Any]:
    _check_keys(data, CONFIG_KEYS, (), location)
    result = dict(data)
    if data.get('schedule') is not None:
        schedule = data['schedule']
        _expect(isinstance(schedule, list), "expected a list of [p, factor] pairs", f"{location}.schedule")
        for i, entry in enumerate(schedule):
            _expect(isinstance(entry, list) and len(entry) == 2 and isinstance(entry[1], list),
                    "expected [p, factor]", f"{location}.schedule[{i}]")
        result['schedule'] = [(int(p), [int(c) for c in g]) for p, g in schedule]
    return result


def problem_from_dict(data: Dict, search_bound: Optional[int] = None) -> Problem:
    """Validated Problem; missing decompositions are searched for"""
    _check_keys(data, PROBLEM_KEYS, REQUIRED_KEYS, "problem")
    name = data['name']
    _expect(isinstance(name, str) and name, "expected a nonempty string", "name")

    field_data = data['field']
    _check_keys(field_data, {'polynomial', 'assume_irreducible'}, {'polynomial'}, "field")
    try:
        K = make_number_field([_int(c, f"field.polynomial[{i}]")
                               for i, c in enumerate(field_data['polynomial'])],
                              assume_irreducible=bool(field_data.get('assume_irreducible', False)))
    except SchemaError:
        raise
    except ChabautyError as exc:
        raise SchemaError(str(exc), "field.polynomial")

    _check_keys(data['curve'], {'f'}, {'f'}, "curve")
    coeffs = _elements(K, data['curve']['f'], "curve.f")
    try:
        curve = validate_curve(coeffs, K)
    except ChabautyError as exc:
        raise SchemaError(str(exc), "curve.f")

    config = parse_config(data.get('config', {}))
    bound = search_bound if search_bound is not None else config.get(
        'decomposition_search_bound', SolverConfig.decomposition_search_bound)

    generators = [parse_divisor(K, curve, D, f"generators[{i}]")
                  for i, D in enumerate(data.get('generators', []))]
    torsion: List[Tuple[MumfordDivisor, int]] = []
    for i, entry in enumerate(data.get('torsion', [])):
        location = f"torsion[{i}]"
        _check_keys(entry, {'divisor', 'order'}, {'divisor', 'order'}, location)
        torsion.append((parse_divisor(K, curve, entry['divisor'], f"{location}.divisor"),
                        _int(entry['order'], f"{location}.order")))

    points: List[CurvePoint] = []
    decompositions: List[Optional[Tuple[int, ...]]] = []
    _expect(isinstance(data['known_points'], list) and data['known_points'],
            "expected a nonempty list", "known_points")
    for i, entry in enumerate(data['known_points']):
        location = f"known_points[{i}]"
        _check_keys(entry, {'point', 'decomposition'}, {'point'}, location)
        points.append(parse_point(K, curve, entry['point'], f"{location}.point"))
        dec = entry.get('decomposition')
        if dec is not None:
            _expect(isinstance(dec, list), "expected a list of integers", f"{location}.decomposition")
            dec = tuple(_int(c, f"{location}.decomposition[{j}]") for j, c in enumerate(dec))
        decompositions.append(dec)
    _expect(len(set(points)) == len(points), "known points must be distinct", "known_points")

    base_index = _int(data.get('base_point', 0), "base_point")
    _expect(0 <= base_index < len(points), "index out of range", "base_point")
    mw = AbstractMW(curve=curve, generators=generators, torsion=torsion,
                    base_point=points[base_index], known_points=points)
    for i, dec in enumerate(decompositions):
        if dec is None:
            dec = find_decomposition(mw, points[i], bound)
            _expect(dec is not None, f"no decomposition with entries in [-{bound}, {bound}]",
                    f"known_points[{i}].decomposition")
            logger.info("Found decomposition %s for known point %d", list(dec), i)
        mw.decompositions.append(mw.normalize(dec))
    try:
        mw.verify()
    except ChabautyError as exc:
        raise SchemaError(str(exc), "known_points")

    fermat = data.get('fermat', {})
    if fermat:
        _check_keys(fermat, {'case', 's'}, {'case'}, "fermat")
        _expect(fermat['case'] in FERMAT_CASES, f"case must be one of {sorted(FERMAT_CASES)}",
                "fermat.case")
        if fermat['case'] == 'II':
            _expect(isinstance(fermat.get('s'), int) and -2 <= fermat['s'] <= 2,
                    "s must be an integer in [-2, 2]", "fermat.s")

    problem = Problem(name=name, field=K, curve=curve, mw=mw,
                      description=data.get('description', ""), config=config,
                      fermat=dict(fermat), raw=data)
    logger.info("Loaded %s: r = %d, %d torsion generators, %d known points",
                name, mw.rank, len(torsion), len(points))
    return problem


def load_problem(path: str, search_bound: Optional[int] = None) -> Problem:
    """Read and validate a problem file"""
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except json.JSONDecodeError as exc:
        raise SchemaError(exc.msg, f"{path}:{exc.lineno}:{exc.colno}")
    problem = problem_from_dict(data, search_bound)
    problem.path = path
    return problem


def fixture_path(name: str) -> str:
    return os.path.join(FIXTURE_DIR, f"{name}.json")


def list_fixtures() -> List[str]:
    return sorted(os.path.splitext(name)[0] for name in os.listdir(FIXTURE_DIR)
                  if name.endswith('.json'))


def load_fixture(name: str) -> Problem:
    return load_problem(fixture_path(name))


def merge_config(base: SolverConfig, problem: Problem, explicit: Iterable[str] = ()) -> SolverConfig:
    """Problem values override defaults; explicitly given options override both"""
    explicit = set(explicit)
    overrides = {k: v for k, v in problem.config.items() if k not in explicit}
    return replace(base, **overrides)


# Certificates

def _encode_place(v: Place) -> Dict[str, Any]:
    return v.encode()


def _decode_place(K: NumberField, data, location: str) -> Place:
    _check_keys(data, {'p', 'factor'}, {'p', 'factor'}, location)
    for v in split_prime(int(data['p']), K):
        if list(v.factor_mod_p) == [int(c) for c in data['factor']]:
            return v
    raise SchemaError(f"no place above {data['p']} with residue polynomial {data['factor']}",
                      location)


def certificate_to_dict(cert: Certificate) -> Dict[str, Any]:
    sieve = cert.sieve
    sieve_data = None
    if sieve is not None:
        sieve_data = {
            'lattice': [[str(int(x)) for x in row] for row in sieve.lattice],
            'cosets': [[str(x) for x in w] for w in sieve.cosets],
            'places': [_encode_place(v) for v in sieve.places],
            'trace': [{
                'place': _encode_place(step.place),
                'order': step.order,
                'index': str(step.index),
                'cosets_before': step.cosets_before,
                'cosets_candidates': step.cosets_candidates,
                'cosets_after': step.cosets_after,
            } for step in sieve.trace],
        }
    return {
        'format': CERTIFICATE_FORMAT,
        'version': cert.version,
        'problem': {'name': cert.problem_name, 'hash': cert.problem_hash},
        'config': cert.config,
        'saturation': [{
            'q': s.q,
            'verdict': s.verdict.value,
            'dimension': s.dimension,
            'remaining_dimension': s.remaining_dimension,
            'places': [_encode_place(v) for v in s.places],
        } for s in cert.saturation],
        'sieve': sieve_data,
        'chabauty_prime': cert.chabauty_prime,
        'records': [{
            'coset': [str(x) for x in r.coset],
            'point_index': r.point_index,
            'p': r.p,
            'places': [_encode_place(v) for v in r.places],
            'h': r.h,
            'rank': r.rank,
            'verdict': r.verdict,
            'M_mod_p': r.M_mod_p,
            'diagnostics': r.diagnostics,
        } for r in cert.records],
        'verdict': cert.verdict.value,
        'notes': cert.notes,
    }


def emit_certificate(cert: Certificate, path: Optional[str] = None) -> str:
    """Canonical certificate text, written to path when given"""
    text = canonical_json(certificate_to_dict(cert))
    if path:
        with open(path, 'w', encoding='utf-8') as f:
            f.write(text)
        logger.info("Certificate written to %s", path)
    return text


def _int_text(value, location: str) -> int:
    try:
        result = parse_rational(value)
    except ValueError as exc:
        raise SchemaError(str(exc), location)
    _expect(result.denominator == 1, "expected an integer", location)
    return int(result)


def certificate_from_dict(data: Dict, K: NumberField) -> Certificate:
    """Certificate object whose places are resolved in K"""
    _check_keys(data, {'format', 'version', 'problem', 'config', 'saturation', 'sieve',
                       'chabauty_prime', 'records', 'verdict', 'notes'},
                {'format', 'problem', 'saturation', 'sieve', 'records', 'verdict'}, "certificate")
    _expect(data['format'] == CERTIFICATE_FORMAT, "not a certificate", "certificate.format")
    try:
        verdict = Verdict(data['verdict'])
    except ValueError:
        raise SchemaError(f"unknown verdict {data['verdict']!r}", "certificate.verdict")
    saturation = []
    for i, s in enumerate(data['saturation']):
        location = f"saturation[{i}]"
        saturation.append(SaturationResult(
            q=_int(s['q'], f"{location}.q"), verdict=Verdict(s['verdict']),
            dimension=s.get('dimension', 0),
            places=[_decode_place(K, v, f"{location}.places[{j}]")
                    for j, v in enumerate(s.get('places', []))],
            remaining_dimension=s.get('remaining_dimension', 0)))
    sieve = None
    if data['sieve'] is not None:
        s = data['sieve']
        lattice = [[_int_text(x, "sieve.lattice") for x in row] for row in s['lattice']]
        width = len(lattice[0]) if lattice else 0
        places = [_decode_place(K, v, f"sieve.places[{j}]") for j, v in enumerate(s['places'])]
        trace = [SieveStepRecord(place=_decode_place(K, t['place'], f"sieve.trace[{j}].place"),
                                 order=t['order'], factorization={},
                                 index=_int_text(t['index'], f"sieve.trace[{j}].index"),
                                 cosets_before=t['cosets_before'],
                                 cosets_candidates=t['cosets_candidates'],
                                 cosets_after=t['cosets_after'])
                 for j, t in enumerate(s.get('trace', []))]
        sieve = SieveState(index=len(places),
                           lattice=np.array(lattice, dtype=object).reshape(len(lattice), width),
                           cosets=[tuple(_int_text(x, "sieve.cosets") for x in w)
                                   for w in s['cosets']],
                           places=places, trace=trace)
    records = []
    for i, r in enumerate(data['records']):
        location = f"records[{i}]"
        records.append(WitnessRecord(
            coset=tuple(_int_text(x, f"{location}.coset") for x in r['coset']),
            point_index=r.get('point_index'), p=r.get('p'),
            places=[_decode_place(K, v, f"{location}.places[{j}]")
                    for j, v in enumerate(r.get('places', []))],
            h=r.get('h'), rank=r.get('rank'), verdict=r.get('verdict', Verdict.NOT_CERTIFIED.value),
            M_mod_p=r.get('M_mod_p', []), diagnostics=r.get('diagnostics', [])))
    return Certificate(problem_name=data['problem'].get('name', ""),
                       problem_hash=data['problem'].get('hash', ""),
                       version=data.get('version', ""), config=data.get('config', {}),
                       saturation=saturation, sieve=sieve,
                       chabauty_prime=data.get('chabauty_prime'), records=records,
                       verdict=verdict, notes=data.get('notes', []))


def load_certificate(path: str, K: NumberField) -> Certificate:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except json.JSONDecodeError as exc:
        raise SchemaError(exc.msg, f"{path}:{exc.lineno}:{exc.colno}")
    return certificate_from_dict(data, K)


def stamp_certificate(cert: Certificate, problem: Problem) -> Certificate:
    cert.problem_name = problem.name
    cert.problem_hash = problem.hash
    cert.version = __version__
    return cert
