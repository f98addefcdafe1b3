#!/usr/bin/env python3
"""
chabauty-nf - Command Line Interface
"""

import argparse
import logging
import os
import signal
import sys
from typing import List, Optional, Set, Tuple

from . import __version__
from .engine import ChabautyEngine
from .errors import PrecisionExhausted
from .models import SolverConfig, Verdict
from .problem_io import fixture_path, load_certificate, load_problem

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NOT_CERTIFIED = 2
EXIT_PRECISION = 3
EXIT_INTERRUPTED = 130

# argparse destination -> SolverConfig field
CONFIG_FLAGS = {
    'precision': 'precision',
    'bound': 'smoothness_bound',
    'seed': 'seed',
    'workers': 'workers',
    'prime': 'chabauty_prime',
    'prime_pool_max': 'prime_pool_max',
    'sieve_residue_max': 'sieve_residue_max',
    'explosion_cap': 'explosion_cap',
    'max_sieve_steps': 'max_sieve_steps',
    'sieve_candidates': 'sieve_candidates',
    'saturation_prime_max': 'saturation_prime_max',
}


def signal_handler(signum, frame):
    """Handle interrupt signals gracefully"""
    print("\n🛑 Computation interrupted by user")
    sys.exit(EXIT_INTERRUPTED)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--format', choices=['text', 'json'], default='text',
                        help='Output format (default: text)')
    parser.add_argument('--precision', type=int,
                        help='p-adic working precision in digits (default: 30)')
    parser.add_argument('--bound', type=int,
                        help='Smoothness bound B for saturation and sieve places (default: 75)')
    parser.add_argument('--seed', type=int, help='Seed for random group elements (default: 0)')
    parser.add_argument('--workers', type=int, help='Worker threads for per-place work (default: 1)')
    parser.add_argument('--prime-pool-max', type=int,
                        help='Largest prime scanned for places (default: 1000)')
    parser.add_argument('--sieve-residue-max', type=int,
                        help='Largest residue field used by the sieve (default: 1000)')
    parser.add_argument('--explosion-cap', type=int,
                        help='Cap on candidate cosets per sieve step (default: 100000)')
    parser.add_argument('--max-sieve-steps', type=int, help='Maximum sieve steps (default: 60)')
    parser.add_argument('--sieve-candidates', type=int,
                        help='Places tried per greedy sieve step (default: 40)')
    parser.add_argument('--saturation-prime-max', type=int,
                        help='Largest prime scanned for saturation places (default: 5000)')
    parser.add_argument('--output', '-o', help='Output file (CSV for tables, JSON otherwise)')
    parser.add_argument('--verbose', '-v', action='store_true', help='Verbose output')


def create_parser() -> argparse.ArgumentParser:
    """Create and configure argument parser"""
    parser = argparse.ArgumentParser(
        description="Explicit Chabauty and Mordell-Weil sieve for genus 2 curves over number fields",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  %(prog)s verify c1 --output c1.cert.json
  %(prog)s criterion c1 --point 0 --prime 109
  %(prog)s jacstats c1 --primes 109
  %(prog)s saturate c1 --bound 75
  %(prog)s recheck c1 c1.cert.json --workers 4 --seed 7
  %(prog)s fermat2310 --format json
        """
    )
    parser.add_argument('--version', action='version', version=f'chabauty-nf {__version__}')
    commands = parser.add_subparsers(dest='command', required=True)

    verify = commands.add_parser('verify', help='Certify C(K) = known points')
    verify.add_argument('problem', help='Problem file or bundled fixture name')
    verify.add_argument('--prime', type=int, help='Chabauty prime (default: searched)')
    _add_common(verify)

    criterion = commands.add_parser('criterion', help='Unit-ball criterion at one point and prime')
    criterion.add_argument('problem', help='Problem file or bundled fixture name')
    criterion.add_argument('--point', type=int, default=0, help='Index of the known point (default: 0)')
    criterion.add_argument('--prime', type=int, required=True, help='The prime p')
    _add_common(criterion)

    sieve = commands.add_parser('sieve', help='Run the Mordell-Weil sieve')
    sieve.add_argument('problem', help='Problem file or bundled fixture name')
    sieve.add_argument('--prime', type=int, help='Chabauty prime the sieve aims at')
    _add_common(sieve)

    saturate = commands.add_parser('saturate', help='Prove q does not divide the index for q < B')
    saturate.add_argument('problem', help='Problem file or bundled fixture name')
    _add_common(saturate)

    jacstats = commands.add_parser('jacstats', help='#J(k_v) and its structure')
    jacstats.add_argument('problem', help='Problem file or bundled fixture name')
    jacstats.add_argument('--primes', type=int, nargs='+', required=True, help='Rational primes')
    _add_common(jacstats)

    recheck = commands.add_parser('recheck', help='Replay a certificate')
    recheck.add_argument('problem', help='Problem file or bundled fixture name')
    recheck.add_argument('certificate', help='Certificate file')
    _add_common(recheck)

    fermat = commands.add_parser('fermat2310', help='Solve x^2 + y^3 = z^10 from the fixtures')
    fermat.add_argument('--skip-verify', action='store_true',
                        help='Back-substitute the known points without certifying them')
    _add_common(fermat)
    return parser


def resolve_problem_path(name: str) -> str:
    """A path as given, or the bundled fixture of that name"""
    if os.path.exists(name):
        return name
    candidate = fixture_path(name)
    if os.path.exists(candidate):
        return candidate
    raise ValueError(f"No problem file or fixture named {name!r}")


def create_config_from_args(args) -> Tuple[SolverConfig, Set[str]]:
    """SolverConfig from command line arguments, with the names given explicitly"""
    values = {}
    for dest, name in CONFIG_FLAGS.items():
        value = getattr(args, dest, None)
        if value is not None:
            values[name] = value
    config = SolverConfig(output_format=args.format, output_file=args.output,
                          verbose=args.verbose, **values)
    return config, set(values)


def print_header():
    """Print tool header"""
    print(f"""
🔍 chabauty-nf v{__version__}
========================
Rational points of genus 2 curves over number fields
""")


def print_config_summary(config: SolverConfig, command: str):
    """Print configuration summary"""
    print(f"""
🔧 Configuration:
   • Command: {command}
   • Precision: {config.precision} digits
   • Smoothness bound: {config.smoothness_bound}
   • Prime pool: p <= {config.prime_pool_max}, #k_v <= {config.sieve_residue_max}
   • Seed: {config.seed}
   • Workers: {config.workers}
   • Output format: {config.output_format}
""")


def run_command(args, engine: ChabautyEngine) -> int:
    config = engine.config
    command = args.command
    if command == 'fermat2310':
        candidates, solutions, certified = engine.run_fermat(verify=not args.skip_verify)
        report = engine.report_generator.generate_fermat_report(candidates, solutions)
        data = engine.exporter.fermat_to_dict(candidates, solutions)
        engine.export_results(engine.exporter.fermat_frame(candidates), data, report, config.output_file)
        return EXIT_OK if certified else EXIT_NOT_CERTIFIED

    problem = load_problem(resolve_problem_path(args.problem))
    if command == 'verify':
        cert = engine.run_verify(problem)
        report = engine.report_generator.generate_certificate_report(cert)
        data = engine.exporter.certificate_to_dict(cert)
        engine.export_results(None, data, report, config.output_file)
        return EXIT_OK if cert.verdict == Verdict.CERTIFIED else EXIT_NOT_CERTIFIED

    if command == 'criterion':
        result = engine.run_criterion(problem, args.point, args.prime)
        point = problem.mw.known_points[args.point]
        report = engine.report_generator.generate_criterion_report(result, point)
        data = engine.exporter.criterion_to_dict(result, point)
        engine.export_results(None, data, report, config.output_file)
        return EXIT_OK if result.verdict == Verdict.UNIQUE_IN_BALL else EXIT_NOT_CERTIFIED

    if command == 'sieve':
        state, resolved = engine.run_sieve(problem, args.prime)
        report = engine.report_generator.generate_sieve_report(state)
        data = engine.exporter.sieve_to_dict(state)
        engine.export_results(engine.exporter.sieve_frame(state), data, report, config.output_file)
        return EXIT_OK if resolved else EXIT_NOT_CERTIFIED

    if command == 'saturate':
        results = engine.run_saturation(problem)
        report = engine.report_generator.generate_saturation_report(results)
        data = engine.exporter.saturation_to_dict(results)
        engine.export_results(engine.exporter.saturation_frame(results), data, report,
                              config.output_file)
        proven = all(s.verdict == Verdict.PROVEN for s in results)
        return EXIT_OK if proven else EXIT_NOT_CERTIFIED

    if command == 'jacstats':
        stats = engine.run_jacstats(problem, args.primes)
        report = engine.report_generator.generate_jacstats_report(stats)
        data = engine.exporter.jacstats_to_dict(stats)
        engine.export_results(engine.exporter.jacstats_frame(stats), data, report, config.output_file)
        complete = bool(stats) and all(s.smooth for s in stats)
        return EXIT_OK if complete else EXIT_NOT_CERTIFIED

    if command == 'recheck':
        cert = load_certificate(args.certificate, problem.field)
        failures = engine.run_recheck(problem, cert)
        data = {'certificate': args.certificate, 'failures': failures,
                'verdict': Verdict.CERTIFIED.value if not failures else Verdict.NOT_CERTIFIED.value}
        report = "\n".join(["=" * 60, "CERTIFICATE REPLAY", "=" * 60]
                           + [f"   • {issue}" for issue in failures]
                           + [f"Verdict: {data['verdict']}", "=" * 60])
        engine.export_results(None, data, report, config.output_file)
        return EXIT_OK if not failures else EXIT_NOT_CERTIFIED

    raise ValueError(f"Unknown command {command}")


def main(argv: Optional[List[str]] = None) -> int:
    """Main CLI entry point"""
    signal.signal(signal.SIGINT, signal_handler)
    signal.signal(signal.SIGTERM, signal_handler)

    parser = create_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format='%(asctime)s %(name)s %(levelname)s %(message)s')

    try:
        config, explicit = create_config_from_args(args)
        if config.output_format == 'text' and not args.verbose:
            print_header()
            print_config_summary(config, args.command)

        engine = ChabautyEngine(config, explicit)
        if not engine.validate_config():
            return EXIT_INVALID

        code = run_command(args, engine)
        if code == EXIT_OK and config.output_format == 'text':
            print("\n✅ Completed successfully!")
        return code

    except PrecisionExhausted as e:
        print(f"❌ Precision exhausted: {e}")
        return EXIT_PRECISION
    except ValueError as e:
        print(f"❌ Invalid input: {e}")
        return EXIT_INVALID
    except KeyboardInterrupt:
        print("\n🛑 Computation interrupted by user")
        return EXIT_INTERRUPTED
    except Exception as e:
        print(f"❌ Unexpected error: {e}")
        if args.verbose:
            import traceback
            traceback.print_exc()
        return EXIT_INVALID


if __name__ == '__main__':
    sys.exit(main())
