import io
import json
import os
import tempfile
import unittest
from unittest.mock import patch

import pandas as pd
import pytest

from chabauty_nf.cli import (
    EXIT_INVALID, EXIT_NOT_CERTIFIED, EXIT_OK, create_config_from_args, create_parser, main,
)
from chabauty_nf.engine import ChabautyEngine
from chabauty_nf.exporters import DataExporter, ReportGenerator
from chabauty_nf.fermat import fermat_recover, solution_set
from chabauty_nf.models import SolverConfig, Verdict
from chabauty_nf.problem_io import load_fixture

SLOW = os.environ.get('CHABAUTY_NF_SLOW') == '1'


def run_cli(argv):
    with patch('sys.stdout', new_callable=io.StringIO) as out:
        code = main(argv)
    return code, out.getvalue()


class TestArguments(unittest.TestCase):

    def test_explicit_options(self):
        """Test that only options given on the command line are marked explicit"""
        args = create_parser().parse_args(['verify', 'c1', '--prime', '113', '--bound', '50'])
        config, explicit = create_config_from_args(args)
        self.assertEqual(config.chabauty_prime, 113)
        self.assertEqual(config.smoothness_bound, 50)
        self.assertEqual(config.precision, SolverConfig.precision)
        self.assertEqual(explicit, {'chabauty_prime', 'smoothness_bound'})

    def test_criterion_requires_prime(self):
        """Test that argparse rejects a criterion call without --prime"""
        with patch('sys.stderr', new_callable=io.StringIO):
            with self.assertRaises(SystemExit):
                create_parser().parse_args(['criterion', 'c1'])


class TestCommands(unittest.TestCase):

    def test_fermat_json(self):
        """Test the solution set printed by fermat2310 without certification"""
        code, output = run_cli(['fermat2310', '--skip-verify', '--format', 'json'])
        self.assertEqual(code, EXIT_OK)
        data = json.loads(output)
        self.assertEqual(len(data['solutions']), 12)
        self.assertIn([3, -2, 1], data['solutions'])
        self.assertIn([-1, -1, 0], data['solutions'])
        self.assertEqual(len(data['candidates']), 22)

    def test_fermat_text_and_csv(self):
        """Test the text report and the CSV table of candidates"""
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'fermat.csv')
            code, output = run_cli(['fermat2310', '--skip-verify', '--output', path])
            self.assertEqual(code, EXIT_OK)
            frame = pd.read_csv(path)
        self.assertIn("SOLUTIONS", output)
        self.assertIn("(3, -2, 1)", output)
        self.assertIn("Completed successfully", output)
        self.assertEqual(len(frame), 22)
        self.assertEqual(int(frame['accepted'].sum()), 4)

    def test_criterion_json(self):
        """Test a unit-ball check through the command line"""
        code, output = run_cli(['criterion', 'case_i1', '--point', '1', '--prime', '7',
                                '--format', 'json'])
        self.assertEqual(code, EXIT_OK)
        data = json.loads(output)
        self.assertEqual(data['verdict'], "UniqueInBall")
        self.assertEqual(data['h'], 2)
        self.assertEqual(data['point'], [["1"], ["0"]])

    def test_jacstats_json(self):
        """Test J(F_7) statistics of Y^2 = X^5 - 3^7"""
        code, output = run_cli(['jacstats', 'case_i2', '--primes', '7', '--format', 'json'])
        self.assertEqual(code, EXIT_OK)
        places = json.loads(output)['places']
        self.assertEqual(len(places), 1)
        self.assertEqual(places[0]['place'], "7:[6, 1]")
        self.assertEqual(places[0]['n1'], 8)
        self.assertEqual(places[0]['order'], 50)

    def test_jacstats_without_places(self):
        """Test exit code 2 when every requested prime has bad reduction"""
        code, output = run_cli(['jacstats', 'case_i1', '--primes', '3', '5', '--format', 'json'])
        self.assertEqual(code, EXIT_NOT_CERTIFIED)
        self.assertEqual(json.loads(output)['places'], [])

    def test_sieve_ready(self):
        """Test exit code 0 once W_s is ready for certification at p = 7"""
        code, output = run_cli(['sieve', 'case_i1', '--prime', '7', '--prime-pool-max', '60',
                                '--sieve-candidates', '4', '--format', 'json'])
        self.assertEqual(code, EXIT_OK)

    def test_sieve_without_usable_prime(self):
        """Test exit code 2 when the aimed prime has bad reduction"""
        code, _ = run_cli(['sieve', 'case_i1', '--prime', '3', '--prime-pool-max', '10',
                           '--format', 'json'])
        self.assertEqual(code, EXIT_NOT_CERTIFIED)

    def test_verify_and_recheck_case_i1(self):
        """Test a certified run written to disk and replayed with another seed and worker count"""
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'case_i1.cert.json')
            code, output = run_cli(['verify', 'case_i1', '--prime-pool-max', '60',
                                    '--sieve-candidates', '4', '--format', 'json', '-o', path])
            self.assertEqual(code, EXIT_OK)
            self.assertEqual(json.loads(output)['verdict'], "Certified")
            code, output = run_cli(['recheck', 'case_i1', path, '--seed', '7', '--workers', '2',
                                    '--prime-pool-max', '60', '--format', 'json'])
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(json.loads(output)['failures'], [])

    def test_verify_case_i2(self):
        """Test certification of Y^2 = X^5 - 3^7 with B = 20 and the stored schedule"""
        code, output = run_cli(['verify', 'case_i2', '--bound', '20', '--format', 'json'])
        self.assertEqual(code, EXIT_OK)
        data = json.loads(output)
        self.assertEqual(data['verdict'], "Certified")
        self.assertEqual(data['chabauty_prime'], 13)
        self.assertEqual(data['sieve']['lattice'], [["510"]])
        self.assertEqual(data['sieve']['cosets'], [["0"]])

    def test_unknown_problem(self):
        """Test exit code 1 for a missing problem file"""
        code, output = run_cli(['verify', 'no_such_problem'])
        self.assertEqual(code, EXIT_INVALID)
        self.assertIn("Invalid input", output)

    def test_invalid_configuration(self):
        """Test exit code 1 when the configuration is rejected"""
        code, output = run_cli(['saturate', 'c2', '--precision', '1'])
        self.assertEqual(code, EXIT_INVALID)
        self.assertIn("precision must be at least 2", output)


class TestEngine(unittest.TestCase):

    def setUp(self):
        self.engine = ChabautyEngine(SolverConfig(output_format='json'))

    def test_config_precedence(self):
        """Test that the problem file overrides defaults but not explicit options"""
        problem = load_fixture('c1')
        self.assertEqual(self.engine.config_for(problem).chabauty_prime, 109)
        pinned = ChabautyEngine(SolverConfig(chabauty_prime=113), {'chabauty_prime'})
        self.assertEqual(pinned.config_for(problem).chabauty_prime, 113)

    def test_sieve_is_shared_per_problem(self):
        """Test that caches are kept per problem hash"""
        problem = load_fixture('case_i1')
        self.assertIs(self.engine.sieve_for(problem), self.engine.sieve_for(load_fixture('case_i1')))

    def test_run_fermat_subset(self):
        """Test back-substitution restricted to two fixtures"""
        candidates, solutions, certified = self.engine.run_fermat(['c1', 'case_i2'], verify=False)
        self.assertTrue(certified)
        self.assertEqual(len(candidates), 6)
        self.assertEqual(solutions, [(-3, -2, -1), (-3, -2, 1), (-1, -1, 0), (1, -1, 0),
                                     (3, -2, -1), (3, -2, 1)])

    def test_run_saturation_trivial(self):
        """Test saturation of the trivial group"""
        results = self.engine.run_saturation(load_fixture('c2'))
        self.assertTrue(all(s.verdict == Verdict.PROVEN for s in results))
        self.assertEqual([s.q for s in results][:3], [2, 3, 5])

    @pytest.mark.slow
    @unittest.skipUnless(SLOW, "set CHABAUTY_NF_SLOW=1 for full-size runs")
    def test_jacstats_c1_at_109(self):
        """Test J(k_v) = Z/110 x Z/110 above 109 on C_1"""
        stats = self.engine.run_jacstats(load_fixture('c1'), [109])
        orders = {s.order: s.invariant_factors for s in stats}
        self.assertEqual(orders.get(12100), [110, 110])


class TestExporters(unittest.TestCase):

    def setUp(self):
        problem = load_fixture('c1')
        self.candidates = [fermat_recover(P, 'II', 1, problem.field) for P in problem.mw.known_points]
        self.solutions = solution_set(self.candidates)

    def test_fermat_frame(self):
        """Test one row per candidate with its ratio or kind"""
        frame = DataExporter().fermat_frame(self.candidates)
        self.assertEqual(len(frame), 5)
        self.assertEqual(list(frame['ratio']), ["none", "5/4", "non-rational", "1", "non-rational"])
        self.assertEqual(frame['point'][0], "oo")

    def test_fermat_report(self):
        """Test the solutions section of the text report"""
        report = ReportGenerator().generate_fermat_report(self.candidates, self.solutions)
        self.assertIn("x^2 + y^3 = z^10", report)
        self.assertIn("(-3, -2, 1)", report)
        self.assertIn("(3, -2, -1)", report)

    def test_export_to_json(self):
        """Test canonical JSON files"""
        data = DataExporter().fermat_to_dict(self.candidates, self.solutions)
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'out.json')
            DataExporter().export_to_json(data, path)
            with open(path, encoding='utf-8') as f:
                loaded = json.load(f)
        self.assertEqual(loaded['solutions'], [list(s) for s in self.solutions])


if __name__ == '__main__':
    unittest.main()
