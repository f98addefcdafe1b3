import unittest
from chabauty_nf.models import (
    Certificate, FermatCandidate, FiniteGroupInfo, SolverConfig, Verdict, WitnessRecord,
)


class TestModels(unittest.TestCase):

    def test_solver_config_defaults(self):
        """Test SolverConfig default values"""
        config = SolverConfig()
        self.assertEqual(config.precision, 30)
        self.assertEqual(config.smoothness_bound, 75)
        self.assertEqual(config.sieve_residue_max, 1000)
        self.assertEqual(config.decomposition_search_bound, 3)
        self.assertEqual(config.saturation_prime_max, 5000)
        self.assertIsNone(config.chabauty_prime)
        self.assertEqual(config.output_format, "text")

    def test_solver_config_to_dict(self):
        """Test that run settings are recorded and output options are not"""
        config = SolverConfig(chabauty_prime=109, schedule=[(109, (6, 1))])
        data = config.to_dict()
        self.assertEqual(data['chabauty_prime'], 109)
        self.assertEqual(data['schedule'], [[109, [6, 1]]])
        self.assertNotIn('output_format', data)
        self.assertNotIn('workers', data)

    def test_verdict_values(self):
        """Test the serialized verdict names"""
        self.assertEqual(Verdict.UNIQUE_IN_BALL.value, "UniqueInBall")
        self.assertEqual(Verdict("Certified"), Verdict.CERTIFIED)

    def test_finite_group_exponent(self):
        """Test the exponent of J(k_v)"""
        self.assertEqual(FiniteGroupInfo(order=12100, invariant_factors=[110, 110]).exponent, 110)
        self.assertEqual(FiniteGroupInfo(order=1).exponent, 1)

    def test_certificate_initialization(self):
        """Test Certificate defaults"""
        cert = Certificate(problem_name="c1", problem_hash="abc", version="0.1.0", config={})
        self.assertEqual(cert.verdict, Verdict.NOT_CERTIFIED)
        self.assertEqual(cert.records, [])
        self.assertIsNone(cert.sieve)
        self.assertEqual(cert.notes, [])

    def test_witness_record(self):
        """Test an unmatched coset record"""
        record = WitnessRecord(coset=(1, 0), point_index=None, p=None, diagnostics=["no prime"])
        self.assertEqual(record.verdict, "NotCertified")
        self.assertEqual(record.M_mod_p, [])

    def test_fermat_candidate(self):
        """Test FermatCandidate defaults"""
        candidate = FermatCandidate(case="II", s=1, point=None)
        self.assertFalse(candidate.accepted)
        self.assertEqual(candidate.solutions, [])
        self.assertEqual(candidate.ratio_kind, "rational")


if __name__ == '__main__':
    unittest.main()
