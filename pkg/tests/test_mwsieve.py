import os
import unittest
from dataclasses import replace

import numpy as np
import pytest

from chabauty_nf.errors import NotOnJacobian, SchemaError
from chabauty_nf.lattice import is_sublattice, lattice_index
from chabauty_nf.models import Certificate, SieveState, SolverConfig, Verdict
from chabauty_nf.mwsieve import MordellWeilSieve, find_decomposition, schedule_places
from chabauty_nf.numberfield import split_prime
from chabauty_nf.problem_io import load_fixture

SLOW = os.environ.get('CHABAUTY_NF_SLOW') == '1'

SMALL = SolverConfig(prime_pool_max=120, sieve_residue_max=120, sieve_candidates=3,
                     saturation_place_budget=20)


class TestAbstractMW(unittest.TestCase):

    def setUp(self):
        self.problem = load_fixture('c0')
        self.mw = self.problem.mw

    def test_combination_and_decompositions(self):
        """Test that each stored decomposition reproduces [Q - P0]"""
        for Q, coeffs in zip(self.mw.known_points, self.mw.decompositions):
            self.assertEqual(self.mw.combination(coeffs), self.mw.aj(Q))

    def test_verify_rejects_wrong_decomposition(self):
        """Test NotOnJacobian for a decomposition that does not match"""
        broken = replace(self.mw, decompositions=[(0, 0), (0, 1), (-1, 0), (0, 1), (0, -1)])
        with self.assertRaises(NotOnJacobian):
            broken.verify()

    def test_verify_rejects_foreign_base_point(self):
        """Test that P0 has to be a known point"""
        broken = replace(self.mw, known_points=self.mw.known_points[1:],
                         decompositions=self.mw.decompositions[1:])
        with self.assertRaises(NotOnJacobian):
            broken.verify()

    def test_verify_checks_torsion_orders(self):
        """Test exact torsion orders on Y^2 = 3(X^5 - 1)"""
        mw = load_fixture('case_i1').mw
        mw.verify()
        T, _ = mw.torsion[0]
        with self.assertRaises(NotOnJacobian):
            replace(mw, torsion=[(T, 4)]).verify()
        with self.assertRaises(NotOnJacobian):
            replace(mw, torsion=[(T, 3)]).verify()

    def test_normalize_reduces_torsion_entries(self):
        """Test that only torsion coordinates are reduced"""
        mw = load_fixture('case_i1').mw
        self.assertEqual(mw.orders, [2])
        self.assertEqual(mw.normalize([5]), (1,))
        self.assertEqual(self.mw.normalize([5, -7]), (5, -7))

    def test_find_decomposition(self):
        """Test the bounded search against the stored decompositions"""
        for Q in self.mw.known_points:
            found = find_decomposition(self.mw, Q, bound=2)
            self.assertIsNotNone(found)
            self.assertEqual(self.mw.combination(found), self.mw.aj(Q))

    def test_searched_decompositions(self):
        """Test the points of C_-1 loaded without decompositions"""
        mw = load_fixture('c_minus1').mw
        for Q, coeffs in zip(mw.known_points[3:], mw.decompositions[3:]):
            self.assertEqual(len(coeffs), 3)
            self.assertEqual(mw.combination(coeffs), mw.aj(Q))


class TestSieve(unittest.TestCase):

    def setUp(self):
        self.problem = load_fixture('case_i1')
        self.sieve = MordellWeilSieve(self.problem.mw, SMALL)

    def test_initial_state(self):
        """Test L_0 = Z^n with the zero coset"""
        state = self.sieve.initial_state()
        self.assertEqual(state.index, 0)
        self.assertEqual([list(row) for row in state.lattice], [[1]])
        self.assertEqual(state.cosets, [(0,)])

    def test_admissibility_reasons(self):
        """Test bad reduction and the residue field cap"""
        K = self.problem.field
        bad = self.sieve.admissible_place(split_prime(3, K)[0])
        self.assertFalse(bad.admissible)
        self.assertIn("bad reduction", bad.reasons)
        large = self.sieve.admissible_place(split_prime(127, K)[0])
        self.assertFalse(large.admissible)
        self.assertTrue(large.reasons[0].startswith("#k_v = 127"))

    def test_candidate_places(self):
        """Test that candidates are admissible and sorted by residue size"""
        places = self.sieve.candidate_places()
        self.assertTrue(places)
        sizes = [v.residue_size for v in places]
        self.assertEqual(sizes, sorted(sizes))
        for v in places:
            report = self.sieve.admissible_place(v)
            self.assertTrue(report.admissible)
            self.assertTrue(report.smooth)

    def test_sieve_step_keeps_known_points(self):
        """Test one step on J(Q) = Z/2: the Weierstrass class survives reduction"""
        state = self.sieve.initial_state()
        v = self.sieve.candidate_places()[0]
        new = self.sieve.sieve_step(state, v)
        self.assertEqual(new.index, 1)
        self.assertTrue(is_sublattice(new.lattice, state.lattice))
        self.assertEqual(lattice_index(new.lattice), 2)
        self.assertEqual(new.cosets, [(0,), (1,)])
        witness = self.sieve.soundness_witness(new)
        self.assertEqual(witness, {0: (0,), 1: (1,)})
        record = new.trace[0]
        self.assertEqual(record.cosets_before, 1)
        self.assertEqual(record.cosets_candidates, 2)
        self.assertEqual(record.cosets_after, 2)

    def test_pinned_schedule(self):
        """Test that a pinned run follows the given places exactly"""
        places = self.sieve.candidate_places()[:2]
        state = self.sieve.run_sieve(schedule=places)
        self.assertEqual(state.places, places)
        self.assertEqual([(v.p, list(v.factor_mod_p)) for v in places], schedule_places(state))

    def test_pinned_schedule_rejects_bad_places(self):
        """Test SchemaError for an inadmissible pinned place"""
        bad = split_prime(3, self.problem.field)[0]
        with self.assertRaises(SchemaError):
            self.sieve.run_sieve(schedule=[bad])

    def test_greedy_sieve_is_sound(self):
        """Test that the greedy chain never drops a known point"""
        state = self.sieve.run_sieve(chabauty_prime=7)
        self.assertEqual(len(self.sieve.soundness_witness(state)), 2)
        self.assertLessEqual(state.index, SMALL.max_sieve_steps)

    def test_greedy_sieve_reaches_the_kernel(self):
        """Test that a step splitting W_0 into two matched cosets is taken on J(Q) = Z/2"""
        target = self.sieve.target_places(7)
        initial = self.sieve.initial_state()
        self.assertEqual(self.sieve.progress(initial, target), (2, 2))
        self.assertFalse(self.sieve.ready(initial, target))
        state = self.sieve.run_sieve(chabauty_prime=7)
        self.assertEqual(state.index, 1)
        self.assertEqual(state.places[0].p, 7)
        self.assertEqual([list(row) for row in state.lattice], [[2]])
        self.assertEqual(state.cosets, [(0,), (1,)])
        self.assertEqual(self.sieve.progress(state, target), (2, 1))
        self.assertTrue(self.sieve.ready(state, target))

    def test_schedule_places(self):
        """Test the (p, residue polynomial) encoding of a chain"""
        K = load_fixture('c0').field
        places = list(split_prime(31, K))
        state = SieveState(index=len(places), lattice=np.zeros((0, 0), dtype=object),
                           places=places)
        pairs = schedule_places(state)
        self.assertEqual(len(pairs), 3)
        for p, factor in pairs:
            self.assertEqual(p, 31)
            self.assertEqual(len(factor), 2)
            self.assertEqual(factor[-1], 1)


class TestSaturation(unittest.TestCase):

    def test_nothing_to_saturate(self):
        """Test that q coprime to every torsion order leaves a zero-dimensional check"""
        sieve = MordellWeilSieve(load_fixture('case_i1').mw, SMALL)
        result = sieve.saturation_check(3)
        self.assertEqual(result.dimension, 0)
        self.assertEqual(result.verdict, Verdict.PROVEN)

    def test_trivial_group(self):
        """Test that J(K) = 0 is saturated at every q"""
        sieve = MordellWeilSieve(load_fixture('c2').mw, SMALL)
        for q in (2, 3, 5):
            result = sieve.saturation_check(q)
            self.assertEqual(result.verdict, Verdict.PROVEN)
            self.assertEqual(result.places, [])

    def test_no_places_is_inconclusive(self):
        """Test that an empty place list proves nothing for a free generator"""
        sieve = MordellWeilSieve(load_fixture('case_i2').mw, SMALL)
        result = sieve.saturation_check(3, places=[])
        self.assertEqual(result.dimension, 1)
        self.assertEqual(result.remaining_dimension, 1)
        self.assertEqual(result.verdict, Verdict.INCONCLUSIVE)

    def test_given_place_needs_q_dividing_the_order(self):
        """Test that a place with q not dividing #J(k_v) is skipped, not counted"""
        sieve = MordellWeilSieve(load_fixture('case_i2').mw, SMALL)
        v = split_prime(7, sieve.K)[0]
        self.assertEqual(sieve.residue_jacobian(v).order, 50)
        result = sieve.saturation_check(3, places=[v])
        self.assertEqual(result.places, [])
        self.assertEqual(result.verdict, Verdict.INCONCLUSIVE)

    def test_saturation_uses_non_smooth_places(self):
        """Test q = 61 on Y^2 = X^5 - 3^7, where #J(k_v) = 2 * 5 * 61 * 89 above 233"""
        sieve = MordellWeilSieve(load_fixture('case_i2').mw, replace(SMALL, saturation_prime_max=250))
        v = split_prime(233, sieve.K)[0]
        self.assertEqual(sieve.residue_jacobian(v).order, 54290)
        self.assertFalse(sieve.admissible_place(v).admissible)
        result = sieve.saturation_check(61)
        self.assertEqual(result.verdict, Verdict.PROVEN)
        self.assertTrue(result.places)
        for place in result.places:
            self.assertEqual(sieve.residue_jacobian(place).order % 61, 0)

    @pytest.mark.slow
    @unittest.skipUnless(SLOW, "set CHABAUTY_NF_SLOW=1 for full saturation scans")
    def test_large_q_at_default_settings(self):
        """Test the primes 47 <= q < 75 that no 75-smooth place can reach"""
        sieve = MordellWeilSieve(load_fixture('case_i2').mw, SolverConfig())
        for q in (47, 59, 61, 67):
            self.assertEqual(sieve.saturation_check(q).verdict, Verdict.PROVEN, q)


class TestCertification(unittest.TestCase):

    def setUp(self):
        self.sieve = MordellWeilSieve(load_fixture('case_i1').mw, SMALL)

    def test_missing_saturation_blocks_certificate(self):
        """Test NotCertified when no saturation results are supplied"""
        state = self.sieve.initial_state()
        certificate = self.sieve.certify(state, [], 7)
        self.assertEqual(certificate.verdict, Verdict.NOT_CERTIFIED)
        self.assertTrue(certificate.notes[0].startswith("saturation not proven"))
        self.assertEqual(len(certificate.records), 1)

    def test_recheck_without_transcript(self):
        """Test the failures reported for an empty certificate"""
        certificate = Certificate(problem_name="case_i1", problem_hash="", version="",
                                  config={})
        failures = self.sieve.recheck(certificate)
        self.assertTrue(any(f.startswith("saturation missing") for f in failures))
        self.assertIn("no sieve transcript", failures)

    def certify_case_i1(self, config):
        sieve = MordellWeilSieve(load_fixture('case_i1').mw, config)
        saturation = sieve.saturate()
        p = sieve.choose_chabauty_prime()
        state = sieve.run_sieve(chabauty_prime=p)
        return sieve.certify(state, saturation, p)

    def test_certify_and_recheck_small_pool(self):
        """Test a certificate for Y^2 = 3(X^5 - 1) replayed under another seed and worker count"""
        certificate = self.certify_case_i1(SMALL)
        self.assertEqual(certificate.chabauty_prime, 7)
        self.assertEqual(certificate.verdict, Verdict.CERTIFIED)
        self.assertEqual(certificate.notes, [])
        self.assertEqual([(r.coset, r.point_index) for r in certificate.records],
                         [((0,), 0), ((1,), 1)])
        fresh = MordellWeilSieve(load_fixture('case_i1').mw, replace(SMALL, seed=11, workers=2))
        self.assertEqual(fresh.recheck(certificate), [])

    def test_recheck_uses_stored_bound(self):
        """Test that saturation coverage is judged against the bound of the certificate"""
        certificate = self.certify_case_i1(replace(SMALL, smoothness_bound=20))
        self.assertEqual(certificate.verdict, Verdict.CERTIFIED)
        self.assertEqual([s.q for s in certificate.saturation], [2, 3, 5, 7, 11, 13, 17, 19])
        self.assertEqual(self.sieve.recheck(certificate), [])
        certificate.config['smoothness_bound'] = 30
        self.assertIn("saturation missing for q = [23, 29]", self.sieve.recheck(certificate))

    @pytest.mark.slow
    @unittest.skipUnless(SLOW, "set CHABAUTY_NF_SLOW=1 for full certification runs")
    def test_certify_and_recheck(self):
        """Test a full certificate for Y^2 = 3(X^5 - 1) and its replay"""
        sieve = MordellWeilSieve(load_fixture('case_i1').mw, SolverConfig())
        saturation = sieve.saturate()
        p = sieve.choose_chabauty_prime()
        state = sieve.run_sieve(chabauty_prime=p)
        certificate = sieve.certify(state, saturation, p)
        self.assertEqual(certificate.verdict, Verdict.CERTIFIED)
        fresh = MordellWeilSieve(load_fixture('case_i1').mw, SolverConfig())
        self.assertEqual(fresh.recheck(certificate), [])


if __name__ == '__main__':
    unittest.main()
