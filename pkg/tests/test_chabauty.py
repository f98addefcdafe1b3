import os
import unittest

import pytest

from chabauty_nf.chabauty import ChabautyContext, check_prime_conditions
from chabauty_nf.models import Verdict
from chabauty_nf.problem_io import load_fixture
from chabauty_nf.utils import odd_primes

SLOW = os.environ.get('CHABAUTY_NF_SLOW') == '1'


def first_good_prime(curve, start=7):
    return next(p for p in odd_primes(start, 1000) if not check_prime_conditions(p, curve))


class TestPrimeConditions(unittest.TestCase):

    def test_prime_conditions(self):
        """Test odd, unramified and good reduction requirements"""
        curve = load_fixture('c0').curve
        self.assertEqual(check_prime_conditions(2, curve), ["p is even"])
        self.assertTrue(check_prime_conditions(3, curve))
        self.assertTrue(check_prime_conditions(5, curve))
        self.assertEqual(check_prime_conditions(31, curve), [])
        self.assertEqual(check_prime_conditions(7, curve), [])


class TestCriterion(unittest.TestCase):

    def test_rank_zero_over_q(self):
        """Test that with r = 0 every point is alone in its ball"""
        problem = load_fixture('case_i1')
        context = ChabautyContext(problem.curve, problem.mw.generators, precision=10)
        for point in problem.mw.known_points:
            data = context.criterion(point, 7)
            self.assertEqual(data.h, 2)
            self.assertEqual(data.rank, 1)
            self.assertEqual(data.verdict, Verdict.UNIQUE_IN_BALL)

    def test_rank_zero_over_cubic_field(self):
        """Test the trivial group of C_2 at every place above a good prime"""
        problem = load_fixture('c2')
        p = first_good_prime(problem.curve)
        context = ChabautyContext(problem.curve, [], precision=8)
        data = context.criterion(problem.mw.known_points[0], p)
        self.assertEqual(data.h, 6)
        self.assertEqual(data.rank, 3)
        self.assertEqual(data.verdict, Verdict.UNIQUE_IN_BALL)
        self.assertEqual(len(data.M_mod_p), 6)

    def test_rank_one_over_q(self):
        """Test the shape of M_p(Q) for Y^2 = X^5 - 3^7"""
        problem = load_fixture('case_i2')
        context = ChabautyContext(problem.curve, problem.mw.generators, precision=10)
        data = context.criterion(problem.mw.known_points[0], 7)
        self.assertEqual(data.h, 1)
        self.assertEqual(len(data.T), 2)
        self.assertEqual(len(data.M_mod_p), 1)
        self.assertIn(data.rank, (0, 1))
        expected = Verdict.UNIQUE_IN_BALL if data.rank == 1 else Verdict.INCONCLUSIVE
        self.assertEqual(data.verdict, expected)
        self.assertGreaterEqual(data.trusted_digits, 1)

    def test_pivot_orders_agree(self):
        """Test h and rank mod p under both pivot tie-breaking rules"""
        problem = load_fixture('case_i2')
        for p in (7, 13):
            results = [ChabautyContext(problem.curve, problem.mw.generators, precision=10,
                                       pivot_order=order).criterion(problem.mw.known_points[0], p)
                       for order in ("lowest-row", "highest-row")]
            self.assertEqual(results[0].h, results[1].h, p)
            self.assertEqual(results[0].rank, results[1].rank, p)
            self.assertEqual(results[0].verdict, results[1].verdict, p)

    def test_build_a_at_infinity(self):
        """Test A = (0, -2) for the point at infinity over Q"""
        problem = load_fixture('case_i2')
        context = ChabautyContext(problem.curve, problem.mw.generators, precision=10)
        A = context.build_A(problem.mw.known_points[0], 7)
        self.assertEqual(A.shape, (2, 1))
        self.assertEqual(A[0, 0], 0)
        self.assertEqual(A[1, 0], 7 ** 10 - 2)

    def test_periods_are_cached_per_prime(self):
        """Test that T is built once per prime and precision"""
        problem = load_fixture('case_i2')
        context = ChabautyContext(problem.curve, problem.mw.generators, precision=10)
        first = context.build_T(7)
        self.assertIs(context.build_T(7), first)

    @pytest.mark.slow
    @unittest.skipUnless(SLOW, "set CHABAUTY_NF_SLOW=1 for full-size runs")
    def test_c1_at_109(self):
        """Test the unit-ball criterion on C_1 at p = 109 with rank 3"""
        problem = load_fixture('c1')
        context = ChabautyContext(problem.curve, problem.mw.generators, precision=30)
        for point in problem.mw.known_points:
            data = context.criterion(point, 109)
            self.assertEqual(data.h, 3)
            self.assertEqual(data.rank, 3)
            self.assertEqual(data.verdict, Verdict.UNIQUE_IN_BALL)


if __name__ == '__main__':
    unittest.main()
