import unittest
from fractions import Fraction

from chabauty_nf.fermat import (
    fermat_recover, is_solution, ratio_values, recover_case_one, recover_case_two, sign_orbit,
    solution_set, unit_power,
)
from chabauty_nf.mumford import INFINITY, CurvePoint
from chabauty_nf.numberfield import make_number_field
from chabauty_nf.problem_io import list_fixtures, load_fixture

EXPECTED_SOLUTIONS = sorted([
    (3, -2, 1), (3, -2, -1), (-3, -2, 1), (-3, -2, -1),
    (1, 0, 1), (1, 0, -1), (-1, 0, 1), (-1, 0, -1),
    (0, 1, 1), (0, 1, -1),
    (1, -1, 0), (-1, -1, 0),
])


def recover_fixture(name):
    problem = load_fixture(name)
    case, s = problem.fermat['case'], problem.fermat.get('s')
    return [fermat_recover(P, case, s, problem.field) for P in problem.mw.known_points]


class TestCaseTwo(unittest.TestCase):

    def test_units(self):
        """Test eps^s for negative exponents"""
        K = make_number_field([-2, 0, 0, 1])
        self.assertEqual(unit_power(K, -1) * unit_power(K, 1), K.one)
        self.assertEqual(unit_power(K, -2), K.parse_element(["-1", "-1", "-1"]) ** 2)

    def test_infinity_gives_nothing(self):
        """Test that the point at infinity of C_s has no coprime (u, v)"""
        K = make_number_field([-2, 0, 0, 1])
        candidate = recover_case_two(INFINITY, 2, K)
        self.assertFalse(candidate.accepted)
        self.assertEqual(candidate.ratio_kind, "none")

    def test_c0(self):
        """Test the v = 0 branch and the even numerator u/v = 0"""
        candidates = recover_fixture('c0')
        branch = candidates[1]
        self.assertEqual(branch.ratio_kind, "infinite")
        self.assertTrue(branch.accepted)
        self.assertEqual(sorted(branch.solutions), [(-1, 0, -1), (1, 0, 1)])
        zero = candidates[2]
        self.assertEqual(zero.ratio, 0)
        self.assertFalse(zero.accepted)
        self.assertEqual(candidates[3].ratio_kind, "non-rational")
        self.assertEqual(candidates[4].ratio_kind, "non-rational")

    def test_c1(self):
        """Test u/v = 5/4 rejected and u/v = 1 giving (+-3, -2, -+1)"""
        candidates = recover_fixture('c1')
        rejected = candidates[1]
        self.assertEqual(rejected.ratio, Fraction(5, 4))
        self.assertFalse(rejected.accepted)
        self.assertIn("-3", rejected.reason)
        accepted = candidates[3]
        self.assertEqual(accepted.ratio, 1)
        self.assertTrue(accepted.accepted)
        self.assertEqual(sorted(accepted.solutions), [(-3, -2, 1), (3, -2, -1)])
        for index in (2, 4):
            self.assertEqual(candidates[index].ratio_kind, "non-rational")

    def test_c_minus1(self):
        """Test that u/v = 2 is rejected for its even numerator"""
        candidates = recover_fixture('c_minus1')
        self.assertEqual(candidates[2].ratio, 2)
        self.assertFalse(candidates[2].accepted)
        self.assertIn("u even", candidates[2].reason)
        for index in (1, 3, 4):
            self.assertEqual(candidates[index].ratio_kind, "non-rational")

    def test_c_minus2(self):
        """Test that u/v = -1 leaves u^3 - 2v^3 = 3"""
        candidates = recover_fixture('c_minus2')
        self.assertEqual(candidates[2].ratio, -1)
        self.assertFalse(candidates[2].accepted)
        self.assertEqual(candidates[1].ratio_kind, "non-rational")


class TestCaseOne(unittest.TestCase):

    def test_weierstrass_point(self):
        """Test (1, 0) on Y^2 = 3(X^5 - 1) giving (0, 1, +-1)"""
        candidates = recover_fixture('case_i1')
        self.assertFalse(candidates[0].accepted)
        point = candidates[1]
        self.assertTrue(point.accepted)
        self.assertEqual(sorted(point.solutions), [(0, 1, -1), (0, 1, 1)])

    def test_infinity(self):
        """Test the a = 0 branch on both Case I curves"""
        rejected = recover_case_one(INFINITY, 'I.1')
        self.assertFalse(rejected.accepted)
        self.assertIn("fifth power", rejected.reason)
        accepted = recover_case_one(INFINITY, 'I.2')
        self.assertTrue(accepted.accepted)
        self.assertEqual(sorted(accepted.solutions), [(-1, -1, 0), (1, -1, 0)])

    def test_non_square_denominator(self):
        """Test rejection of X with a non-square denominator"""
        problem = load_fixture('case_i2')
        K = problem.field
        point = CurvePoint(K.from_rational(Fraction(1, 2)), K.one)
        candidate = recover_case_one(point, 'I.2')
        self.assertFalse(candidate.accepted)
        self.assertIn("non-square denominator", candidate.reason)


class TestSolutions(unittest.TestCase):

    def test_is_solution(self):
        """Test the defining equation"""
        self.assertTrue(is_solution(3, -2, 1))
        self.assertTrue(is_solution(0, 1, -1))
        self.assertFalse(is_solution(3, 2, 1))

    def test_sign_orbit(self):
        """Test closure under the sign changes of x and z"""
        self.assertEqual(sign_orbit([(3, -2, 1)]),
                         {(3, -2, 1), (-3, -2, 1), (3, -2, -1), (-3, -2, -1)})
        self.assertEqual(sign_orbit([(1, -1, 0)]), {(1, -1, 0), (-1, -1, 0)})

    def test_full_solution_set(self):
        """Test the twelve solutions from every descent fixture"""
        candidates = [c for name in list_fixtures() for c in recover_fixture(name)]
        solutions = solution_set(candidates)
        self.assertEqual(solutions, EXPECTED_SOLUTIONS)
        self.assertTrue(all(is_solution(*s) for s in solutions))
        self.assertEqual(ratio_values(candidates),
                         {Fraction(5, 4), Fraction(1), Fraction(0), Fraction(2), Fraction(-1)})


if __name__ == '__main__':
    unittest.main()
