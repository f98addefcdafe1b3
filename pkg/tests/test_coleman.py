import unittest
from fractions import Fraction

import numpy as np

from chabauty_nf.coleman import (
    FINITE_ORDINARY, FINITE_WEIERSTRASS, INFINITY_KIND, alpha, expand_differential,
    kernel_divisor_integral, period_column, tiny_integral, truncation_order, uniformizer_at,
)
from chabauty_nf.errors import KernelAssertionFailed, NonIntegralPoint, OutOfBall
from chabauty_nf.localfield import lift_place
from chabauty_nf.mumford import INFINITY, CurvePoint, embed_divisor, scalar_mul
from chabauty_nf.numberfield import split_prime
from chabauty_nf.problem_io import load_fixture


class TestColeman(unittest.TestCase):

    def test_truncation_order(self):
        """Test the number of series terms kept for a target precision"""
        self.assertEqual(truncation_order(10, 7), 10)
        self.assertEqual(truncation_order(1, 3), 0)
        self.assertEqual(truncation_order(8, 3, 2), truncation_order(10, 3))

    def test_uniformizer_kinds(self):
        """Test the classification of residue discs"""
        problem = load_fixture('case_i1')
        v = split_prime(7, problem.field)[0]
        weierstrass = uniformizer_at(problem.mw.known_points[1], problem.curve, v, 10)
        self.assertEqual(weierstrass.kind, FINITE_WEIERSTRASS)
        self.assertEqual(uniformizer_at(INFINITY, problem.curve, v, 10).kind, INFINITY_KIND)

    def test_alpha_at_ordinary_point(self):
        """Test alpha_0 = x0^(k-1) / y0 away from Weierstrass points"""
        problem = load_fixture('c0')
        v = split_prime(31, problem.field)[0]
        P = problem.mw.known_points[1]  # (1, 3)
        U = uniformizer_at(P, problem.curve, v, 10)
        self.assertEqual(U.kind, FINITE_ORDINARY)
        third = Fraction(1, 3)
        self.assertEqual(alpha(P, problem.curve, v, 1, 10), third)
        self.assertEqual(alpha(P, problem.curve, v, 2, 10), third)

    def test_alpha_at_weierstrass_point(self):
        """Test alpha_0 = 2 x0^(k-1) / f'(x0) in the parameter y"""
        problem = load_fixture('case_i1')
        v = split_prime(7, problem.field)[0]
        P = problem.mw.known_points[1]  # (1, 0) on 3X^5 - 3
        expected = Fraction(2, 15)
        self.assertEqual(alpha(P, problem.curve, v, 1, 10), expected)
        self.assertEqual(alpha(P, problem.curve, v, 2, 10), expected)

    def test_alpha_at_infinity(self):
        """Test that omega_1 vanishes at infinity and omega_2 does not"""
        problem = load_fixture('case_i2')
        v = split_prime(7, problem.field)[0]
        self.assertTrue(alpha(INFINITY, problem.curve, v, 1, 10).is_zero())
        self.assertEqual(alpha(INFINITY, problem.curve, v, 2, 10), -2)

    def test_expansions_are_integral(self):
        """Test that every kept coefficient is integral"""
        problem = load_fixture('c0')
        v = split_prime(31, problem.field)[0]
        U = uniformizer_at(problem.mw.known_points[3], problem.curve, v, 8)
        expansion = expand_differential(1, U, 12)
        self.assertEqual(len(expansion.coefficients), 12)
        self.assertTrue(all(c.is_integral() for c in expansion.coefficients))

    def test_tiny_integral(self):
        """Test int_Q^P omega for t(P) = 0, t(P) = p and a point outside the ball"""
        problem = load_fixture('c0')
        v = split_prime(31, problem.field)[0]
        U = uniformizer_at(problem.mw.known_points[1], problem.curve, v, 10)
        E = expand_differential(1, U, 10)
        R = U.ring
        self.assertTrue(tiny_integral(U, R.zero, E).is_zero())
        self.assertEqual(tiny_integral(U, R.from_int(31), E).valuation(), 1)
        with self.assertRaises(OutOfBall):
            tiny_integral(U, R.one, E)

    def test_tiny_integral_leading_term(self):
        """Test v(int_Q^P omega - alpha_0 t) >= 2 v(t) on sampled points of the unit ball"""
        cases = [('c0', 31, 1), ('case_i1', 7, 1)]
        rng = np.random.default_rng(9)
        for name, p, index in cases:
            problem = load_fixture(name)
            v = split_prime(p, problem.field)[0]
            U = uniformizer_at(problem.mw.known_points[index], problem.curve, v, 10)
            R = U.ring
            for k in (1, 2):
                E = expand_differential(k, U, 10)
                for a in rng.integers(1, p ** 3, size=25):
                    t = R.from_int(p * int(a))
                    m = t.valuation()
                    integral = tiny_integral(U, t, E)
                    self.assertEqual(integral.valuation(), m)
                    self.assertGreaterEqual((integral - E.alpha * t).valuation(), 2 * m)

    def test_non_integral_point(self):
        """Test rejection of points outside the finite discs"""
        problem = load_fixture('c0')
        v = split_prime(31, problem.field)[0]
        K = problem.field
        x = K.from_rational(Fraction(1, 31 * 31))
        # only the coordinates matter here
        with self.assertRaises(NonIntegralPoint):
            uniformizer_at(CurvePoint(x, K.one), problem.curve, v, 8)

    def test_periods_are_linear(self):
        """Test int_{2D} omega = 2 int_D omega"""
        problem = load_fixture('case_i2')
        v = split_prime(7, problem.field)[0]
        G = problem.mw.generators[0]
        single = period_column(G, v, 10)
        double = period_column(scalar_mul(2, G), v, 10)
        for a, b in zip(single.values, double.values):
            self.assertEqual(a * 2, b)

    def test_periods_are_additive(self):
        """Test int_{D1 + D2} omega = int_{D1} omega + int_{D2} omega"""
        problem = load_fixture('c0')
        v = split_prime(31, problem.field)[0]
        G1, G2 = problem.mw.generators
        total = period_column(G1 + G2, v, 8)
        parts = [period_column(G, v, 8) for G in (G1, G2)]
        for k in range(2):
            self.assertEqual(parts[0].values[k] + parts[1].values[k], total.values[k])

    def test_kernel_integral_of_identity(self):
        """Test that the trivial class integrates to zero"""
        problem = load_fixture('case_i2')
        v = split_prime(7, problem.field)[0]
        E = embed_divisor(problem.mw.generators[0], lift_place(v, 10))
        for k in (1, 2):
            self.assertTrue(kernel_divisor_integral(E - E, k, 10).is_zero())

    def test_two_torsion_has_zero_periods(self):
        """Test that [(1, 0) - oo] on Y^2 = 3(X^5 - 1) integrates to zero"""
        problem = load_fixture('case_i1')
        v = split_prime(7, problem.field)[0]
        T, order = problem.mw.torsion[0]
        self.assertEqual(order, 2)
        for multiplier in (None, 2):
            column = period_column(T, v, 10, multiplier=multiplier)
            self.assertTrue(all(value.is_zero() for value in column.values))
        with self.assertRaises(KernelAssertionFailed):
            period_column(T, v, 10, multiplier=1)

    def test_multiplier_must_reach_the_kernel(self):
        """Test KernelAssertionFailed when m * D does not reduce to zero"""
        problem = load_fixture('case_i2')
        v = split_prime(7, problem.field)[0]
        with self.assertRaises(KernelAssertionFailed):
            period_column(problem.mw.generators[0], v, 10, multiplier=1)

    def test_identity_has_zero_periods(self):
        """Test the trivial class"""
        problem = load_fixture('case_i2')
        v = split_prime(7, problem.field)[0]
        column = period_column(problem.curve.identity(), v, 10)
        self.assertTrue(all(value.is_zero() for value in column.values))


if __name__ == '__main__':
    unittest.main()
