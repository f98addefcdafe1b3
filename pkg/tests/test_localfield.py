import unittest
from fractions import Fraction

import numpy as np

from chabauty_nf.errors import NotASquare, NotAUnit, PrecisionAmbiguous
from chabauty_nf.lattice import rank_mod_p
from chabauty_nf.localfield import ZpMatrix, embed, hensel_sqrt, hnf_zp, lift_place
from chabauty_nf.numberfield import make_number_field, split_prime


class TestLocalField(unittest.TestCase):

    def setUp(self):
        self.K = make_number_field([-2, 0, 0, 1])
        self.theta = self.K.theta

    def test_theta_is_a_cube_root_of_two(self):
        """Test the lifted residue polynomial at split, mixed and inert places"""
        for p in (5, 7, 31):
            for v in split_prime(p, self.K):
                R = lift_place(v, 20)
                t = embed(self.theta, R)
                self.assertEqual(t ** 3, 2)

    def test_embedding_is_a_ring_map(self):
        """Test that embed respects sums and products"""
        a = self.K.parse_element(["1/3", "2/3", "1/3"])
        b = self.K.parse_element(["13/3", "8/3", "10/3"])
        for v in split_prime(5, self.K):
            R = lift_place(v, 15)
            self.assertEqual(embed(a * b, R), embed(a, R) * embed(b, R))
            self.assertEqual(embed(a + b, R), embed(a, R) + embed(b, R))

    def test_valuations_and_precision(self):
        """Test shifts of non-units"""
        v = split_prime(31, self.K)[0]
        R = lift_place(v, 10)
        x = R.from_fraction(Fraction(31 * 31, 7))
        self.assertEqual(x.valuation(), 2)
        self.assertTrue(x.is_integral())
        self.assertFalse(x.is_unit())
        y = R.from_fraction(Fraction(2, 31))
        self.assertEqual(y.valuation(), -1)
        self.assertFalse(y.is_integral())
        self.assertEqual((x * y).valuation(), 1)
        self.assertTrue((R.one - R.one).is_zero())

    def test_inverse(self):
        """Test inverses of units and of p-multiples"""
        v = split_prime(5, self.K)[1]
        R = lift_place(v, 12)
        x = embed(self.K.one - self.theta, R)
        self.assertEqual(x * x.inverse(), 1)
        y = R.from_int(25) * x
        self.assertEqual((y * y.inverse()), 1)
        self.assertEqual(y.inverse().valuation(), -2)

    def test_hensel_sqrt(self):
        """Test square roots of units"""
        v = split_prime(31, self.K)[0]
        R = lift_place(v, 16)
        a = embed(self.K.from_int(9) + 31 * self.theta, R)
        root = hensel_sqrt(a)
        self.assertEqual(root * root, a)
        with self.assertRaises(NotAUnit):
            hensel_sqrt(R.from_int(31))

    def test_hensel_sqrt_non_square(self):
        """Test that a non-square residue is refused"""
        v = split_prime(31, self.K)[0]
        R = lift_place(v, 8)
        nonresidue = R.residue_field.nonresidue()
        with self.assertRaises(NotASquare):
            hensel_sqrt(R.from_residue(nonresidue))

    def test_coordinates_and_reduction(self):
        """Test residue images of integral elements"""
        v = split_prime(5, self.K)[1]
        R = lift_place(v, 6)
        x = embed(self.K.from_int(7), R)
        self.assertEqual(x.coordinates()[0] % 5 ** 6, 7)
        self.assertEqual(x.reduce(), R.residue_field.from_int(2))


class TestZpHermite(unittest.TestCase):

    def test_hnf_zp_relation(self):
        """Test U M = H with h zero rows for a rank-deficient matrix"""
        p, N = 5, 12
        M = ZpMatrix.from_rows(p, N, [[5, 1], [10, 2], [1, 0]], 2)
        result = hnf_zp(M)
        self.assertEqual(result.h, 1)
        mod = p ** N
        UM = result.U.entries.dot(M.entries) % mod
        self.assertTrue(((UM - result.H.entries) % mod == 0).all())
        self.assertTrue(all(int(x) % mod == 0 for x in result.H.entries[-1]))
        self.assertEqual(result.max_pivot_valuation, 0)

    def test_hnf_zp_unimodular(self):
        """Test that U is invertible modulo p"""
        p, N = 7, 10
        M = ZpMatrix.from_rows(p, N, [[7, 14], [49, 1], [3, 5], [0, 7]], 2)
        result = hnf_zp(M)
        self.assertEqual(result.h, 2)
        det = int(round(np.linalg.det(np.array(result.U.mod_p(), dtype=float))))
        self.assertNotEqual(det % p, 0)

    def test_hnf_zp_pivot_orders_agree(self):
        """Test that both tie-breaking rules give U M = H with the same h and kernel rank"""
        p, N = 5, 8
        mod = p ** N
        rng = np.random.default_rng(4)
        matrices = [[[5, 1], [10, 2], [1, 0]], [[7, 14], [49, 1], [3, 5], [0, 7]]]
        matrices += [[[int(x) for x in row] for row in rng.integers(0, 25, size=(4, 2)) * 5]
                     for _ in range(10)]
        for rows in matrices:
            M = ZpMatrix.from_rows(p, N, rows, 2)
            low, high = hnf_zp(M), hnf_zp(M, pivot_order="highest-row")
            UM = high.U.entries.dot(M.entries) % mod
            self.assertTrue(((UM - high.H.entries) % mod == 0).all())
            self.assertEqual(low.h, high.h)
            kernels = [r.U.entries[len(rows) - r.h:] % p for r in (low, high)]
            self.assertEqual(rank_mod_p(kernels[0], p), rank_mod_p(kernels[1], p))
            self.assertEqual(rank_mod_p(kernels[1], p), high.h)

    def test_hnf_zp_precision_guard(self):
        """Test PrecisionAmbiguous when a pivot sits in the last trusted digit"""
        p, N = 5, 6
        M = ZpMatrix.from_rows(p, N, [[5 ** 5], [0]], 1)
        with self.assertRaises(PrecisionAmbiguous):
            hnf_zp(M, guard_digits=1)


if __name__ == '__main__':
    unittest.main()
