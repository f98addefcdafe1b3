import math
import unittest
from fractions import Fraction

from chabauty_nf.utils import (
    canonical_json, content_hash, crt_pair, exact_root, factorization, floor_log,
    format_factorization, format_rational, is_smooth, lcm_list, odd_primes, p_valuation,
    parallel_map, parse_rational, primes_below,
)


class TestUtils(unittest.TestCase):

    def test_parse_rational(self):
        """Test exact rational parsing"""
        self.assertEqual(parse_rational("3"), Fraction(3))
        self.assertEqual(parse_rational("-13/3"), Fraction(-13, 3))
        self.assertEqual(parse_rational(" 4 / 6 "), Fraction(2, 3))
        self.assertEqual(parse_rational(7), Fraction(7))

    def test_parse_rational_rejects_bad_input(self):
        """Test rejection of zero denominators, floats and booleans"""
        for bad in ("1/0", "1.5", "abc", "", True, 1.5, None):
            with self.assertRaises(ValueError):
                parse_rational(bad)

    def test_format_rational(self):
        """Test canonical rational text"""
        self.assertEqual(format_rational(Fraction(6, 4)), "3/2")
        self.assertEqual(format_rational(Fraction(-8, 4)), "-2")
        self.assertEqual(format_rational(0), "0")

    def test_p_valuation(self):
        """Test p-adic valuation of rationals"""
        self.assertEqual(p_valuation(12100, 11), 2)
        self.assertEqual(p_valuation(Fraction(5, 27), 3), -3)
        self.assertEqual(p_valuation(7, 3), 0)
        self.assertEqual(p_valuation(0, 5), math.inf)

    def test_floor_log(self):
        """Test integer logarithm"""
        self.assertEqual(floor_log(1, 3), 0)
        self.assertEqual(floor_log(8, 2), 3)
        self.assertEqual(floor_log(9, 2), 3)
        self.assertEqual(floor_log(109 ** 2, 109), 2)

    def test_factorization_and_smoothness(self):
        """Test factorization and the strict smoothness bound"""
        self.assertEqual(factorization(12100), {2: 2, 5: 2, 11: 2})
        self.assertEqual(format_factorization(factorization(12100)), "2^2*5^2*11^2")
        self.assertEqual(format_factorization({}), "1")
        self.assertTrue(is_smooth(12100, 75))
        self.assertFalse(is_smooth(2 * 79, 75))
        self.assertFalse(is_smooth(73, 73))
        self.assertTrue(is_smooth(1, 3))
        with self.assertRaises(ValueError):
            factorization(0)

    def test_prime_lists(self):
        """Test prime ranges"""
        self.assertEqual(odd_primes(1, 20), [3, 5, 7, 11, 13, 17, 19])
        self.assertEqual(primes_below(12), [2, 3, 5, 7, 11])
        self.assertEqual(len(primes_below(75)), 21)

    def test_crt_pair(self):
        """Test Chinese remaindering"""
        value, modulus = crt_pair([2, 3], [5, 7])
        self.assertEqual(modulus, 35)
        self.assertEqual(value % 5, 2)
        self.assertEqual(value % 7, 3)
        self.assertEqual(crt_pair([], []), (0, 1))

    def test_exact_root(self):
        """Test exact k-th roots, including negative odd powers"""
        self.assertEqual(exact_root(243, 5), 3)
        self.assertEqual(exact_root(-1, 5), -1)
        self.assertEqual(exact_root(-32, 5), -2)
        self.assertIsNone(exact_root(-3, 5))
        self.assertIsNone(exact_root(-4, 2))
        self.assertIsNone(exact_root(3, 5))
        self.assertEqual(exact_root(0, 5), 0)

    def test_lcm_list(self):
        """Test least common multiple"""
        self.assertEqual(lcm_list([4, 6, 10]), 60)
        self.assertEqual(lcm_list([]), 1)

    def test_canonical_json_is_stable(self):
        """Test key order independence of the canonical form and its hash"""
        a = {'b': [1, "2/3"], 'a': {'y': 1, 'x': 2}}
        b = {'a': {'x': 2, 'y': 1}, 'b': [1, "2/3"]}
        self.assertEqual(canonical_json(a), canonical_json(b))
        self.assertTrue(canonical_json(a).endswith("\n"))
        self.assertEqual(content_hash(a), content_hash(b))
        self.assertNotEqual(content_hash(a), content_hash({'a': 1}))
        self.assertEqual(len(content_hash(a)), 64)

    def test_parallel_map_keeps_order(self):
        """Test that threaded map returns results in input order"""
        items = list(range(20))
        expected = [x * x for x in items]
        self.assertEqual(parallel_map(lambda x: x * x, items), expected)
        self.assertEqual(parallel_map(lambda x: x * x, items, workers=4), expected)
        self.assertEqual(parallel_map(lambda x: x, [], workers=4), [])


if __name__ == '__main__':
    unittest.main()
