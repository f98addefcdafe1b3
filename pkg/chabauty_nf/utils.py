import hashlib
import json
import math
import re
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Dict, Iterable, List, Sequence, Tuple, Union

from sympy import factorint, integer_nthroot, isprime, primerange
from sympy.ntheory.modular import crt


_RATIONAL_RE = re.compile(r'^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$')

Rational = Union[int, Fraction]


def parse_rational(text: Union[str, int]) -> Fraction:
    """Parse an exact rational written as "n" or "num/den" """
    if isinstance(text, bool):
        raise ValueError(f"Not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise ValueError(f"Not a rational: {text!r}")
    match = _RATIONAL_RE.match(text)
    if not match:
        raise ValueError(f"Not a rational: {text!r}")
    num = int(match.group(1))
    den = int(match.group(2)) if match.group(2) is not None else 1
    if den == 0:
        raise ValueError(f"Zero denominator in {text!r}")
    return Fraction(num, den)


def format_rational(x: Rational) -> str:
    """Canonical text form of an exact rational"""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def p_valuation(n: Rational, p: int) -> Union[int, float]:
    """p-adic valuation of a nonzero rational; math.inf for zero"""
    x = Fraction(n)
    if x == 0:
        return math.inf
    val = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        val += 1
    while den % p == 0:
        den //= p
        val -= 1
    return val


def floor_log(n: int, p: int) -> int:
    """Largest k with p**k <= n (n >= 1)"""
    k = 0
    power = p
    while power <= n:
        power *= p
        k += 1
    return k


def factorization(n: int) -> Dict[int, int]:
    """Prime factorization of a positive integer as {prime: exponent}"""
    if n <= 0:
        raise ValueError(f"Cannot factor non-positive integer {n}")
    return {int(p): int(e) for p, e in sorted(factorint(n).items())}


def is_smooth(n: int, bound: int) -> bool:
    """True when every prime factor of n is strictly below bound"""
    if n <= 0:
        return False
    return all(p < bound for p in factorization(n))


def odd_primes(lower: int, upper: int) -> List[int]:
    """Odd primes in [lower, upper]"""
    return [int(p) for p in primerange(max(3, lower), upper + 1)]


def primes_below(bound: int) -> List[int]:
    return [int(p) for p in primerange(2, bound)]


def is_prime(n: int) -> bool:
    return bool(isprime(n))


def crt_pair(residues: Sequence[int], moduli: Sequence[int]) -> Tuple[int, int]:
    """Chinese remaindering of pairwise coprime congruences"""
    if not moduli:
        return 0, 1
    result = crt(list(moduli), list(residues))
    if result is None:
        raise ValueError("Incompatible congruences")
    return int(result[0]), int(result[1])


def exact_root(n: int, k: int) -> Union[int, None]:
    """Integer k-th root of n when it exists (odd k allows negative n)"""
    if n < 0:
        if k % 2 == 0:
            return None
        root = exact_root(-n, k)
        return -root if root is not None else None
    root, exact = integer_nthroot(n, k)
    return int(root) if exact else None


def lcm_list(values: Iterable[int]) -> int:
    result = 1
    for value in values:
        result = result * value // math.gcd(result, value)
    return result


def canonical_json(data) -> str:
    """Stable JSON text used for hashing and golden files"""
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def content_hash(data) -> str:
    """SHA-256 of the canonical compact JSON form"""
    compact = json.dumps(data, sort_keys=True, separators=(',', ':'))
    return hashlib.sha256(compact.encode('utf-8')).hexdigest()


def format_factorization(factors: Dict[int, int]) -> str:
    """Human readable factorization, e.g. 2^2*5^2*11^2"""
    if not factors:
        return "1"
    parts = []
    for p, e in sorted(factors.items()):
        parts.append(f"{p}^{e}" if e > 1 else str(p))
    return "*".join(parts)


def parallel_map(func, items: Sequence, workers: int = 1) -> List:
    """map() over a thread pool when workers > 1; results keep the input order"""
    items = list(items)
    if workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(func, items))
    return [func(item) for item in items]
