"""
Dense univariate polynomials over an abstract coefficient field.

Polynomials are plain lists of coefficients, lowest degree first. The
coefficient field object supplies ``zero`` and ``one``; its elements support
``+ - * /``, unary minus, integer powers and ``is_zero()``. Over local rings
``is_zero()`` means indistinguishable from zero at the working precision, so
stripping also drops coefficients that lost all their digits.
"""

from typing import List, Sequence, Tuple


class PolyRing:
    """Polynomial arithmetic over a coefficient field"""

    def __init__(self, field):
        self.field = field
        self.zero = field.zero
        self.one = field.one

    # Construction and inspection

    def strip(self, a: Sequence) -> list:
        result = list(a)
        while result and result[-1].is_zero():
            result.pop()
        return result

    def degree(self, a: Sequence) -> int:
        """Degree, -1 for the zero polynomial"""
        return len(self.strip(a)) - 1

    def is_zero(self, a: Sequence) -> bool:
        return not self.strip(a)

    def leading(self, a: Sequence):
        a = self.strip(a)
        return a[-1] if a else self.zero

    def equal(self, a: Sequence, b: Sequence) -> bool:
        return self.is_zero(self.sub(a, b))

    def constant(self, c) -> list:
        return self.strip([c])

    def linear(self, c0, c1) -> list:
        return self.strip([c0, c1])

    # Ring operations

    def add(self, a: Sequence, b: Sequence) -> list:
        n = max(len(a), len(b))
        result = []
        for i in range(n):
            if i < len(a) and i < len(b):
                result.append(a[i] + b[i])
            elif i < len(a):
                result.append(a[i])
            else:
                result.append(b[i])
        return self.strip(result)

    def neg(self, a: Sequence) -> list:
        return [-c for c in a]

    def sub(self, a: Sequence, b: Sequence) -> list:
        return self.add(a, self.neg(b))

    def scale(self, a: Sequence, c) -> list:
        return self.strip([x * c for x in a])

    def mul(self, a: Sequence, b: Sequence) -> list:
        a, b = self.strip(a), self.strip(b)
        if not a or not b:
            return []
        result = [self.zero] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x.is_zero():
                continue
            for j, y in enumerate(b):
                result[i + j] = result[i + j] + x * y
        return self.strip(result)

    def square(self, a: Sequence) -> list:
        return self.mul(a, a)

    def divmod(self, a: Sequence, b: Sequence) -> Tuple[list, list]:
        """Euclidean division; the leading coefficient of b must be invertible"""
        b = self.strip(b)
        if not b:
            raise ZeroDivisionError("polynomial division by zero")
        remainder = self.strip(a)
        db = len(b) - 1
        if len(remainder) - 1 < db:
            return [], remainder
        inv_lead = self.one / b[-1]
        quotient = [self.zero] * (len(remainder) - db)
        remainder = list(remainder)
        for k in range(len(remainder) - 1 - db, -1, -1):
            coeff = remainder[k + db] * inv_lead
            quotient[k] = coeff
            if coeff.is_zero():
                continue
            for j in range(db + 1):
                remainder[k + j] = remainder[k + j] - coeff * b[j]
        remainder = self.strip(remainder[:db])
        return self.strip(quotient), remainder

    def mod(self, a: Sequence, b: Sequence) -> list:
        return self.divmod(a, b)[1]

    def exact_div(self, a: Sequence, b: Sequence) -> list:
        """Quotient of a division known to be exact"""
        return self.divmod(a, b)[0]

    def monic(self, a: Sequence) -> list:
        a = self.strip(a)
        if not a:
            return []
        inv_lead = self.one / a[-1]
        return [c * inv_lead for c in a[:-1]] + [self.one]

    def xgcd(self, a: Sequence, b: Sequence) -> Tuple[list, list, list]:
        """Monic gcd g with s*a + t*b = g"""
        r0, r1 = self.strip(a), self.strip(b)
        s0, s1 = [self.one], []
        t0, t1 = [], [self.one]
        while r1:
            q, r = self.divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, self.sub(s0, self.mul(q, s1))
            t0, t1 = t1, self.sub(t0, self.mul(q, t1))
        if not r0:
            return [], [], []
        inv_lead = self.one / r0[-1]
        return (self.scale(r0, inv_lead), self.scale(s0, inv_lead),
                self.scale(t0, inv_lead))

    def gcd(self, a: Sequence, b: Sequence) -> list:
        return self.xgcd(a, b)[0]

    # Evaluation and calculus

    def evaluate(self, a: Sequence, x):
        result = self.zero
        for c in reversed(self.strip(a)):
            result = result * x + c
        return result

    def derivative(self, a: Sequence) -> list:
        return self.strip([a[i] * i for i in range(1, len(a))])

    def compose_linear(self, a: Sequence, c) -> list:
        """Coefficients of a(x + c)"""
        result: List = []
        shift = self.linear(c, self.one)
        for coeff in reversed(self.strip(a)):
            result = self.add(self.mul(result, shift), [coeff])
        return result

    def resultant(self, a: Sequence, b: Sequence):
        a, b = self.strip(a), self.strip(b)
        if not a or not b:
            return self.zero
        result = self.one
        while True:
            da, db = len(a) - 1, len(b) - 1
            if db == 0:
                return result * b[0] ** da
            r = self.mod(a, b)
            if not r:
                return self.zero
            dr = len(r) - 1
            result = result * b[-1] ** (da - dr)
            if (da * db) % 2:
                result = -result
            a, b = b, r

    def discriminant(self, a: Sequence):
        a = self.strip(a)
        n = len(a) - 1
        if n < 1:
            return self.zero
        res = self.resultant(a, self.derivative(a))
        if (n * (n - 1) // 2) % 2:
            res = -res
        return res / a[-1]
