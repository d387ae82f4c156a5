"""Exact coefficient fields for the polynomial and linear-algebra layers.

Four fields are supported, each with a lightweight scalar representation:

  RationalField          scalars are fractions.Fraction
  QuadraticField(d)      scalars are (a, b) pairs of Fractions meaning a + b*sqrt(d),
                         d a square-free integer != 0, 1 (d = -1 gives the Gaussian
                         rationals, printed with the symbol i)
  PrimeField(p)          scalars are ints in [0, p) for a prime p

All arithmetic is exact; division by zero raises ZeroDivisionError.  Scalars
are plain hashable values in canonical form (reduced fractions, normalized
pairs), so == is structural equality and dict/set membership is reliable.

Field objects themselves are immutable descriptors: two QuadraticField(2)
instances compare equal and hash alike, which lets polynomials over a shared
field be mixed freely.
"""

from __future__ import annotations

from fractions import Fraction

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for all word-size inputs."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def squarefree_part(n: int) -> int:
    """Largest square-free divisor d of |n| with n = sign * d * square."""
    if n == 0:
        return 0
    n = abs(n)
    d = 1
    f = 2
    while f * f <= n:
        if n % f == 0:
            e = 0
            while n % f == 0:
                n //= f
                e += 1
            if e % 2 == 1:
                d *= f
        f += 1 if f == 2 else 2
    return d * n


def split_square(q: Fraction) -> tuple[Fraction, int]:
    """Write a positive rational q as r**2 * d with d square-free. Returns (r, d)."""
    if q <= 0:
        raise ValueError("split_square needs a positive rational")
    num, den = q.numerator, q.denominator
    # q = num*den / den^2, so only the square-free part of num*den survives.
    d = squarefree_part(num * den)
    r2 = q / d
    # r2 is a square of a rational by construction; take exact integer roots.
    rn = _isqrt_exact(r2.numerator)
    rd = _isqrt_exact(r2.denominator)
    return Fraction(rn, rd), d


def _isqrt_exact(n: int) -> int:
    from math import isqrt

    r = isqrt(n)
    if r * r != n:
        raise ValueError(f"{n} is not a perfect square")
    return r


class RationalField:
    """The rationals; scalars are Fraction values."""

    characteristic = 0
    name = "QQ"

    zero = Fraction(0)
    one = Fraction(1)

    def coerce(self, x):
        if isinstance(x, Fraction):
            return x
        if isinstance(x, int):
            return Fraction(x)
        if isinstance(x, str):
            return Fraction(x)
        raise TypeError(f"cannot coerce {x!r} into QQ")

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero in QQ")
        return 1 / a

    def div(self, a, b):
        if b == 0:
            raise ZeroDivisionError("division by zero in QQ")
        return a / b

    def is_zero(self, a) -> bool:
        return a == 0

    def to_str(self, a) -> str:
        return str(a)

    def parse(self, s: str):
        return Fraction(s)

    def to_float(self, a) -> float:
        return float(a)

    def embed(self, value, from_field):
        if isinstance(from_field, RationalField):
            return value
        raise TypeError(f"cannot embed {from_field} into QQ")

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")

    def __repr__(self):
        return "QQ"


class QuadraticField:
    """QQ(sqrt(d)) for a square-free integer d; scalars are (a, b) Fraction pairs."""

    characteristic = 0

    def __init__(self, d: int):
        if d in (0, 1):
            raise ValueError("quadratic extension needs d not in {0, 1}")
        if squarefree_part(abs(d)) != abs(d):
            raise ValueError(f"d = {d} is not square-free")
        self.d = d
        self.radical = "i" if d == -1 else f"sqrt({d})"
        self.name = "QQ(i)" if d == -1 else f"QQ(sqrt({d}))"
        self.zero = (Fraction(0), Fraction(0))
        self.one = (Fraction(1), Fraction(0))

    def coerce(self, x):
        if isinstance(x, tuple) and len(x) == 2:
            return (Fraction(x[0]), Fraction(x[1]))
        if isinstance(x, (int, Fraction)):
            return (Fraction(x), Fraction(0))
        if isinstance(x, str):
            return self.parse(x)
        raise TypeError(f"cannot coerce {x!r} into {self.name}")

    def add(self, a, b):
        return (a[0] + b[0], a[1] + b[1])

    def sub(self, a, b):
        return (a[0] - b[0], a[1] - b[1])

    def mul(self, a, b):
        return (a[0] * b[0] + self.d * a[1] * b[1], a[0] * b[1] + a[1] * b[0])

    def neg(self, a):
        return (-a[0], -a[1])

    def inv(self, a):
        n = a[0] * a[0] - self.d * a[1] * a[1]
        if n == 0:
            # d square-free forces a = b = 0 here.
            raise ZeroDivisionError(f"inverse of zero in {self.name}")
        return (a[0] / n, -a[1] / n)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def is_zero(self, a) -> bool:
        return a[0] == 0 and a[1] == 0

    def conjugate(self, a):
        return (a[0], -a[1])

    def to_str(self, a) -> str:
        ra, rb = a
        if rb == 0:
            return str(ra)
        if ra == 0:
            if rb == 1:
                return self.radical
            if rb == -1:
                return f"-{self.radical}"
            return f"{rb}*{self.radical}"
        sign = "+" if rb > 0 else "-"
        mag = abs(rb)
        rad = self.radical if mag == 1 else f"{mag}*{self.radical}"
        return f"({ra}{sign}{rad})"

    def parse(self, s: str):
        s = s.strip()
        if s.startswith("(") and s.endswith(")"):
            s = s[1:-1]
        rad = self.radical
        if rad not in s:
            return (Fraction(s), Fraction(0))
        # Split into the rational part and the radical part at the last +/- that
        # precedes the radical token (the coefficient itself may carry a sign).
        idx = s.index(rad)
        head = s[:idx].rstrip("*")
        if head in ("", "+"):
            return (Fraction(0), Fraction(1))
        if head == "-":
            return (Fraction(0), Fraction(-1))
        cut = max(head.rfind("+", 1), head.rfind("-", 1))
        if cut == -1:
            return (Fraction(0), Fraction(head.rstrip("*")))
        a_part, b_part = head[:cut], head[cut:].rstrip("*")
        if b_part in ("+", ""):
            b = Fraction(1)
        elif b_part == "-":
            b = Fraction(-1)
        else:
            b = Fraction(b_part)
        return (Fraction(a_part), b)

    def to_float(self, a) -> float:
        if self.d < 0:
            raise ValueError(f"{self.name} scalar is not real")
        return float(a[0]) + float(a[1]) * self.d ** 0.5

    def to_complex(self, a) -> complex:
        root = complex(0, abs(self.d) ** 0.5) if self.d < 0 else complex(self.d ** 0.5)
        return complex(Fraction(a[0])) + complex(Fraction(a[1])) * root

    def embed(self, value, from_field):
        if isinstance(from_field, RationalField):
            return (value, Fraction(0))
        if isinstance(from_field, QuadraticField) and from_field.d == self.d:
            return value
        raise TypeError(f"cannot embed {from_field} into {self.name}")

    def __eq__(self, other):
        return isinstance(other, QuadraticField) and other.d == self.d

    def __hash__(self):
        return hash(("QuadraticField", self.d))

    def __repr__(self):
        return self.name


class PrimeField:
    """GF(p) for a word-size prime p; scalars are ints in [0, p)."""

    def __init__(self, p: int):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.characteristic = p
        self.name = f"GF({p})"
        self.zero = 0
        self.one = 1
        self._sqrt_cache: dict[int, int] = {}

    def coerce(self, x):
        if isinstance(x, int):
            return x % self.p
        if isinstance(x, Fraction):
            den = x.denominator % self.p
            if den == 0:
                raise ZeroDivisionError(
                    f"denominator of {x} vanishes mod {self.p} (bad prime)"
                )
            return x.numerator * pow(den, self.p - 2, self.p) % self.p
        if isinstance(x, str):
            return self.coerce(Fraction(x))
        raise TypeError(f"cannot coerce {x!r} into {self.name}")

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return a * b % self.p

    def neg(self, a):
        return -a % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError(f"inverse of zero in {self.name}")
        return pow(a, self.p - 2, self.p)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def is_zero(self, a) -> bool:
        return a % self.p == 0

    def to_str(self, a) -> str:
        return str(a % self.p)

    def parse(self, s: str):
        return self.coerce(Fraction(s))

    def to_float(self, a) -> float:
        return float(a % self.p)

    def sqrt(self, a: int) -> int:
        """A square root of a mod p, or raise ValueError for non-residues."""
        a %= self.p
        if a in self._sqrt_cache:
            return self._sqrt_cache[a]
        if a == 0:
            return 0
        if pow(a, (self.p - 1) // 2, self.p) != 1:
            raise ValueError(f"{a} is not a quadratic residue mod {self.p}")
        if self.p % 4 == 3:
            r = pow(a, (self.p + 1) // 4, self.p)
        else:
            r = self._tonelli_shanks(a)
        r = min(r, self.p - r)
        self._sqrt_cache[a] = r
        return r

    def _tonelli_shanks(self, a: int) -> int:
        p = self.p
        q, s = p - 1, 0
        while q % 2 == 0:
            q //= 2
            s += 1
        z = 2
        while pow(z, (p - 1) // 2, p) != p - 1:
            z += 1
        m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
        while t != 1:
            t2, i = t * t % p, 1
            while t2 != 1:
                t2 = t2 * t2 % p
                i += 1
            b = pow(c, 1 << (m - i - 1), p)
            m, c = i, b * b % p
            t, r = t * c % p, r * b % p
        return r

    def embed(self, value, from_field):
        if isinstance(from_field, RationalField):
            return self.coerce(value)
        if isinstance(from_field, PrimeField) and from_field.p == self.p:
            return value
        if isinstance(from_field, QuadraticField):
            root = self.sqrt(from_field.d % self.p)
            return (self.coerce(value[0]) + self.coerce(value[1]) * root) % self.p
        raise TypeError(f"cannot embed {from_field} into {self.name}")

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("PrimeField", self.p))

    def __repr__(self):
        return self.name


QQ = RationalField()
GAUSSIAN = QuadraticField(-1)
