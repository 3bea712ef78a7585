"""Finite fields F_{p^k} with elements encoded as small integers.

An element is the integer sum(c_i * p**i) where c_0 + c_1 g + ... is its
coordinate vector on the power basis of a root g of the modulus.  Prime
fields use plain modular arithmetic; extension fields use log/exp tables
over a primitive element.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

# Least monic irreducible of degree k over F_p for p**k <= 729, ordered by the
# integer encoding of the coefficient vector.  Coefficients low degree first.
MODULUS_TABLE: dict[tuple[int, int], tuple[int, ...]] = {
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (2, 5): (1, 0, 1, 0, 0, 1),
    (2, 6): (1, 1, 0, 0, 0, 0, 1),
    (2, 7): (1, 1, 0, 0, 0, 0, 0, 1),
    (2, 8): (1, 1, 0, 1, 1, 0, 0, 0, 1),
    (2, 9): (1, 1, 0, 0, 0, 0, 0, 0, 0, 1),
    (3, 2): (1, 0, 1),
    (3, 3): (1, 2, 0, 1),
    (3, 4): (2, 1, 0, 0, 1),
    (3, 5): (1, 2, 0, 0, 0, 1),
    (3, 6): (2, 1, 0, 0, 0, 0, 1),
    (5, 2): (2, 0, 1),
    (5, 3): (1, 1, 0, 1),
    (5, 4): (2, 0, 0, 0, 1),
    (7, 2): (1, 0, 1),
    (7, 3): (2, 0, 0, 1),
    (11, 2): (1, 0, 1),
    (13, 2): (2, 0, 1),
    (17, 2): (3, 0, 1),
    (19, 2): (1, 0, 1),
    (23, 2): (1, 0, 1),
}


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _factor_int(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


class FieldError(ValueError):
    pass


class GF:
    """The field F_{p^k}; use `gf(p, k, modulus)` to get cached instances."""

    def __init__(self, p: int, k: int = 1, modulus: tuple[int, ...] | None = None):
        if not is_prime(p):
            raise FieldError(f"characteristic {p} is not prime")
        if k < 1:
            raise FieldError("extension degree must be >= 1")
        if modulus is None:
            modulus = default_modulus(p, k)
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != k + 1 or modulus[-1] != 1:
            raise FieldError("modulus must be monic of degree k")
        if not _is_irreducible_prime_field(p, modulus):
            raise FieldError("modulus is not irreducible over F_p")
        self.p, self.k, self.q = p, k, p**k
        self.modulus = modulus
        self._digits = None
        if k > 1:
            self._build_tables()

    # -- construction -------------------------------------------------
    def _build_tables(self) -> None:
        p, k, q = self.p, self.k, self.q
        digits = [tuple((x // p**i) % p for i in range(k)) for x in range(q)]
        self._digits = digits
        weights = [p**i for i in range(k)]
        mod = self.modulus

        def times_g(x: int) -> int:
            d = digits[x]
            top = d[-1]
            shifted = (0,) + d[:-1]
            return sum(((shifted[i] - top * mod[i]) % p) * weights[i] for i in range(k))

        def mul_slow(a: int, b: int) -> int:
            acc = 0
            cur = a
            for c in digits[b]:
                for _ in range(c):
                    acc = self._add_digits(acc, cur)
                cur = times_g(cur)
            return acc

        self._weights = weights
        order = q - 1
        primes = _factor_int(order)
        for cand in range(2, q):
            powers = [1]
            x = 1
            for _ in range(order - 1):
                x = mul_slow(x, cand)
                powers.append(x)
            if mul_slow(powers[-1], cand) != 1:
                continue
            if all(powers[order // r] != 1 for r in primes):
                break
        else:  # pragma: no cover - every finite field has a generator
            raise FieldError("no primitive element found")
        self.primitive = cand
        self._exp = powers + powers
        self._log = [0] * q
        for i, x in enumerate(powers):
            self._log[x] = i
        self._neg = [self._digits_to_int(tuple((-c) % p for c in d)) for d in digits]

    def _add_digits(self, a: int, b: int) -> int:
        p = self.p
        da, db = self._digits[a], self._digits[b]
        return sum(((x + y) % p) * w for x, y, w in zip(da, db, self._weights))

    def _digits_to_int(self, d: tuple[int, ...]) -> int:
        return sum(c * self.p**i for i, c in enumerate(d))

    # -- arithmetic ---------------------------------------------------
    def add(self, a: int, b: int) -> int:
        if self.k == 1:
            return (a + b) % self.p
        if a == 0:
            return b
        if b == 0:
            return a
        return self._add_digits(a, b)

    def neg(self, a: int) -> int:
        if self.k == 1:
            return (-a) % self.p
        return self._neg[a]

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.k == 1:
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in finite field")
        if self.k == 1:
            return pow(a, self.p - 2, self.p)
        return self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, n: int) -> int:
        if n == 0:
            return 1
        if a == 0:
            if n < 0:
                raise ZeroDivisionError("negative power of zero")
            return 0
        if self.k == 1:
            return pow(a, n % (self.p - 1), self.p) if n < 0 else pow(a, n, self.p)
        return self._exp[(self._log[a] * n) % (self.q - 1)]

    def frob(self, a: int, times: int = 1) -> int:
        return self.pow(a, self.p ** (times % self.k) if self.k > 1 else 1)

    def from_int(self, n: int) -> int:
        """Image of an integer under Z -> F_p -> F_q."""
        return n % self.p

    def order(self, a: int) -> int:
        """Multiplicative order of a nonzero element."""
        if a == 0:
            raise FieldError("zero has no multiplicative order")
        n = self.q - 1
        for r in _factor_int(n):
            while n % r == 0 and self.pow(a, n // r) == 1:
                n //= r
        return n

    def elements(self) -> range:
        return range(self.q)

    @property
    def gen(self) -> int:
        """Root of the modulus (the symbol `g` in text)."""
        if self.k == 1:
            return (-self.modulus[0]) % self.p
        return self.p

    def sqrt(self, a: int) -> int | None:
        for x in range(self.q):
            if self.mul(x, x) == a:
                return x
        return None

    # -- text ---------------------------------------------------------
    def element_str(self, a: int) -> str:
        if self.k == 1:
            return str(a)
        d = self._digits[a]
        parts = []
        for i in range(self.k - 1, -1, -1):
            c = d[i]
            if c == 0:
                continue
            if i == 0:
                parts.append(str(c))
            else:
                mon = "g" if i == 1 else f"g^{i}"
                parts.append(mon if c == 1 else f"{c}*{mon}")
        return " + ".join(parts) if parts else "0"

    def modulus_str(self) -> str:
        return _poly_str_prime(self.modulus, "t")

    def spec(self) -> dict:
        return {"p": self.p, "k": self.k, "modulus": self.modulus_str()}

    def __repr__(self) -> str:
        return f"GF({self.p}^{self.k})" if self.k > 1 else f"GF({self.p})"

    def __reduce__(self):
        return (gf, (self.p, self.k, self.modulus))


def gf(p: int, k: int = 1, modulus: tuple[int, ...] | None = None) -> GF:
    """Cached field instance; equal specifications give the identical object."""
    if modulus is None:
        modulus = default_modulus(p, k)
    return _gf_cached(p, k, tuple(int(c) % p for c in modulus) if is_prime(p) else tuple(modulus))


@lru_cache(maxsize=None)
def _gf_cached(p: int, k: int, modulus: tuple[int, ...]) -> GF:
    return GF(p, k, modulus)


def default_modulus(p: int, k: int) -> tuple[int, ...]:
    if k == 1:
        return (0, 1)
    if (p, k) in MODULUS_TABLE:
        return MODULUS_TABLE[(p, k)]
    return least_irreducible(p, k)


def least_irreducible(p: int, k: int) -> tuple[int, ...]:
    """Search for the least monic irreducible of degree k by integer encoding."""
    for code in range(p**k):
        coeffs = tuple((code // p**i) % p for i in range(k)) + (1,)
        if _is_irreducible_prime_field(p, coeffs):
            return coeffs
    raise FieldError("no irreducible found")  # pragma: no cover


def _is_irreducible_prime_field(p: int, f: tuple[int, ...]) -> bool:
    """Rabin-style test over F_p using x^(p^i) mod f."""
    n = len(f) - 1
    if n == 1:
        return True
    if f[0] == 0:
        return False

    def mulmod(a, b):
        prod = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] = (prod[i + j] + x * y) % p
        for i in range(len(prod) - 1, n - 1, -1):
            c = prod[i]
            if c:
                for j in range(n + 1):
                    prod[i - n + j] = (prod[i - n + j] - c * f[j]) % p
        prod = prod[:n]
        while prod and prod[-1] == 0:
            prod.pop()
        return prod

    def powmod(a, e):
        result, base = [1], a
        while e:
            if e & 1:
                result = mulmod(result, base)
            base = mulmod(base, base)
            e >>= 1
        return result

    def gcd(a, b):
        a, b = list(a), list(b)
        while b:
            while len(a) >= len(b) and a:
                c = a[-1] * pow(b[-1], p - 2, p) % p
                s = len(a) - len(b)
                for j, y in enumerate(b):
                    a[s + j] = (a[s + j] - c * y) % p
                while a and a[-1] == 0:
                    a.pop()
            a, b = b, a
        return a

    x = [0, 1]
    xp = x
    for i in range(1, n // 2 + 1):
        xp = powmod(xp, p)
        diff = list(xp) + [0] * max(0, 2 - len(xp))
        diff[1] = (diff[1] - 1) % p
        while diff and diff[-1] == 0:
            diff.pop()
        if len(gcd(list(f), diff)) > 1:
            return False
    return True


def _poly_str_prime(coeffs: tuple[int, ...], var: str) -> str:
    parts = []
    for i in range(len(coeffs) - 1, -1, -1):
        c = coeffs[i]
        if c == 0:
            continue
        if i == 0:
            parts.append(str(c))
            continue
        mon = var if i == 1 else f"{var}^{i}"
        parts.append(mon if c == 1 else f"{c}*{mon}")
    return " + ".join(parts) if parts else "0"


@dataclass(frozen=True)
class FqElement:
    """A field element bundled with its field, for public-facing APIs."""

    field: GF
    value: int

    def __add__(self, other: "FqElement") -> "FqElement":
        return FqElement(self.field, self.field.add(self.value, other.value))

    def __sub__(self, other: "FqElement") -> "FqElement":
        return FqElement(self.field, self.field.sub(self.value, other.value))

    def __mul__(self, other: "FqElement") -> "FqElement":
        return FqElement(self.field, self.field.mul(self.value, other.value))

    def __truediv__(self, other: "FqElement") -> "FqElement":
        return FqElement(self.field, self.field.div(self.value, other.value))

    def __neg__(self) -> "FqElement":
        return FqElement(self.field, self.field.neg(self.value))

    def __pow__(self, n: int) -> "FqElement":
        return FqElement(self.field, self.field.pow(self.value, n))

    def frobenius(self, times: int = 1) -> "FqElement":
        return FqElement(self.field, self.field.pow(self.value, self.field.p**times))

    @property
    def coeffs(self) -> tuple[int, ...]:
        f = self.field
        return tuple((self.value // f.p**i) % f.p for i in range(f.k))

    def __str__(self) -> str:
        return self.field.element_str(self.value)
