"""Dense univariate polynomials over a finite field.

A polynomial is a tuple of field-element ints, lowest degree first, with no
trailing zeros; the zero polynomial is ().  Every function takes the field
as its first argument.
"""

from __future__ import annotations

import random
from functools import lru_cache

from .fields import GF

Poly = tuple

ZERO: Poly = ()
ONE: Poly = (1,)
X: Poly = (0, 1)


def trim(c) -> Poly:
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def deg(a: Poly) -> int:
    return len(a) - 1


def const(F: GF, c: int) -> Poly:
    return (c,) if c else ()


def monomial(c: int, n: int) -> Poly:
    return (0,) * n + (c,) if c else ()


def add(F: GF, a: Poly, b: Poly) -> Poly:
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return a
    if F.k == 1:
        p = F.p
        out = [(x + y) % p for x, y in zip(a, b)]
    else:
        out = [F.add(x, y) for x, y in zip(a, b)]
    out.extend(a[len(b):])
    return trim(out)


def neg(F: GF, a: Poly) -> Poly:
    if F.k == 1:
        p = F.p
        return tuple((-x) % p for x in a)
    return tuple(F.neg(x) for x in a)


def sub(F: GF, a: Poly, b: Poly) -> Poly:
    return add(F, a, neg(F, b))


def scale(F: GF, a: Poly, c: int) -> Poly:
    if c == 0:
        return ()
    if c == 1:
        return a
    if F.k == 1:
        p = F.p
        return tuple(x * c % p for x in a)
    return tuple(F.mul(x, c) for x in a)


def mul(F: GF, a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return ()
    if len(a) == 1:
        return scale(F, b, a[0])
    if len(b) == 1:
        return scale(F, a, b[0])
    if F.k == 1:
        p = F.p
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return trim(v % p for v in out)
    out = [0] * (len(a) + len(b) - 1)
    fm, fa = F.mul, F.add
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] = fa(out[i + j], fm(x, y))
    return trim(out)


def divmod_(F: GF, a: Poly, b: Poly) -> tuple[Poly, Poly]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    if len(a) < len(b):
        return (), a
    r = list(a)
    db = len(b) - 1
    inv_lead = F.inv(b[-1])
    qt = [0] * (len(a) - db)
    if F.k == 1:
        p = F.p
        for i in range(len(a) - 1, db - 1, -1):
            c = r[i] % p
            if c:
                c = c * inv_lead % p
                qt[i - db] = c
                s = i - db
                for j, y in enumerate(b):
                    r[s + j] = (r[s + j] - c * y) % p
        return trim(qt), trim(x % p for x in r[:db])
    for i in range(len(a) - 1, db - 1, -1):
        c = r[i]
        if c:
            c = F.mul(c, inv_lead)
            qt[i - db] = c
            s = i - db
            for j, y in enumerate(b):
                if y:
                    r[s + j] = F.sub(r[s + j], F.mul(c, y))
    return trim(qt), trim(r[:db])


def rem(F: GF, a: Poly, b: Poly) -> Poly:
    return divmod_(F, a, b)[1]


def exact_div(F: GF, a: Poly, b: Poly) -> Poly:
    q, r = divmod_(F, a, b)
    if r:
        raise ArithmeticError("inexact polynomial division")
    return q


def monic(F: GF, a: Poly) -> Poly:
    if not a or a[-1] == 1:
        return a
    return scale(F, a, F.inv(a[-1]))


def gcd(F: GF, a: Poly, b: Poly) -> Poly:
    while b:
        a, b = b, rem(F, a, b)
    return monic(F, a)


def xgcd(F: GF, a: Poly, b: Poly) -> tuple[Poly, Poly, Poly]:
    """Return (g, s, t) with s*a + t*b = g monic."""
    r0, r1 = a, b
    s0, s1 = ONE, ()
    t0, t1 = (), ONE
    while r1:
        q, r = divmod_(F, r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, sub(F, s0, mul(F, q, s1))
        t0, t1 = t1, sub(F, t0, mul(F, q, t1))
    if not r0:
        return (), (), ()
    c = F.inv(r0[-1])
    return scale(F, r0, c), scale(F, s0, c), scale(F, t0, c)


def pow_(F: GF, a: Poly, n: int) -> Poly:
    if n < 0:
        raise ValueError("negative polynomial power")
    p = F.p
    result = ONE
    base = a
    # peel off Frobenius powers: a^(p*m) = frob(a)^m
    while n and n % p == 0:
        base = frobenius(F, base)
        n //= p
    while n:
        if n & 1:
            result = mul(F, result, base)
        n >>= 1
        if n:
            base = mul(F, base, base)
    return result


def frobenius(F: GF, a: Poly, times: int = 1) -> Poly:
    """a^(p^times) computed coefficientwise."""
    p = F.p
    e = p**times
    if not a:
        return a
    out = [0] * ((len(a) - 1) * e + 1)
    for i, c in enumerate(a):
        if c:
            out[i * e] = F.pow(c, e) if F.k > 1 else c
    return tuple(out)


def pth_root(F: GF, a: Poly) -> Poly | None:
    """The polynomial b with b^p = a, or None if a is not a p-th power."""
    p = F.p
    if any(c for i, c in enumerate(a) if i % p):
        return None
    inv_exp = F.q // p  # x -> x^(q/p) inverts Frobenius on F_q
    return trim(F.pow(a[i], inv_exp) if F.k > 1 else a[i] for i in range(0, len(a), p))


def derivative(F: GF, a: Poly) -> Poly:
    return trim(F.mul(F.from_int(i), c) for i, c in enumerate(a) if i > 0)


def evaluate(F: GF, a: Poly, x: int) -> int:
    acc = 0
    for c in reversed(a):
        acc = F.add(F.mul(acc, x), c)
    return acc


def compose(F: GF, a: Poly, b: Poly) -> Poly:
    acc: Poly = ()
    for c in reversed(a):
        acc = add(F, mul(F, acc, b), const(F, c))
    return acc


def powmod(F: GF, a: Poly, n: int, m: Poly) -> Poly:
    result = ONE
    base = rem(F, a, m)
    while n:
        if n & 1:
            result = rem(F, mul(F, result, base), m)
        n >>= 1
        if n:
            base = rem(F, mul(F, base, base), m)
    return result


# -- factorization ------------------------------------------------------

def squarefree_decomposition(F: GF, f: Poly) -> list[tuple[Poly, int]]:
    """Monic squarefree factors with multiplicities (Yun's method adapted to char p)."""
    f = monic(F, f)
    out: list[tuple[Poly, int]] = []
    if deg(f) < 1:
        return out
    df = derivative(F, f)
    if not df:
        root = pth_root(F, f)
        return [(g, m * F.p) for g, m in squarefree_decomposition(F, root)]
    c = gcd(F, f, df)
    w = exact_div(F, f, c)
    i = 1
    while deg(w) > 0:
        y = gcd(F, w, c)
        z = exact_div(F, w, y)
        if deg(z) > 0:
            out.append((z, i))
        i += 1
        w = y
        c = exact_div(F, c, y)
    if deg(c) > 0:
        root = pth_root(F, c)
        out.extend((g, m * F.p) for g, m in squarefree_decomposition(F, root))
    return out


def distinct_degree(F: GF, f: Poly) -> list[tuple[Poly, int]]:
    out = []
    q = F.q
    h = X
    i = 0
    f_rest = f
    while deg(f_rest) >= 2 * (i + 1):
        i += 1
        h = powmod(F, h, q, f_rest)
        g = gcd(F, f_rest, sub(F, h, X))
        if deg(g) > 0:
            out.append((g, i))
            f_rest = exact_div(F, f_rest, g)
            h = rem(F, h, f_rest)
    if deg(f_rest) > 0:
        out.append((f_rest, deg(f_rest)))
    return out


def equal_degree(F: GF, f: Poly, d: int, rng: random.Random) -> list[Poly]:
    n = deg(f)
    if n == d:
        return [f]
    q = F.q
    while True:
        a = trim(rng.randrange(q) for _ in range(n))
        if deg(a) < 1:
            continue
        if F.p == 2:
            # trace map a + a^2 + ... + a^(2^(kd-1))
            b = a
            acc = a
            for _ in range(F.k * d - 1):
                b = rem(F, mul(F, b, b), f)
                acc = add(F, acc, b)
            cand = acc
        else:
            cand = sub(F, powmod(F, a, (q**d - 1) // 2, f), ONE)
        g = gcd(F, f, cand)
        if 0 < deg(g) < n:
            return equal_degree(F, g, d, rng) + equal_degree(F, exact_div(F, f, g), d, rng)


def factor(F: GF, f: Poly) -> tuple[int, list[tuple[Poly, int]]]:
    """Return (leading coefficient, sorted list of (monic irreducible, multiplicity))."""
    if not f:
        raise ValueError("cannot factor the zero polynomial")
    return f[-1], list(_factor_monic(F, monic(F, f)))


@lru_cache(maxsize=65536)
def _factor_monic_cached(F: GF, f: Poly) -> tuple[tuple[Poly, int], ...]:
    rng = random.Random(0x5EED)
    counts: dict[Poly, int] = {}
    for g, m in squarefree_decomposition(F, f):
        for h, d in distinct_degree(F, g):
            for irr in equal_degree(F, h, d, rng):
                counts[irr] = counts.get(irr, 0) + m
    return tuple(sorted(counts.items(), key=lambda kv: (len(kv[0]), kv[0][::-1])))


def _factor_monic(F: GF, f: Poly):
    if deg(f) < 1:
        return ()
    return _factor_monic_cached(F, f)


def is_irreducible(F: GF, f: Poly) -> bool:
    if deg(f) < 1:
        return False
    fac = _factor_monic(F, monic(F, f))
    return len(fac) == 1 and fac[0][1] == 1


def poly_key(a: Poly) -> tuple:
    """Sort key: by degree, then coefficients from the top."""
    return (len(a), a[::-1])


# -- text ---------------------------------------------------------------

def to_str(F: GF, a: Poly, var: str = "t") -> str:
    if not a:
        return "0"
    parts = []
    for i in range(len(a) - 1, -1, -1):
        c = a[i]
        if c == 0:
            continue
        cs = F.element_str(c)
        compound = " + " in cs
        if i == 0:
            parts.append(f"({cs})" if compound and len(a) > 1 else cs)
            continue
        mon = var if i == 1 else f"{var}^{i}"
        if c == 1:
            parts.append(mon)
        else:
            parts.append(f"({cs})*{mon}" if compound else f"{cs}*{mon}")
    return " + ".join(parts)
