"""Slow, direct reference computations that share no code with the package."""

import math


def product_expansion(factors, B):
    """Coefficients of prod over (m, e) of prod_{n>=1} (1 - q^{mn})^e up to q^B.

    One binomial factor at a time; negative e divides by (1 - q^step).
    """
    c = [0] * (B + 1)
    c[0] = 1
    for m, e in factors:
        for n in range(1, B // m + 1):
            step = m * n
            for _ in range(abs(e)):
                if e > 0:
                    for i in range(B, step - 1, -1):
                        c[i] -= c[i - step]
                else:
                    for i in range(step, B + 1):
                        c[i] += c[i - step]
    return c


def eta_product(spec, B):
    """q^{sum(m e)/24} prod (1 - q^{mn})^e, coefficients of q^0..q^B."""
    offset, rem = divmod(sum(m * e for m, e in spec), 24)
    assert rem == 0
    body = product_expansion(spec, B)
    return [0] * offset + body[: B + 1 - offset]


def sigma(k, n):
    return sum(d**k for d in range(1, n + 1) if n % d == 0)


def eisenstein(k, B):
    const = {4: 240, 6: -504}[k]
    return [1] + [const * sigma(k - 1, n) for n in range(1, B + 1)]


def mul(a, b, B):
    out = [0] * (B + 1)
    for i, x in enumerate(a[: B + 1]):
        if x:
            for j, y in enumerate(b[: B + 1 - i]):
                out[i + j] += x * y
    return out


def is_prime(n):
    return n >= 2 and all(n % d for d in range(2, math.isqrt(n) + 1))


def primes(n):
    return [p for p in range(2, n + 1) if is_prime(p)]


def dirichlet_sum(coeffs, s, N):
    """sum_{n<=N} a_n n^{-s}."""
    return sum(coeffs[n - 1] * n ** (-s) for n in range(1, N + 1))
