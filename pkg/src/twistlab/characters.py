"""Dirichlet characters with exact values in cyclotomic fields."""

from __future__ import annotations

import cmath
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd

from .arith import divisors, euler_phi, factorize, lcm


# -- cyclotomic numbers -----------------------------------------------------


def _poly_mul(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_divexact(num: list[int], den: list[int]) -> list[int]:
    """Exact division of integer polynomials, den monic (low degree first)."""
    num = list(num)
    q = [0] * (len(num) - len(den) + 1)
    for i in range(len(q) - 1, -1, -1):
        c = num[i + len(den) - 1]
        q[i] = c
        if c:
            for j, d in enumerate(den):
                num[i + j] -= c * d
    if any(num[: len(den) - 1]):
        raise ArithmeticError("inexact polynomial division")
    return q


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients of Phi_n, constant term first."""
    poly = [-1] + [0] * (n - 1) + [1]
    for d in divisors(n)[:-1]:
        poly = _poly_divexact(poly, list(cyclotomic_polynomial(d)))
    return tuple(poly)


def _reduce(coeffs: list[Fraction], n: int) -> tuple[Fraction, ...]:
    phi = cyclotomic_polynomial(n)
    deg = len(phi) - 1
    c = list(coeffs) + [Fraction(0)] * max(0, deg - len(coeffs))
    for i in range(len(c) - 1, deg - 1, -1):
        top = c[i]
        if top:
            for j in range(deg + 1):
                c[i - deg + j] -= top * phi[j]
    return tuple(c[:deg])


@dataclass(frozen=True)
class CyclotomicNumber:
    """Element of Q(zeta_n) in the power basis 1, zeta, ..., zeta^{phi(n)-1}."""

    order: int
    coeffs: tuple[Fraction, ...]

    @classmethod
    def rational(cls, c: int | Fraction, order: int = 1) -> "CyclotomicNumber":
        deg = euler_phi(order)
        return cls(order, (Fraction(c),) + (Fraction(0),) * (deg - 1))

    @classmethod
    def root_of_unity(cls, order: int, e: int) -> "CyclotomicNumber":
        e %= order
        basis = [Fraction(0)] * e + [Fraction(1)]
        return cls(order, _reduce(basis, order))

    def lift(self, order: int) -> "CyclotomicNumber":
        """Same element viewed in Q(zeta_order); order must be a multiple of self.order."""
        if order == self.order:
            return self
        if order % self.order:
            raise ValueError(f"Q(zeta_{self.order}) does not embed in Q(zeta_{order})")
        step = order // self.order
        spread = [Fraction(0)] * (step * (len(self.coeffs) - 1) + 1)
        for i, c in enumerate(self.coeffs):
            spread[i * step] = c
        return CyclotomicNumber(order, _reduce(spread, order))

    def _common(self, other: "CyclotomicNumber | int | Fraction"):
        if not isinstance(other, CyclotomicNumber):
            other = CyclotomicNumber.rational(other)
        n = lcm(self.order, other.order)
        return self.lift(n), other.lift(n), n

    def __add__(self, other):
        a, b, n = self._common(other)
        return CyclotomicNumber(n, tuple(x + y for x, y in zip(a.coeffs, b.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicNumber(self.order, tuple(-x for x in self.coeffs))

    def __sub__(self, other):
        return self + (-other if isinstance(other, CyclotomicNumber) else -Fraction(other))

    def __mul__(self, other):
        if not isinstance(other, CyclotomicNumber):
            c = Fraction(other)
            return CyclotomicNumber(self.order, tuple(x * c for x in self.coeffs))
        a, b, n = self._common(other)
        prod = [Fraction(0)] * (len(a.coeffs) + len(b.coeffs) - 1)
        for i, x in enumerate(a.coeffs):
            if x:
                for j, y in enumerate(b.coeffs):
                    prod[i + j] += x * y
        return CyclotomicNumber(n, _reduce(prod, n))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative powers are not supported")
        out = CyclotomicNumber.rational(1, self.order)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, (CyclotomicNumber, int, Fraction)):
            return NotImplemented
        a, b, _ = self._common(other)
        return a.coeffs == b.coeffs

    def __hash__(self) -> int:
        r = self.as_rational()
        return hash(r) if r is not None else hash((self.order, self.coeffs))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def as_rational(self) -> Fraction | None:
        if any(self.coeffs[1:]):
            return None
        return self.coeffs[0]

    def to_complex(self) -> complex:
        z = cmath.exp(2j * cmath.pi / self.order)
        return sum(complex(c) * z**i for i, c in enumerate(self.coeffs))

    def __repr__(self) -> str:
        r = self.as_rational()
        if r is not None:
            return f"CyclotomicNumber({r})"
        terms = [f"{c}*z^{i}" for i, c in enumerate(self.coeffs) if c]
        return f"CyclotomicNumber({' + '.join(terms)}, z=zeta_{self.order})"


# -- unit group structure ---------------------------------------------------


@lru_cache(maxsize=None)
def unit_group(q: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Generators of (Z/q)^* lifted to mod q, with their orders.

    One cyclic factor per odd prime power (smallest primitive root); for
    2^e the factors <-1> (e >= 2) and <5> (e >= 3).  Primes ascending.
    """
    gens: list[int] = []
    orders: list[int] = []
    if q <= 2:
        return (), ()
    fac = factorize(q)
    for p, e in sorted(fac.items()):
        pe = p**e
        rest = q // pe
        local: list[tuple[int, int]] = []
        if p == 2:
            if e >= 2:
                local.append((pe - 1, 2))
            if e >= 3:
                local.append((5, 2 ** (e - 2)))
        else:
            phi = pe // p * (p - 1)
            local.append((_primitive_root(p, e), phi))
        for g, o in local:
            gens.append(_crt(g, pe, 1, rest))
            orders.append(o)
    return tuple(gens), tuple(orders)


def _primitive_root(p: int, e: int) -> int:
    pe = p**e
    phi = pe // p * (p - 1)
    primes = list(factorize(phi))
    for g in range(2, pe):
        if gcd(g, p) == 1 and all(pow(g, phi // r, pe) != 1 for r in primes):
            return g
    raise ArithmeticError(f"no primitive root mod {pe}")


def _crt(a: int, m: int, b: int, n: int) -> int:
    if n == 1:
        return a % m
    return (a + m * ((b - a) * pow(m, -1, n) % n)) % (m * n)


@lru_cache(maxsize=None)
def _discrete_logs(q: int) -> dict[int, tuple[int, ...]]:
    gens, orders = unit_group(q)
    table: dict[int, tuple[int, ...]] = {}
    for exps in itertools.product(*(range(o) for o in orders)):
        x = 1
        for g, e in zip(gens, exps):
            x = x * pow(g, e, q) % q
        table[x % q] = exps
    if q == 1:
        table = {0: ()}
    return table


# -- characters ---------------------------------------------------------------


@dataclass(frozen=True)
class DirichletCharacter:
    """chi mod q given by chi(g_i) = zeta_{ord_i}^{e_i} on the generators of
    :func:`unit_group`."""

    modulus: int
    generator_exponents: tuple[int, ...]
    order: int = field(init=False, compare=False)
    conductor: int = field(init=False, compare=False)

    def __post_init__(self) -> None:
        _, orders = unit_group(self.modulus)
        if len(orders) != len(self.generator_exponents):
            raise ValueError(f"mod {self.modulus} needs {len(orders)} exponents")
        o = 1
        for e, n in zip(self.generator_exponents, orders):
            o = lcm(o, n // gcd(e % n, n))
        object.__setattr__(self, "order", o)
        object.__setattr__(self, "conductor", _conductor(self))

    def _exponent(self, n: int) -> int | None:
        """t with chi(n) = zeta_order^t, or None when gcd(n, q) > 1."""
        q = self.modulus
        if gcd(n, q) != 1:
            return None
        logs = _discrete_logs(q)[n % q]
        _, orders = unit_group(q)
        big = lcm(*orders) if orders else 1
        t = sum(x * e * (big // o) for x, e, o in zip(logs, self.generator_exponents, orders))
        return (t // (big // self.order)) % self.order

    def __call__(self, n: int) -> CyclotomicNumber:
        return char_value(self, n)

    def real_value(self, n: int) -> int:
        """chi(n) as an integer; only for characters of order <= 2."""
        if self.order > 2:
            raise ValueError("character is not real-valued")
        t = self._exponent(n)
        if t is None:
            return 0
        return -1 if t else 1

    def is_trivial(self) -> bool:
        return self.order == 1

    def label(self) -> str:
        return f"chi_{self.modulus}{list(self.generator_exponents)}"

    def to_dict(self) -> dict:
        return {
            "modulus": self.modulus,
            "exponents": list(self.generator_exponents),
            "conductor": self.conductor,
            "order": self.order,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DirichletCharacter":
        return cls(d["modulus"], tuple(d["exponents"]))


def char_value(chi: DirichletCharacter, n: int) -> CyclotomicNumber:
    t = chi._exponent(n)
    if t is None:
        return CyclotomicNumber.rational(0, chi.order)
    return CyclotomicNumber.root_of_unity(chi.order, t)


def enumerate_characters(q: int) -> list[DirichletCharacter]:
    """All phi(q) characters mod q, lexicographic in the generator exponents."""
    if q < 1:
        raise ValueError("modulus must be positive")
    _, orders = unit_group(q)
    return [DirichletCharacter(q, exps) for exps in itertools.product(*(range(o) for o in orders))]


def is_quadratic(chi: DirichletCharacter) -> bool:
    return chi.order <= 2


def conductor(chi: DirichletCharacter) -> int:
    return chi.conductor


def _conductor(chi: DirichletCharacter) -> int:
    q = chi.modulus
    for m in divisors(q):
        if all(
            chi._exponent(n) == 0
            for n in range(1, q + 1, m)
            if gcd(n, q) == 1
        ):
            return m
    return q


def trivial_character(q: int = 1) -> DirichletCharacter:
    return DirichletCharacter(q, (0,) * len(unit_group(q)[1]))


def quadratic_characters(q: int, primitive_only: bool = False) -> list[DirichletCharacter]:
    """Characters of order exactly 2 mod q."""
    out = [c for c in enumerate_characters(q) if c.order == 2]
    if primitive_only:
        out = [c for c in out if c.conductor == q]
    return out
