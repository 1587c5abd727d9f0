"""Exact truncated q-expansions.

A :class:`QSeries` holds the coefficients c_0..c_B of a power series in q
with rational coefficients.  Internally the coefficients are kept as a tuple
of integer numerators over one positive common denominator, so that products
can be computed with a single big-integer multiplication (Kronecker
substitution through GMP) instead of a quadratic Python loop.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Sequence

import gmpy2
from gmpy2 import mpz

from .arith import lcm


class SeriesError(ValueError):
    pass


class QSeries:
    """Truncated power series sum_{n<=B} c_n q^n with exact rational coefficients."""

    __slots__ = ("_num", "_den")

    def __init__(self, coeffs: Iterable[int | Fraction] = (0,), precision: int | None = None):
        coeffs = list(coeffs)
        if precision is not None:
            coeffs = coeffs[: precision + 1] + [0] * (precision + 1 - len(coeffs))
        if not coeffs:
            raise SeriesError("a QSeries needs at least the constant coefficient")
        den = lcm(*(Fraction(c).denominator for c in coeffs)) if any(
            isinstance(c, Fraction) for c in coeffs
        ) else 1
        if den == 1:
            num = tuple(int(c) for c in coeffs)
        else:
            num = tuple(int(Fraction(c) * den) for c in coeffs)
        self._set(num, den)

    def _set(self, num: tuple[int, ...], den: int) -> None:
        if den != 1:
            g = gcd(den, *num)
            if g > 1:
                num = tuple(c // g for c in num)
                den //= g
        self._num = num
        self._den = den

    @classmethod
    def _raw(cls, num: Sequence[int], den: int = 1) -> "QSeries":
        out = cls.__new__(cls)
        out._set(tuple(num), den)
        return out

    @classmethod
    def one(cls, precision: int) -> "QSeries":
        return cls._raw((1,) + (0,) * precision)

    @classmethod
    def zero(cls, precision: int) -> "QSeries":
        return cls._raw((0,) * (precision + 1))

    @classmethod
    def from_sparse(cls, terms: dict[int, int], precision: int) -> "QSeries":
        num = [0] * (precision + 1)
        for e, c in terms.items():
            if 0 <= e <= precision:
                num[e] += c
        return cls._raw(num)

    # -- accessors ---------------------------------------------------------

    @property
    def precision(self) -> int:
        return len(self._num) - 1

    @property
    def coeffs(self) -> list[Fraction]:
        d = self._den
        return [Fraction(c, d) for c in self._num]

    @property
    def denominator(self) -> int:
        return self._den

    def is_integral(self) -> bool:
        return self._den == 1

    def integer_coeffs(self) -> list[int]:
        if self._den != 1:
            raise SeriesError("series has non-integral coefficients")
        return list(self._num)

    def __len__(self) -> int:
        return len(self._num)

    def __getitem__(self, n: int) -> int | Fraction:
        if self._den == 1:
            return self._num[n]
        return Fraction(self._num[n], self._den)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QSeries):
            return NotImplemented
        return self._den == other._den and self._num == other._num

    def __hash__(self) -> int:
        return hash((self._num, self._den))

    def __repr__(self) -> str:
        shown = ", ".join(str(c) for c in self.coeffs[:8])
        more = ", ..." if self.precision >= 8 else ""
        return f"QSeries([{shown}{more}], precision={self.precision})"

    def truncate(self, precision: int) -> "QSeries":
        if precision > self.precision:
            raise SeriesError("cannot extend a truncated series")
        return QSeries._raw(self._num[: precision + 1], self._den)

    def shift(self, offset: int) -> "QSeries":
        """Multiply by q^offset (offset >= 0), keeping the precision."""
        if offset < 0:
            raise SeriesError("negative shifts would need Laurent series")
        num = ((0,) * offset + self._num)[: len(self._num)]
        return QSeries._raw(num, self._den)

    # -- ring operations ---------------------------------------------------

    def __add__(self, other: "QSeries") -> "QSeries":
        return series_add(self, other)

    def __sub__(self, other: "QSeries") -> "QSeries":
        return series_add(self, -other)

    def __neg__(self) -> "QSeries":
        return QSeries._raw([-c for c in self._num], self._den)

    def __mul__(self, other: "QSeries | int | Fraction") -> "QSeries":
        if isinstance(other, QSeries):
            return series_mul(self, other)
        return self.scale(other)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "QSeries":
        return series_pow(self, e)

    def scale(self, c: int | Fraction) -> "QSeries":
        c = Fraction(c)
        return QSeries._raw([x * c.numerator for x in self._num], self._den * c.denominator)


def series_add(a: QSeries, b: QSeries) -> QSeries:
    n = min(a.precision, b.precision) + 1
    if a._den == b._den:
        return QSeries._raw([x + y for x, y in zip(a._num[:n], b._num[:n])], a._den)
    d = lcm(a._den, b._den)
    fa, fb = d // a._den, d // b._den
    return QSeries._raw([x * fa + y * fb for x, y in zip(a._num[:n], b._num[:n])], d)


def _pack_signed(values: Sequence[int], width: int) -> mpz:
    pos = gmpy2.pack([v if v > 0 else 0 for v in values], width)
    neg = gmpy2.pack([-v if v < 0 else 0 for v in values], width)
    return pos - neg


def int_poly_mul(a: Sequence[int], b: Sequence[int], precision: int) -> list[int]:
    """First precision+1 coefficients of the product of two integer sequences.

    Uses Kronecker substitution: both sequences are packed into one big
    integer at a bit width wide enough for every product coefficient, the
    integers are multiplied by GMP, and the digits are read back with a
    balanced offset so that negative coefficients survive.
    """
    a = a[: precision + 1]
    b = b[: precision + 1]
    ma = max(map(abs, a), default=0)
    mb = max(map(abs, b), default=0)
    if ma == 0 or mb == 0:
        return [0] * (precision + 1)
    if len(a) * len(b) <= 256:
        out = [0] * (precision + 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b[: precision + 1 - i]):
                    out[i + j] += x * y
        return out
    width = (ma * mb * min(len(a), len(b))).bit_length() + 2
    big_a = _pack_signed(a, width)
    big_b = big_a if a is b else _pack_signed(b, width)
    half = mpz(1) << (width - 1)
    offset = gmpy2.pack([half] * (precision + 1), width)
    low = (big_a * big_b + offset) % (mpz(1) << (width * (precision + 1)))
    digits = gmpy2.unpack(low, width)
    h = int(half)
    out = [int(x) - h for x in digits[: precision + 1]]
    out.extend([-h] * (precision + 1 - len(out)))
    return out


def series_mul(a: QSeries, b: QSeries) -> QSeries:
    n = min(a.precision, b.precision)
    num = int_poly_mul(a._num, a._num if a is b else b._num, n)
    return QSeries._raw(num, a._den * b._den)


def series_pow(a: QSeries, e: int) -> QSeries:
    if e < 0:
        return series_pow(series_inverse(a), -e)
    result = QSeries.one(a.precision)
    base = a
    while e:
        if e & 1:
            result = series_mul(result, base)
        e >>= 1
        if e:
            base = series_mul(base, base)
    return result


def series_inverse(a: QSeries) -> QSeries:
    """Multiplicative inverse; requires a nonzero constant term.

    Plain recurrence that skips zero coefficients, so sparse inputs such as
    the pentagonal series invert in O(B sqrt B).
    """
    c0 = a[0]
    if c0 == 0:
        raise SeriesError("series with zero constant term has no inverse")
    coeffs = a.coeffs
    support = [(i, c) for i, c in enumerate(coeffs) if i > 0 and c != 0]
    inv0 = 1 / Fraction(c0)
    out: list[Fraction] = [inv0]
    for n in range(1, a.precision + 1):
        s = Fraction(0)
        for i, c in support:
            if i > n:
                break
            s += c * out[n - i]
        out.append(-s * inv0)
    return QSeries(out)


def pentagonal_product(precision: int, step: int = 1) -> QSeries:
    """prod_{n>=1} (1 - q^{step*n}) via Euler's pentagonal number theorem."""
    terms: dict[int, int] = {0: 1}
    k = 1
    while True:
        e1 = step * k * (3 * k - 1) // 2
        if e1 > precision:
            break
        sign = -1 if k % 2 else 1
        terms[e1] = sign
        e2 = step * k * (3 * k + 1) // 2
        if e2 <= precision:
            terms[e2] = sign
        k += 1
    return QSeries.from_sparse(terms, precision)


def eta_quotient(spec: Sequence[tuple[int, int]], B: int) -> QSeries:
    """q-expansion of prod_d eta(d tau)^{e_d}, truncated at q^B.

    ``spec`` is a list of (d, e_d).  The leading power q^{sum d e_d / 24} is
    folded into the coefficients, so it must be a non-negative integer.
    """
    twice_24 = sum(d * e for d, e in spec)
    if twice_24 % 24:
        raise SeriesError(f"eta quotient {list(spec)} has non-integral q-offset {twice_24}/24")
    offset = twice_24 // 24
    if offset < 0:
        raise SeriesError(f"eta quotient {list(spec)} has a pole at the cusp")
    for d, _ in spec:
        if d < 1:
            raise SeriesError(f"eta quotient level factor must be positive, got {d}")
    if offset > B:
        return QSeries.zero(B)
    body_prec = B - offset
    result = QSeries.one(body_prec)
    for d, e in spec:
        if e == 0:
            continue
        factor = pentagonal_product(body_prec, d)
        if e < 0:
            factor = series_inverse(factor)
        result = series_mul(result, series_pow(factor, abs(e)))
    return QSeries._raw((0,) * offset + result._num, result._den)


def divisor_sigma_table(power: int, B: int) -> list[int]:
    sig = [0] * (B + 1)
    for d in range(1, B + 1):
        dp = d**power
        for m in range(d, B + 1, d):
            sig[m] += dp
    return sig


@lru_cache(maxsize=8)
def eisenstein(k: int, B: int) -> QSeries:
    """Normalized level-one Eisenstein series E_4 or E_6."""
    if k == 4:
        c, power = 240, 3
    elif k == 6:
        c, power = -504, 5
    else:
        raise SeriesError(f"only E_4 and E_6 are provided, got weight {k}")
    sig = divisor_sigma_table(power, B)
    return QSeries._raw([1] + [c * s for s in sig[1:]])
