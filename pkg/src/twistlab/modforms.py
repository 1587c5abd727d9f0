"""Eigenform corpus: level-one forms from the Victor Miller basis, small-level
eta-quotient newforms, Hecke operators and coefficient-level Tate twists."""

from __future__ import annotations

import dataclasses
import io
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

from .arith import is_prime, prime_divisors, primes_upto, smallest_prime_factors
from .series import QSeries, eisenstein, eta_quotient, series_mul, series_pow

DEFAULT_BOUND = 10_000


class RangeError(IndexError):
    """Raised when a coefficient beyond the stored bound is requested."""


class CorpusError(ValueError):
    pass


@dataclass(frozen=True)
class NewformRecord:
    """A normalized eigenform with rational coefficients a_1..a_B.

    ``cm`` stands in for the monodromy hypothesis: non-CM forms have
    connected (GL_2) monodromy.  ``synthetic`` marks data produced by
    :func:`synthesize_tate_twist` or a character twist; such records need
    not come from a genuine newform and are skipped by purity checks.
    """

    id: str
    weight: int
    level: int
    cm: bool
    coeffs: tuple[int, ...]
    nebentypus: str = "trivial"
    coefficient_field: str = "Q"
    synthetic: bool = False
    root_number: int | None = None
    root_number_source: str | None = None

    @property
    def bound(self) -> int:
        return len(self.coeffs)

    def a(self, n: int) -> int:
        if n < 1 or n > len(self.coeffs):
            raise RangeError(f"a_{n} of {self.id} is outside the stored range 1..{self.bound}")
        return self.coeffs[n - 1]

    def eps(self, p: int) -> int:
        """Value of the (trivial) nebentypus at p, zero at primes dividing the level."""
        return 0 if self.level % p == 0 else 1

    def is_good(self, p: int) -> bool:
        return self.level % p != 0

    def as_series(self, precision: int | None = None) -> QSeries:
        B = self.bound if precision is None else min(precision, self.bound)
        return QSeries._raw((0,) + self.coeffs[:B])

    def __repr__(self) -> str:
        return (
            f"NewformRecord(id={self.id!r}, weight={self.weight}, level={self.level}, "
            f"cm={self.cm}, synthetic={self.synthetic}, bound={self.bound})"
        )


# -- level one -------------------------------------------------------------


def dim_cusp_forms_level_one(k: int) -> int:
    if k < 12 or k % 2:
        return 0
    d = k // 12
    return d - 1 if k % 12 == 2 else d


_E_MONOMIAL = {0: (0, 0), 4: (1, 0), 6: (0, 1), 8: (2, 0), 10: (1, 1), 14: (2, 1)}


@lru_cache(maxsize=4)
def delta_series(B: int) -> QSeries:
    return eta_quotient([(1, 24)], B)


def victor_miller_basis(k: int, B: int) -> list[QSeries]:
    """Basis f_1..f_d of S_k(SL_2(Z)) with a_j(f_i) = delta_ij for i, j <= d.

    Starts from the monomials Delta^j E_6^{2(d-j)} E_4^a E_6^b (each q^j + ...)
    and clears the entries above the diagonal.
    """
    d = dim_cusp_forms_level_one(k)
    if d == 0:
        return []
    if B < d:
        raise CorpusError(f"precision {B} is below the dimension {d} of S_{k}")
    a, b = _E_MONOMIAL[k - 12 * d]
    delta = delta_series(B)
    e4 = eisenstein(4, B)
    e6 = eisenstein(6, B)
    tail = series_mul(series_pow(e4, a), series_pow(e6, b))
    e6_sq = series_mul(e6, e6)
    gens = []
    delta_pow = delta
    for j in range(1, d + 1):
        gens.append(series_mul(series_mul(delta_pow, series_pow(e6_sq, d - j)), tail))
        if j < d:
            delta_pow = series_mul(delta_pow, delta)
    basis = [None] * d
    for i in range(d - 1, -1, -1):
        f = gens[i]
        for j in range(i + 1, d):
            c = f[j + 1]
            if c:
                f = f - basis[j].scale(c)
        basis[i] = f
    return basis


# -- Hecke operators -------------------------------------------------------


def hecke_tp(f: QSeries, k: int, N: int, eps, p: int) -> QSeries:
    """Apply T_p (U_p when p | N) to a q-expansion; output precision floor(B/p).

    ``eps`` is the nebentypus: a callable n -> value, or the tag "trivial".
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if eps == "trivial" or eps is None:
        eps_p = 0 if N % p == 0 else 1
    else:
        eps_p = 0 if N % p == 0 else eps(p)
    prec = f.precision // p
    c = f._num
    pk = eps_p * p ** (k - 1)
    out = list(c[: prec * p + 1 : p])
    if pk:
        for n in range(0, prec + 1, p):
            out[n] += pk * c[n // p]
    return QSeries._raw(out, f.denominator)


def sturm_bound(k: int, N: int) -> int:
    """floor(k [SL_2(Z):Gamma_0(N)] / 12), never below 1."""
    if k < 1 or N < 1:
        raise ValueError("weight and level must be positive")
    num, den = N, 1
    for p in prime_divisors(N):
        num *= p + 1
        den *= p
    return max(1, (k * num) // (12 * den))


def eigen_ap(f: NewformRecord, p: int) -> int:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    return f.a(p)


# -- corpus ----------------------------------------------------------------

# (id, level, eta spec, cm, congruence describing the vanishing primes)
_ETA_FORMS = (
    ("11.2", 11, ((1, 2), (11, 2)), False, None),
    ("20.2", 20, ((2, 2), (10, 2)), False, None),
    ("27.2cm", 27, ((3, 2), (9, 2)), True, (3, 2)),
    ("32.2cm", 32, ((4, 2), (8, 2)), True, (4, 3)),
    ("36.2cm", 36, ((6, 4),), True, (3, 2)),
)

LEVEL_ONE_WEIGHTS = (12, 16, 18, 20, 22, 26)

# Vanishing congruence (m, c): a_p = 0 exactly for good p = c mod m.
CM_CONGRUENCES = {fid: cong for fid, _, _, cm, cong in _ETA_FORMS if cm}

# Root numbers.  Level one: (-1)^{k/2}.  Eta forms: calibrated once with
# lfunc.calibrate_root_number (see tests/test_lfunc.py for the re-run).
ETA_ROOT_NUMBERS = {"11.2": 1, "20.2": 1, "27.2cm": 1, "32.2cm": 1, "36.2cm": 1}

ALIASES = {"delta": "1.12.delta", "27.2": "27.2cm", "32.2": "32.2cm", "36.2": "36.2cm"}


def _level_one_id(k: int) -> str:
    return "1.12.delta" if k == 12 else f"1.{k}"


def check_eigenform(rec: NewformRecord, depth: int | None = None) -> None:
    """Confirm T_p f = a_p f on a_1..a_depth for every prime p with p*depth <= B.

    depth defaults to the Sturm bound, which makes the check rigorous within
    the space of weight k and level N.
    """
    depth = depth or sturm_bound(rec.weight, rec.level)
    B = rec.bound
    a = (0,) + rec.coeffs
    for p in primes_upto(B // depth):
        ap = a[p]
        pk = rec.eps(p) * p ** (rec.weight - 1)
        for n in range(1, depth + 1):
            lhs = a[n * p] + (pk * a[n // p] if n % p == 0 else 0)
            if lhs != ap * a[n]:
                raise CorpusError(f"{rec.id}: T_{p} eigen-equation fails at coefficient {n}")


def _check_cm_congruence(rec: NewformRecord, cong: tuple[int, int]) -> None:
    m, c = cong
    for p in primes_upto(rec.bound):
        if not rec.is_good(p):
            continue
        if (rec.a(p) == 0) != (p % m == c):
            raise CorpusError(f"{rec.id}: vanishing at p={p} breaks the CM congruence {c} mod {m}")


def _build_level_one(k: int, B: int) -> NewformRecord:
    (f,) = victor_miller_basis(k, B)
    rec = NewformRecord(
        id=_level_one_id(k),
        weight=k,
        level=1,
        cm=False,
        coeffs=tuple(f.integer_coeffs()[1:]),
        root_number=(-1) ** (k // 2),
        root_number_source="level-one formula (-1)^(k/2)",
    )
    check_eigenform(rec)
    return rec


def _build_eta(fid: str, N: int, spec, cm: bool, cong, B: int) -> NewformRecord:
    f = eta_quotient(list(spec), B)
    rec = NewformRecord(
        id=fid,
        weight=sum(e for _, e in spec) // 2,
        level=N,
        cm=cm,
        coeffs=tuple(f.integer_coeffs()[1:]),
        root_number=ETA_ROOT_NUMBERS[fid],
        root_number_source="numerically calibrated",
    )
    check_eigenform(rec)
    if cong is not None:
        _check_cm_congruence(rec, cong)
    return rec


@lru_cache(maxsize=4)
def corpus(bound: int = DEFAULT_BOUND) -> tuple[NewformRecord, ...]:
    """Built-in records generated to coefficient bound ``bound``."""
    records = [_build_level_one(k, bound) for k in LEVEL_ONE_WEIGHTS]
    records += [_build_eta(fid, N, spec, cm, cong, bound) for fid, N, spec, cm, cong in _ETA_FORMS]
    return tuple(records)


def get_form(fid: str, bound: int = DEFAULT_BOUND, extra: Iterable[NewformRecord] = ()) -> NewformRecord:
    fid = ALIASES.get(fid, fid)
    for rec in list(extra) + list(corpus(bound)):
        if rec.id == fid:
            return rec
    raise KeyError(f"unknown form id {fid!r}")


# -- coefficient-level twists ---------------------------------------------


def multiplicative_extension(
    prime_values: dict[int, int], weight: int, level: int, B: int
) -> tuple[int, ...]:
    """a_1..a_B from a_p via the weight-k Hecke recursion and multiplicativity.

    Good primes use a_{p^{j+1}} = a_p a_{p^j} - p^{k-1} a_{p^{j-1}}; primes
    dividing the level use a_{p^j} = a_p^j.
    """
    spf = smallest_prime_factors(B)
    a = [0] * (B + 1)
    a[1] = 1
    for n in range(2, B + 1):
        p = spf[n]
        m, j = n, 0
        while m % p == 0:
            m //= p
            j += 1
        if m > 1:
            a[n] = a[m] * a[n // m]
            continue
        ap = prime_values[p]
        if j == 1:
            a[n] = ap
        elif level % p == 0:
            a[n] = ap * a[n // p]
        else:
            a[n] = ap * a[n // p] - p ** (weight - 1) * a[n // (p * p)]
    return tuple(a[1:])


def synthesize_tate_twist(f: NewformRecord, r: int) -> NewformRecord:
    """Coefficient data of f tensor omega^r: a_p -> p^r a_p, weight k + 2r."""
    k = f.weight + 2 * r
    if k < 2:
        raise ValueError(f"Tate twist by {r} would give weight {k} < 2")
    B = f.bound
    if r < 0:
        for p in primes_upto(B):
            if f.a(p) % p ** (-r):
                raise ValueError(f"a_{p} of {f.id} is not divisible by p^{-r}")
    prime_values = {}
    for p in primes_upto(B):
        prime_values[p] = f.a(p) * p**r if r >= 0 else f.a(p) // p ** (-r)
    coeffs = multiplicative_extension(prime_values, k, f.level, B)
    return dataclasses.replace(
        f,
        id=f"{f.id}(x)w^{r}",
        weight=k,
        coeffs=coeffs,
        synthetic=True,
        root_number=None,
        root_number_source=None,
    )


# -- persistence -----------------------------------------------------------


def _fmt_bool(v: bool) -> str:
    return "true" if v else "false"


def _parse_bool(s: str) -> bool:
    if s in ("true", "1"):
        return True
    if s in ("false", "0"):
        return False
    raise CorpusError(f"bad boolean {s!r}")


def dumps_record(rec: NewformRecord) -> str:
    """Header ``id weight level cm synthetic bound`` then one a_n per line."""
    buf = io.StringIO()
    buf.write(
        f"{rec.id} {rec.weight} {rec.level} {_fmt_bool(rec.cm)} "
        f"{_fmt_bool(rec.synthetic)} {rec.bound}\n"
    )
    for c in rec.coeffs:
        buf.write(f"{c}\n")
    return buf.getvalue()


def loads_record(text: str) -> NewformRecord:
    lines = text.splitlines()
    if not lines:
        raise CorpusError("empty q-expansion file")
    head = lines[0].split()
    if len(head) != 6:
        raise CorpusError(f"malformed header {lines[0]!r}")
    fid, weight, level, cm, synthetic, bound = head
    try:
        coeffs = tuple(int(x) for x in lines[1:])
        weight, level, bound = int(weight), int(level), int(bound)
    except ValueError as exc:
        raise CorpusError(f"malformed q-expansion data: {exc}") from None
    if len(coeffs) != bound:
        raise CorpusError(f"header announces {bound} coefficients, found {len(coeffs)}")
    if bound and coeffs[0] != 1:
        raise CorpusError("record is not normalized (a_1 != 1)")
    root, source = _known_root_number(fid, weight, _parse_bool(synthetic))
    return NewformRecord(
        id=fid,
        weight=weight,
        level=level,
        cm=_parse_bool(cm),
        synthetic=_parse_bool(synthetic),
        coeffs=coeffs,
        root_number=root,
        root_number_source=source,
    )


def _known_root_number(fid: str, weight: int, synthetic: bool) -> tuple[int | None, str | None]:
    if synthetic:
        return None, None
    if fid in ETA_ROOT_NUMBERS:
        return ETA_ROOT_NUMBERS[fid], "numerically calibrated"
    if fid == _level_one_id(weight) and weight in LEVEL_ONE_WEIGHTS:
        return (-1) ** (weight // 2), "level-one formula (-1)^(k/2)"
    return None, None


def load_directory(path: str | Path) -> list[NewformRecord]:
    path = Path(path)
    if not path.is_dir():
        return []
    return [loads_record(p.read_text()) for p in sorted(path.glob("*.qexp"))]


def is_multiplicative(rec: NewformRecord, upto: int) -> bool:
    from math import gcd

    upto = min(upto, rec.bound)
    for m in range(2, upto + 1):
        for n in range(m + 1, upto // m + 1):
            if gcd(m, n) == 1 and rec.a(m * n) != rec.a(m) * rec.a(n):
                return False
    return True


def satisfies_ramanujan(rec: NewformRecord, primes: Sequence[int]) -> list[int]:
    """Primes in ``primes`` where a_p^2 > 4 p^{k-1} (empty when the bound holds)."""
    return [p for p in primes if rec.is_good(p) and rec.a(p) ** 2 > 4 * p ** (rec.weight - 1)]
