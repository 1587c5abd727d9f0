"""Euler products, partial L-functions, the completed Lambda-function and the
zero-counting argument that rules out Tate twists between newforms.

All numerics are double precision.  ``completed_lambda`` integrates the
exponentially smoothed partial sum f_T(iy) = sum_{n<=T} a_n e^{-2 pi n y}
against y^{s-1}; it never uses the root number, so the functional-equation
residual is a genuine consistency check.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy.integrate import quad

from .arith import is_prime, prime_divisors, primes_upto
from .modforms import NewformRecord, RangeError, synthesize_tate_twist


class ConvergenceError(ValueError):
    """Evaluation requested outside the region where it is validated."""


# -- Euler factors ---------------------------------------------------------


@dataclass(frozen=True)
class EulerFactor:
    """E_p(s) = (1 - lin p^{-s} + quad p^{-2s})^{-1}."""

    p: int
    degree: int
    lin: int
    quad: int

    def local_polynomial(self, s: complex) -> complex:
        x = cmath.exp(-s * math.log(self.p))
        return 1 - self.lin * x + self.quad * x * x

    def evaluate(self, s: complex) -> complex:
        return 1 / self.local_polynomial(s)

    def reciprocal_roots(self) -> list[complex]:
        """Nonzero alpha with 1 - lin X + quad X^2 = prod (1 - alpha X)."""
        if self.degree == 1:
            return [complex(self.lin)] if self.lin else []
        disc = cmath.sqrt(complex(self.lin) ** 2 - 4 * complex(self.quad))
        return [(self.lin + disc) / 2, (self.lin - disc) / 2]

    def to_dict(self) -> dict:
        return {"p": self.p, "degree": self.degree, "lin": str(self.lin), "quad": str(self.quad)}

    @classmethod
    def from_dict(cls, d: dict) -> "EulerFactor":
        return cls(d["p"], d["degree"], int(d["lin"]), int(d["quad"]))


def euler_factor(f: NewformRecord, p: int) -> EulerFactor:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    ap = f.a(p)
    if f.is_good(p):
        return EulerFactor(p, 2, ap, f.eps(p) * p ** (f.weight - 1))
    return EulerFactor(p, 1, ap, 0)


def auxiliary_prime(f1: NewformRecord, f2: NewformRecord) -> int:
    """Smallest prime not dividing N1 N2; its Euler factors have degree two."""
    N = f1.level * f2.level
    p = 2
    while N % p == 0 or not is_prime(p):
        p += 1
    return p


def bad_euler_data(
    f1: NewformRecord, f2: NewformRecord, ell: int | None = None
) -> list[tuple[EulerFactor, EulerFactor]]:
    """Euler factor pairs at the primes dividing ell N1 N2 (ell defaults to :func:`auxiliary_prime`)."""
    ell = auxiliary_prime(f1, f2) if ell is None else ell
    return [(euler_factor(f1, p), euler_factor(f2, p)) for p in prime_divisors(ell * f1.level * f2.level)]


# -- partial L-functions ---------------------------------------------------


def partial_l(f: NewformRecord, M: int, s: complex, cutoff: int) -> complex:
    """prod over primes p <= cutoff, p not dividing M, of E_p(f, s)."""
    s = complex(s)
    edge = (f.weight + 1) / 2
    if s.real <= edge:
        raise ConvergenceError(
            f"Re(s) = {s.real} is outside the absolute convergence zone Re(s) > {edge} for {f.id}"
        )
    if cutoff > f.bound:
        raise RangeError(f"cutoff {cutoff} exceeds the stored coefficients of {f.id}")
    ps = [p for p in primes_upto(cutoff) if M % p]
    if not ps:
        return 1 + 0j
    logp = np.log(np.array(ps, dtype=float))
    ap = np.array([float(f.a(p)) for p in ps])
    good = np.array([f.level % p != 0 for p in ps])
    lin = ap * np.exp(-s * logp)
    quad_term = np.where(good, np.exp((f.weight - 1 - 2 * s) * logp), 0)
    return complex(np.prod(1 / (1 - lin + quad_term)))


def l_shift_identity_check(f2: NewformRecord, r: int, M: int, s: complex, cutoff: int) -> float:
    """Relative gap between L_M(f2 (x) omega^r, s) and L_M(f2, s - r)."""
    s = complex(s)
    if (s - r).real <= (f2.weight + 1) / 2:
        raise ConvergenceError(f"Re(s - r) = {(s - r).real} is outside the convergence zone of {f2.id}")
    f1 = synthesize_tate_twist(f2, r)
    lhs = partial_l(f1, M, s, cutoff)
    rhs = partial_l(f2, M, s - r, cutoff)
    return abs(lhs - rhs) / abs(rhs)


# -- Gamma -----------------------------------------------------------------

_LANCZOS_G = 7
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def gamma(z: complex) -> complex:
    """Lanczos approximation (g = 7, 9 terms) with reflection for Re(z) < 1/2."""
    z = complex(z)
    if z.real < 0.5:
        return cmath.pi / (cmath.sin(cmath.pi * z) * gamma(1 - z))
    z -= 1
    x = _LANCZOS[0]
    for i in range(1, _LANCZOS_G + 2):
        x += _LANCZOS[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return math.sqrt(2 * math.pi) * t ** (z + 0.5) * cmath.exp(-t) * x


def _pole_distance(z: complex) -> float:
    if z.real > 0.5:
        return math.inf
    return abs(z - round(z.real))


class GammaRatio(NamedTuple):
    lhs: complex
    rhs: complex
    relative_error: float


def gamma_ratio_check(s: complex, m: int) -> GammaRatio:
    """Compare Gamma(s)/Gamma(s-m) with prod_{j=1}^m (s-j)."""
    if m < 1:
        raise ValueError("m must be at least 1")
    s = complex(s)
    for z in (s, s - m):
        if _pole_distance(z) <= 1e-3:
            raise ValueError(f"{z} is within 1e-3 of a pole of Gamma")
    lhs = gamma(s) / gamma(s - m)
    rhs = complex(1)
    for j in range(1, m + 1):
        rhs *= s - j
    return GammaRatio(lhs, rhs, abs(lhs - rhs) / abs(rhs))


# -- zero lattices ---------------------------------------------------------


class LatticeZero(NamedTuple):
    s: complex
    n: int
    residual: float


def euler_zero_lattice(alpha: complex, p: int, n_range: Sequence[int] = range(-2, 3)) -> list[LatticeZero]:
    """Zeros s = (log alpha + 2 pi i n)/log p of 1 - alpha p^{-s}, principal log branch."""
    alpha = complex(alpha)
    if alpha == 0:
        raise ValueError("alpha = 0 gives the constant factor 1, which has no zeros")
    lp = math.log(p)
    out = []
    for n in n_range:
        s = (cmath.log(alpha) + 2j * math.pi * n) / lp
        out.append(LatticeZero(s, n, abs(1 - alpha * cmath.exp(-s * lp))))
    return out


# -- the Tate-twist obstruction ---------------------------------------------


def lhs_ratio(s: complex, k1: int, r: int) -> complex:
    """prod_{j<=r} (s - j) / prod_{j<=r} (s - (k1 - j)); infinite at a pole."""
    num = den = complex(1)
    for j in range(1, r + 1):
        num *= s - j
        den *= s - (k1 - j)
    if den == 0:
        return complex(math.inf, 0)
    return num / den


def _finite_or_none(x: float) -> float | None:
    # JSON has no infinity; a pole of the LHS is stored as null
    return x if math.isfinite(x) else None


@dataclass
class RHSTerm:
    p: int
    origin: str
    alpha: complex
    zeros: list[dict] = field(default_factory=list)
    cancelled: bool = False

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "origin": self.origin,
            "alpha": [self.alpha.real, self.alpha.imag],
            "cancelled": self.cancelled,
            "zeros": [
                {
                    "s": [z["s"].real, z["s"].imag],
                    "n": z["n"],
                    "residual": z["residual"],
                    "abs_lhs": _finite_or_none(z["abs_lhs"]),
                }
                for z in self.zeros
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RHSTerm":
        return cls(
            p=d["p"],
            origin=d["origin"],
            alpha=complex(*d["alpha"]),
            cancelled=d["cancelled"],
            zeros=[
                {
                    "s": complex(*z["s"]),
                    "n": z["n"],
                    "residual": z["residual"],
                    "abs_lhs": math.inf if z["abs_lhs"] is None else z["abs_lhs"],
                }
                for z in d["zeros"]
            ],
        )


@dataclass
class ObstructionReport:
    k1: int
    k2: int
    r: int
    lhs_zeros: list[int]
    lhs_poles: list[int]
    disjoint: bool
    rhs_terms: list[RHSTerm]
    r_admissible: bool
    reason: str

    @property
    def no_cancellation_margin(self) -> int:
        return self.k1 - 2 * self.r

    def exhibited_zeros(self, lhs_floor: float = 1e-6, residual_cap: float = 1e-9) -> list[dict]:
        """Lattice zeros of RHS terms that are certified non-zeros of the LHS."""
        return [
            z
            for t in self.rhs_terms
            for z in t.zeros
            if lhs_floor < z["abs_lhs"] < math.inf and z["residual"] < residual_cap
        ]

    def to_dict(self) -> dict:
        return {
            "k1": self.k1,
            "k2": self.k2,
            "r": self.r,
            "lhs_zeros": self.lhs_zeros,
            "lhs_poles": self.lhs_poles,
            "disjoint": self.disjoint,
            "no_cancellation": f"k1 - 2r = {self.k1} - {2 * self.r} = {self.no_cancellation_margin} = k2 > 0",
            "rhs_terms": [t.to_dict() for t in self.rhs_terms],
            "r_admissible": self.r_admissible,
            "reason": self.reason,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ObstructionReport":
        return cls(
            k1=d["k1"],
            k2=d["k2"],
            r=d["r"],
            lhs_zeros=list(d["lhs_zeros"]),
            lhs_poles=list(d["lhs_poles"]),
            disjoint=d["disjoint"],
            rhs_terms=[RHSTerm.from_dict(t) for t in d["rhs_terms"]],
            r_admissible=d["r_admissible"],
            reason=d["reason"],
        )


def _same_alpha(a: complex, b: complex) -> bool:
    return abs(a - b) <= 1e-9 * max(1.0, abs(a), abs(b))


def tate_twist_obstruction(
    k1: int,
    k2: int,
    r: int,
    bad_euler_data: Sequence[tuple[EulerFactor, EulerFactor]] = (),
    n_range: Sequence[int] = range(-2, 3),
) -> ObstructionReport:
    """Zero-set comparison for the quotient of the two functional equations.

    The LHS prod (s-j)/prod (s-(k1-j)) has the r zeros 1..r.  The RHS is a
    nowhere-vanishing function times a quotient of finite Euler products;
    every factor 1 - alpha p^{-s} with alpha != 0 vanishes on a whole
    vertical lattice.  For r > 0 the two zero sets can never agree.
    """
    if k2 <= 0:
        raise ValueError(f"k2 = {k2} must be positive")
    if k1 != k2 + 2 * r:
        raise ValueError(f"k1 = {k1} differs from k2 + 2r = {k2 + 2 * r}")
    if r < 0:
        raise ValueError("r must be non-negative (swap the two forms)")
    zeros = list(range(1, r + 1))
    poles = [k1 - j for j in range(1, r + 1)]
    disjoint = set(zeros).isdisjoint(poles)

    terms: list[RHSTerm] = []
    for e1, e2 in bad_euler_data:
        p = e1.p
        lp = math.log(p)
        numer: list[tuple[str, complex, float]] = []
        # zeros of P_{f1}(s): gamma = alpha, lattice s
        for a in e1.reciprocal_roots():
            numer.append(("E_p(f1, s)^-1", a, 0.0))
        # zeros of P_{f2}(k2 + r - s): s = k2 + r - (lattice of beta)
        for b in e2.reciprocal_roots():
            numer.append(("E_p(f2, k2+r-s)^-1", b, float(k2 + r)))
        denom = [p**k1 / a for a in e1.reciprocal_roots()] + [b * p**r for b in e2.reciprocal_roots()]
        unmatched = list(denom)
        for origin, a, reflect in numer:
            term = RHSTerm(p=p, origin=origin, alpha=a)
            normalized = a if not reflect else p ** (k2 + r) / a
            for i, d in enumerate(unmatched):
                if _same_alpha(normalized, d):
                    term.cancelled = True
                    del unmatched[i]
                    break
            for z in euler_zero_lattice(a, p, n_range):
                s = z.s if not reflect else reflect - z.s
                if reflect:
                    residual = abs(1 - a * cmath.exp(-(reflect - s) * lp))
                else:
                    residual = z.residual
                term.zeros.append(
                    {"s": s, "n": z.n, "residual": residual, "abs_lhs": abs(lhs_ratio(s, k1, r))}
                )
            terms.append(term)

    if r == 0:
        admissible, reason = True, "r = 0: both products are empty and the LHS is identically 1"
    elif not disjoint:
        # excluded by k2 > 0, kept as a guard
        admissible, reason = True, "LHS zeros and poles overlap; the argument does not apply"
    else:
        surviving = [t for t in terms if not t.cancelled]
        if surviving:
            detail = (
                f"{len(surviving)} uncancelled RHS Euler term(s), each vanishing on an infinite "
                "vertical lattice, while the LHS has only finitely many zeros"
            )
        else:
            detail = "after cancellation the RHS never vanishes, while the LHS vanishes at s = 1..r"
        admissible = False
        reason = (
            f"r = {r} > 0: LHS zeros {zeros} and poles {poles} are disjoint since "
            f"k1 - 2r = {k2} > 0; {detail}"
        )
    return ObstructionReport(k1, k2, r, zeros, poles, disjoint, terms, admissible, reason)


# -- completed Lambda and the functional equation ----------------------------


@dataclass(frozen=True)
class FunctionalEquationData:
    level: int
    weight: int
    sign: int | None
    sign_source: str | None

    def archimedean(self, s: complex) -> complex:
        """A(s) = N^{s/2} (2 pi)^{-s}."""
        return self.level ** (s / 2) * (2 * math.pi) ** (-s)

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "weight": self.weight,
            "sign": self.sign,
            "sign_source": self.sign_source,
            "archimedean": "N^(s/2) (2 pi)^(-s)",
        }


def functional_equation_data(f: NewformRecord) -> FunctionalEquationData:
    return FunctionalEquationData(f.level, f.weight, f.root_number, f.root_number_source)


MAX_IMAG = 40.0


def _quadrature_plan(f: NewformRecord) -> tuple[float, int, float]:
    """(y0, terms needed, y_max) for a discarded mass below e^{-L}, L = 80 + 2k."""
    N, k = f.level, f.weight
    L = 80 + 2 * k
    y0 = 2 * math.pi / (N * L)
    needed = math.ceil(L * L * N / (4 * math.pi**2))
    y_max = (L + 3 * (k + 2)) / (2 * math.pi)
    return y0, needed, y_max


def required_terms(f: NewformRecord) -> int:
    return _quadrature_plan(f)[1]


def completed_lambda(f: NewformRecord, s: complex, terms: int | None = None) -> complex:
    """N^{s/2} int_0^inf f(iy) y^{s-1} dy, with f replaced by its first ``terms`` coefficients.

    The interval is cut at y0 = 2 pi/(N L): below it f(iy) is O(e^{-L}) by the
    Fricke involution, and T >= L^2 N/(4 pi^2) terms make the truncation
    error at y0 of the same size.  Validated for -1 <= Re(s) <= k+1 and
    |Im(s)| <= 40; anything else is refused.
    """
    s = complex(s)
    k = f.weight
    if not (-1 <= s.real <= k + 1) or abs(s.imag) > MAX_IMAG:
        raise ConvergenceError(f"s = {s} is outside the validated region for {f.id}")
    y0, needed, y_max = _quadrature_plan(f)
    terms = needed if terms is None else terms
    if terms < needed:
        raise ConvergenceError(f"{f.id} needs at least {needed} terms, got {terms}")
    if terms > f.bound:
        raise RangeError(f"{terms} terms requested, {f.id} stores {f.bound}")
    a = np.array([float(c) for c in f.coeffs[:terms]])
    n = np.arange(1, terms + 1, dtype=float)
    two_pi_n = 2 * math.pi * n

    def integrand(t: float, imag: bool) -> float:
        y = math.exp(t)
        v = float(a @ np.exp(-two_pi_n * y)) * cmath.exp(t * s)
        return v.imag if imag else v.real

    lo, hi = math.log(y0), math.log(y_max)
    mid = [-0.5 * math.log(f.level)]
    opts = dict(limit=500, epsabs=0.0, epsrel=1e-12, points=mid)
    re = quad(integrand, lo, hi, args=(False,), **opts)[0]
    im = quad(integrand, lo, hi, args=(True,), **opts)[0] if s.imag else 0.0
    return f.level ** (s / 2) * complex(re, im)


def functional_equation_residual(
    f: NewformRecord, s: complex, terms: int | None = None, sign: int | None = None
) -> float:
    """|Lambda(s) - sign Lambda(k - s)| / |Lambda(s)|, sign defaulting to the stored root number."""
    sign = f.root_number if sign is None else sign
    if sign is None:
        raise ValueError(f"{f.id} has no stored root number")
    lam_s = completed_lambda(f, s, terms)
    lam_dual = completed_lambda(f, f.weight - complex(s), terms)
    return abs(lam_s - sign * lam_dual) / abs(lam_s)


def calibrate_root_number(f: NewformRecord, s: complex | None = None) -> tuple[int, complex]:
    """Estimate the root number from Lambda(s)/Lambda(k-s) at a non-central point."""
    s = complex(f.weight / 2 + 1, 0.5) if s is None else complex(s)
    ratio = completed_lambda(f, s) / completed_lambda(f, f.weight - s)
    sign = 1 if ratio.real > 0 else -1
    if abs(ratio - sign) > 1e-6:
        raise ArithmeticError(f"{f.id}: Lambda ratio {ratio} is not close to +-1")
    return sign, ratio
