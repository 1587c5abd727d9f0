"""Twist certificates: a_p(f1) = chi(p) a_p(f2) p^r at every good prime.

With r = (k1 - k2)/2 this is the coefficient-level shadow of
rho_1 = rho_2 (x) omega^r chi, where omega is the cyclotomic character
(omega(Frob_p) = p).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

from .arith import lcm, prime_divisors, primes_upto
from .characters import CyclotomicNumber, DirichletCharacter, char_value, enumerate_characters
from .comparator import ParityFinding, coincidence_set, infer_parity_and_r
from .modforms import NewformRecord, RangeError, multiplicative_extension, sturm_bound

DEFAULT_MODULUS_BOUND = 16


@dataclass
class TwistCertificate:
    f1: str
    f2: str
    r: int
    chi: DirichletCharacter
    verified_up_to: int
    sturm_target: int
    exceptional_primes: list[int]
    modulus_bound: int = DEFAULT_MODULUS_BOUND

    def to_dict(self) -> dict:
        return {
            "kind": "certificate",
            "f1": self.f1,
            "f2": self.f2,
            "r": self.r,
            "chi": self.chi.to_dict(),
            "verified_up_to": self.verified_up_to,
            "sturm_target": self.sturm_target,
            "exceptional_primes": list(self.exceptional_primes),
            "modulus_bound": self.modulus_bound,
            # a_p(f1) = chi(p) p^r a_p(f2) reads rho_1 = rho_2 (x) omega^r chi;
            # in the other direction rho_2 = rho_1 (x) omega^{-r} chi^{-1}.
            "orientation": {
                "proof": f"rho1 ~ rho2 (x) omega^{self.r} chi",
                "statement": f"rho2 ~ rho1 (x) omega^{-self.r} chi^-1",
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TwistCertificate":
        return cls(
            f1=d["f1"],
            f2=d["f2"],
            r=d["r"],
            chi=DirichletCharacter.from_dict(d["chi"]),
            verified_up_to=d["verified_up_to"],
            sturm_target=d["sturm_target"],
            exceptional_primes=list(d["exceptional_primes"]),
            modulus_bound=d.get("modulus_bound", DEFAULT_MODULUS_BOUND),
        )


@dataclass
class WeakMatch:
    """A surviving character whose verification depth is below the Sturm target."""

    f1: str
    f2: str
    r: int
    chi: DirichletCharacter
    verified_up_to: int
    sturm_target: int
    reason: str

    def to_dict(self) -> dict:
        return {
            "kind": "weak_match",
            "f1": self.f1,
            "f2": self.f2,
            "r": self.r,
            "chi": self.chi.to_dict(),
            "verified_up_to": self.verified_up_to,
            "sturm_target": self.sturm_target,
            "reason": self.reason,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "WeakMatch":
        return cls(
            d["f1"], d["f2"], d["r"], DirichletCharacter.from_dict(d["chi"]),
            d["verified_up_to"], d["sturm_target"], d["reason"],
        )


@dataclass
class TwistSearch:
    """Full outcome of :func:`detect_twist_report`, kept for diagnostics."""

    parity: ParityFinding
    coincidences: list[int]
    survivors: list[DirichletCharacter] = field(default_factory=list)
    result: TwistCertificate | WeakMatch | None = None


def _identity_holds(a1: int, a2: int, r: int, chi_p: CyclotomicNumber, p: int) -> bool:
    if r >= 0:
        return chi_p * (a2 * p**r) == a1
    return chi_p * a2 == a1 * p ** (-r)


def _identity_failures(
    f1: NewformRecord, f2: NewformRecord, r: int, chi: DirichletCharacter, X: int, stop_early: bool
) -> list[int]:
    bad = f1.level * f2.level * chi.modulus
    failures = []
    for p in primes_upto(X):
        if bad % p == 0:
            continue
        if not _identity_holds(f1.a(p), f2.a(p), r, char_value(chi, p), p):
            failures.append(p)
            if stop_early:
                break
    return failures


def _exceptional(f1: NewformRecord, f2: NewformRecord, q: int) -> list[int]:
    return prime_divisors(f1.level * f2.level * q)


def certificate_sturm_target(f1: NewformRecord, f2: NewformRecord, q: int) -> int:
    return sturm_bound(f1.weight, lcm(f1.level, f2.level * q * q))


def detect_twist_report(
    f1: NewformRecord,
    f2: NewformRecord,
    modulus_bound: int = DEFAULT_MODULUS_BOUND,
    X: int | None = None,
    convention: str = "motivic",
) -> TwistSearch:
    X = min(f1.bound, f2.bound) if X is None else X
    if X > f1.bound or X > f2.bound:
        raise RangeError(f"X = {X} exceeds the shared coefficient range")
    S = coincidence_set(f1, f2, X, convention)
    parity = infer_parity_and_r(f1, f2, S)
    search = TwistSearch(parity=parity, coincidences=S)
    if not parity.parity_consistent:
        return search
    r = parity.r
    # every candidate is tested; the canonical choice is made afterwards
    for q in range(1, modulus_bound + 1):
        for chi in enumerate_characters(q):
            if not _identity_failures(f1, f2, r, chi, X, stop_early=True):
                search.survivors.append(chi)
    if not search.survivors:
        return search
    order = {id(c): i for i, c in enumerate(search.survivors)}
    best = min(search.survivors, key=lambda c: (c.conductor, order[id(c)]))
    target = certificate_sturm_target(f1, f2, best.modulus)
    if X < target:
        search.result = WeakMatch(
            f1.id, f2.id, r, best, X, target,
            reason=f"checked up to {X}, below the Sturm target {target}",
        )
    else:
        search.result = TwistCertificate(
            f1=f1.id,
            f2=f2.id,
            r=r,
            chi=best,
            verified_up_to=X,
            sturm_target=target,
            exceptional_primes=_exceptional(f1, f2, best.modulus),
            modulus_bound=modulus_bound,
        )
    return search


def detect_twist(
    f1: NewformRecord,
    f2: NewformRecord,
    modulus_bound: int = DEFAULT_MODULUS_BOUND,
    X: int | None = None,
    convention: str = "motivic",
) -> TwistCertificate | WeakMatch | None:
    """Search for (r, chi) with a_p(f1) = chi(p) a_p(f2) p^r at all good p <= X.

    Returns a certificate, a :class:`WeakMatch` when X is below the Sturm
    target, or None when the parity step is inconclusive or no character of
    modulus <= modulus_bound survives.
    """
    return detect_twist_report(f1, f2, modulus_bound, X, convention).result


def verify_certificate(
    cert: TwistCertificate, f1: NewformRecord, f2: NewformRecord, X: int | None = None
) -> tuple[bool, list[int]]:
    X = cert.verified_up_to if X is None else X
    if X > f1.bound or X > f2.bound:
        raise RangeError(f"X = {X} exceeds the shared coefficient range")
    failures = _identity_failures(f1, f2, cert.r, cert.chi, X, stop_early=False)
    weights_ok = f1.weight == f2.weight + 2 * cert.r
    return weights_ok and not failures, failures


def twist_record(f: NewformRecord, chi: DirichletCharacter) -> NewformRecord:
    """Coefficients of f (x) chi for real chi: a_p -> chi(p) a_p, closed multiplicatively."""
    if chi.order > 2:
        raise ValueError("only real characters keep a rational-coefficient record rational")
    q = chi.modulus
    B = f.bound
    prime_values = {p: chi.real_value(p) * f.a(p) for p in primes_upto(B)}
    level = f.level * q * q
    coeffs = multiplicative_extension(prime_values, f.weight, level, B)
    return dataclasses.replace(
        f,
        id=f"{f.id}(x){chi.label()}",
        level=level,
        coeffs=coeffs,
        synthetic=True,
        root_number=None,
        root_number_source=None,
    )
