"""Normalized traces, coincidence and vanishing sets, density estimates and
the weight-parity inference.

Every set-membership decision here is exact integer arithmetic; floats only
appear in :func:`normalized_ap`, which exists for display.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .arith import prime_pi, primes_upto
from .modforms import NewformRecord, RangeError

CONVENTIONS = ("motivic", "statement")


def _exponent_shift(convention: str) -> int:
    # ap / p^{(k - shift)/2}: motivic divides by p^{(k-1)/2}, statement by p^{k/2}
    if convention == "motivic":
        return 1
    if convention == "statement":
        return 0
    raise ValueError(f"unknown weight convention {convention!r}")


def normalized_ap(f: NewformRecord, p: int, convention: str = "motivic") -> float:
    if not f.is_good(p):
        raise ValueError(f"{p} divides the level {f.level} of {f.id}")
    e = (f.weight - _exponent_shift(convention)) / 2
    return f.a(p) / p**e


def _sign(x: int) -> int:
    return (x > 0) - (x < 0)


def same_normalized_trace(a1: int, k1: int, a2: int, k2: int, p: int, convention: str = "motivic") -> bool:
    """Exact test of a1/p^{(k1-s)/2} == a2/p^{(k2-s)/2} by cross-multiplying squares."""
    s = _exponent_shift(convention)
    if _sign(a1) != _sign(a2):
        return False
    e1, e2 = k1 - s, k2 - s
    # a1^2 p^{e2} == a2^2 p^{e1}, with the common power of p removed
    m = min(e1, e2)
    return a1 * a1 * p ** (e2 - m) == a2 * a2 * p ** (e1 - m)


def _check_range(X: int, *forms: NewformRecord) -> None:
    for f in forms:
        if X > f.bound:
            raise RangeError(f"X = {X} exceeds the stored coefficients of {f.id} (bound {f.bound})")


def coincidence_set(
    f1: NewformRecord, f2: NewformRecord, X: int, convention: str = "motivic"
) -> list[int]:
    """Good primes p <= X (p not dividing N1 N2) with equal normalized traces."""
    _check_range(X, f1, f2)
    N = f1.level * f2.level
    k1, k2 = f1.weight, f2.weight
    c1, c2 = f1.coeffs, f2.coeffs
    return [
        p
        for p in primes_upto(X)
        if N % p and same_normalized_trace(c1[p - 1], k1, c2[p - 1], k2, p, convention)
    ]


def vanishing_set(f: NewformRecord, X: int) -> list[int]:
    """Good primes p <= X with a_p(f) = 0."""
    _check_range(X, f)
    c = f.coeffs
    return [p for p in primes_upto(X) if f.level % p and c[p - 1] == 0]


@dataclass
class DensityReport:
    set_label: str
    checkpoints: list[tuple[int, int, int, Fraction]]
    upper_density_estimate: Fraction
    tail_window: int

    def ratios(self) -> list[tuple[int, Fraction]]:
        return [(X, r) for X, _, _, r in self.checkpoints]

    def to_dict(self) -> dict:
        return {
            "set_label": self.set_label,
            "checkpoints": [
                {"X": X, "count": c, "primes": n, "ratio": str(r)} for X, c, n, r in self.checkpoints
            ],
            "upper_density_estimate": str(self.upper_density_estimate),
            "upper_density_float": float(self.upper_density_estimate),
            "tail_window": self.tail_window,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DensityReport":
        return cls(
            set_label=d["set_label"],
            checkpoints=[
                (c["X"], c["count"], c["primes"], Fraction(c["ratio"])) for c in d["checkpoints"]
            ],
            upper_density_estimate=Fraction(d["upper_density_estimate"]),
            tail_window=d["tail_window"],
        )

    def to_csv(self) -> str:
        lines = ["X,ratio"]
        lines += [f"{X},{float(r):.10g}" for X, _, _, r in self.checkpoints]
        return "\n".join(lines) + "\n"


def checkpoint_grid(X: int, checkpoints: int) -> list[int]:
    """Geometric grid X/2^{c-1}, ..., X/2, X (points below 2 dropped)."""
    grid = sorted({X >> j for j in range(checkpoints)})
    return [x for x in grid if x >= 2]


def upper_density(
    primes_in_S: Iterable[int],
    X: int,
    checkpoints: int = 8,
    tail_window: int = 3,
    set_label: str = "S",
    excluded: Iterable[int] = (),
) -> DensityReport:
    """Finite proxy for the upper density of a set of primes.

    Ratios |S cap [2, X_i]| / pi(X_i) are taken on a factor-2 grid ending at X;
    the estimate is the largest ratio among the last ``tail_window`` points.
    ``excluded`` primes (e.g. those dividing a level) are removed from the
    prime count.
    """
    if checkpoints < 2:
        raise ValueError("need at least two checkpoints")
    grid = checkpoint_grid(X, checkpoints)
    if not grid:
        raise ValueError(f"no primes up to X = {X}")
    S = sorted(set(p for p in primes_in_S if p <= X))
    excluded = sorted(set(excluded))
    rows = []
    i = 0
    for x in grid:
        while i < len(S) and S[i] <= x:
            i += 1
        total = prime_pi(x) - sum(1 for p in excluded if p <= x)
        ratio = Fraction(i, total) if total > 0 else Fraction(0)
        rows.append((x, i, total, ratio))
    tail = rows[-tail_window:]
    return DensityReport(
        set_label=set_label,
        checkpoints=rows,
        upper_density_estimate=max(r for *_, r in tail),
        tail_window=tail_window,
    )


@dataclass
class ParityFinding:
    parity_consistent: bool
    r: int | None
    witness_primes: list[int] = field(default_factory=list)
    inconclusive: bool = False
    failed_primes: list[int] = field(default_factory=list)

    @property
    def status(self) -> str:
        if self.inconclusive:
            return "inconclusive"
        return "consistent" if self.parity_consistent else "inconsistent"

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "parity_consistent": self.parity_consistent,
            "r": self.r,
            "witness_primes": list(self.witness_primes),
            "inconclusive": self.inconclusive,
            "failed_primes": list(self.failed_primes),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ParityFinding":
        return cls(
            parity_consistent=d["parity_consistent"],
            r=d["r"],
            witness_primes=list(d["witness_primes"]),
            inconclusive=d["inconclusive"],
            failed_primes=list(d.get("failed_primes", [])),
        )


def refine_nonvanishing(f1: NewformRecord, f2: NewformRecord, S: Sequence[int]) -> list[int]:
    """Primes of S where neither trace vanishes."""
    return [p for p in S if f1.a(p) != 0 and f2.a(p) != 0]


def infer_parity_and_r(f1: NewformRecord, f2: NewformRecord, S: Sequence[int]) -> ParityFinding:
    """Check a_p(f1)/a_p(f2) = p^{(k1-k2)/2} on the non-vanishing part of S."""
    witnesses = refine_nonvanishing(f1, f2, S)
    if not witnesses:
        return ParityFinding(parity_consistent=False, r=None, inconclusive=True)
    diff = f1.weight - f2.weight
    if diff % 2:
        # p^{odd/2} is irrational, so no nonzero traces can satisfy the ratio
        return ParityFinding(False, None, witnesses, failed_primes=list(witnesses))
    r = diff // 2
    failed = []
    for p in witnesses:
        a1, a2 = f1.a(p), f2.a(p)
        ok = a1 == a2 * p**r if r >= 0 else a1 * p ** (-r) == a2
        if not ok:
            failed.append(p)
    if failed:
        return ParityFinding(False, None, witnesses, failed_primes=failed)
    return ParityFinding(True, r, witnesses)
