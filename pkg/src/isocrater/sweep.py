"""The standard parameter sweep: small crater curves, their primes ell and levels N."""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .curve import DEFAULT_MAX_EXT_DEGREE, ExtensionBoundError, curve_new, torsion_field_degree
from .qorder import QuadOrder, factor_prime
from .resring import KINDS


@dataclass(frozen=True)
class SweepCurve:
    p: int
    a: int
    b: int
    D: int  # discriminant of the endomorphism ring of the crater curves


SWEEP_CURVES = (
    SweepCurve(47, 14, 5, -124),
    SweepCurve(53, 46, 6, -44),
    SweepCurve(107, 43, 86, -71),
    SweepCurve(131, 1, 85, -40),
)
SWEEP_ELLS = (2, 3, 5, 7)
SWEEP_LEVELS = tuple(range(2, 13))


@dataclass(frozen=True)
class SweepTuple:
    curve: SweepCurve
    ell: int
    N: int
    kind: str

    def label(self) -> str:
        c = self.curve
        return f"p={c.p} E=({c.a},{c.b}) D={c.D} ell={self.ell} N={self.N} {self.kind}"


@dataclass(frozen=True)
class Skipped:
    curve: SweepCurve
    ell: int
    N: int
    reason: str


def usable_ells(c: SweepCurve):
    O = QuadOrder(c.D)
    out = []
    for ell in SWEEP_ELLS:
        if ell == c.p or O.conductor % ell == 0:
            continue
        if factor_prime(O, ell).kind != "inert":
            out.append(ell)
    return out


def sweep_tuples(max_degree: int = DEFAULT_MAX_EXT_DEGREE, kinds=KINDS):
    """(admissible tuples, skipped (curve, ell, N) with reasons)."""
    tuples, skipped = [], []
    for c in SWEEP_CURVES:
        E = curve_new(c.a, c.b, c.p)
        O = QuadOrder(c.D)
        degrees = {}
        for N in SWEEP_LEVELS:
            if gcd(N, c.p * O.conductor) != 1:
                continue
            try:
                k = torsion_field_degree(E, N)
            except ExtensionBoundError as exc:
                k = exc.needed
            degrees[N] = k
        for ell in usable_ells(c):
            for N, k in degrees.items():
                if gcd(N, ell) != 1:
                    continue
                if k > max_degree:
                    skipped.append(Skipped(c, ell, N, f"E[{N}] needs degree {k} > {max_degree}"))
                    continue
                tuples.extend(SweepTuple(c, ell, N, kind) for kind in kinds)
    return tuples, skipped
