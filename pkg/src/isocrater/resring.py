"""The residue ring O/NO, its unit group, level-structure data inside it and their stabilizers."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from itertools import product
from math import gcd

from sympy import factorint

from .qorder import OrderError, QuadIdeal, QuadOrder, factor_prime

KINDS = ("gamma0", "gamma1", "full")


class ResRingError(ValueError):
    pass


class ResRing:
    """O/NO with elements stored as pairs (a, b) in [0, N)^2 meaning a + b*Phi."""

    def __init__(self, O: QuadOrder, N: int):
        if N < 1:
            raise ResRingError("N must be positive")
        if gcd(N, O.conductor) != 1:
            raise ResRingError(f"N = {N} shares a factor with the conductor {O.conductor}")
        self.O = O
        self.N = N

    def __repr__(self):
        return f"ResRing(D={self.O.D}, N={self.N})"

    def __call__(self, u) -> tuple:
        if isinstance(u, int):
            u = (u, 0)
        return (u[0] % self.N, u[1] % self.N)

    def add(self, u, v):
        return ((u[0] + v[0]) % self.N, (u[1] + v[1]) % self.N)

    def neg(self, u):
        return (-u[0] % self.N, -u[1] % self.N)

    def mul(self, u, v):
        return self(self.O.mul(u, v))

    def smul(self, c: int, u):
        return (c * u[0] % self.N, c * u[1] % self.N)

    def pow(self, u, e: int):
        out = self(1)
        for _ in range(e):
            out = self.mul(out, u)
        return out

    def is_unit(self, u) -> bool:
        return gcd(self.O.norm(u), self.N) == 1

    def inv(self, u):
        n = self.O.norm(u) % self.N
        if gcd(n, self.N) != 1:
            raise ResRingError(f"{u} is not a unit mod {self.N}")
        return self.smul(pow(n, -1, self.N), self.O.conj(u))

    def elements(self):
        return list(product(range(self.N), repeat=2))

    @cached_property
    def units(self) -> tuple:
        return tuple(u for u in self.elements() if self.is_unit(u))

    def additive_order(self, u) -> int:
        return self.N // gcd(gcd(u[0], u[1]), self.N)

    def in_ideal(self, u, I: QuadIdeal) -> bool:
        """Membership of a residue in an ideal containing NO."""
        return I.contains(u)

    def subgroup(self, gens) -> tuple:
        """The subgroup of (O/NO)^x generated by gens, in sorted order."""
        gens = [self(g) for g in gens]
        for g in gens:
            if not self.is_unit(g):
                raise ResRingError(f"{g} is not a unit of O/{self.N}O")
        seen = {self(1)}
        queue = deque(seen)
        while queue:
            x = queue.popleft()
            for g in gens:
                y = self.mul(x, g)
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return tuple(sorted(seen))


# ---------------------------------------------------------------------------
# ideals dividing NO


def prime_ideals_above(O: QuadOrder, q: int):
    """[(P, N(P))] for the prime ideals over q."""
    fp = factor_prime(O, q)
    if fp.kind == "inert":
        return [(fp.ideals[0], q * q)]
    return [(P, q) for P in fp.ideals]


def phi_O(O: QuadOrder, A: QuadIdeal) -> int:
    """|(O/A)^x| = N(A) * prod over primes P | A of (1 - 1/N(P))."""
    n = A.norm
    num, den = n, 1
    for q in factorint(n):
        for P, nP in prime_ideals_above(O, q):
            if P.contains_ideal(A):
                num *= nP - 1
                den *= nP
    return num // den


def _residues(A: QuadIdeal):
    for y in range(A.c):
        for x in range(A.a):
            yield (x, y)


def phi_O_bruteforce(O: QuadOrder, A: QuadIdeal) -> int:
    """Count residues alpha mod A with alpha*O + A = O."""
    basis = A.basis()
    count = 0
    for u in _residues(A):
        if u == (0, 0) and A.norm > 1:
            continue
        vecs = [u, O.mul(u, (0, 1))] + basis
        if QuadIdeal.from_lattice(O, vecs).norm == 1:
            count += 1
    return count


def conductor_ideal(R: ResRing, P) -> QuadIdeal:
    """The ideal (P, N) of O."""
    return R.O.ideal(tuple(P), R.N)


def colon_ideal(O: QuadOrder, A: QuadIdeal, N: int) -> QuadIdeal:
    """A^{-1} N O = {x in O : x A in NO}, computed as N * conj(A) / N(A)."""
    B = A.conj().scale(N)
    n = A.norm
    if B.a % n or B.b % n or B.c % n:
        raise OrderError(f"{A} does not divide {N}O")
    return QuadIdeal(O, B.a // n, B.b // n, B.c // n)


def colon_ideal_bruteforce(O: QuadOrder, A: QuadIdeal, N: int) -> QuadIdeal:
    R = ResRing(O, N)
    NO = O.ideal(N)
    prods = [[O.mul(x, v) for v in A.basis()] for x in R.elements()]
    vecs = [x for x, ps in zip(R.elements(), prods) if all(NO.contains(w) for w in ps)]
    return QuadIdeal.from_lattice(O, vecs + NO.basis())


def divisors_of_NO(O: QuadOrder, N: int, primitive_only: bool = True) -> list[QuadIdeal]:
    """Ideals A | NO; with primitive_only, those not contained in qO for any prime q | N.

    The second condition is what allows A = (P, N) for a P of additive order N.
    """
    per_prime = []
    for q, e in sorted(factorint(N).items()):
        fp = factor_prime(O, q)
        opts = []
        if fp.kind == "split":
            l, lb = fp.ideals
            for i in range(e + 1):
                for j in range(e + 1):
                    if primitive_only and min(i, j) > 0:
                        continue
                    opts.append(l**i * lb**j)
        elif fp.kind == "inert":
            for i in range(1 if primitive_only else e + 1):
                opts.append(O.ideal(q**i))
        else:
            l = fp.ideals[0]
            for i in range(2 if primitive_only else 2 * e + 1):
                opts.append(l**i)
        per_prime.append(opts)
    out = []
    for combo in product(*per_prime):
        A = O.unit_ideal()
        for I in combo:
            A = A * I
        out.append(A)
    return sorted(out, key=lambda I: (I.norm, I.a, I.b, I.c))


# ---------------------------------------------------------------------------
# level structures on O/NO


@dataclass(frozen=True)
class AlgLevelStructure:
    kind: str
    data: tuple  # a residue P for gamma0/gamma1, a pair (P, Q) for full

    def act(self, R: ResRing, alpha) -> AlgLevelStructure:
        if self.kind == "full":
            P, Q = self.data
            return AlgLevelStructure("full", (R.mul(alpha, P), R.mul(alpha, Q)))
        return AlgLevelStructure(self.kind, R.mul(alpha, self.data))

    def canonical(self, R: ResRing) -> AlgLevelStructure:
        if self.kind == "gamma0":
            P = self.data
            best = min(R.smul(c, P) for c in range(1, R.N + 1) if gcd(c, R.N) == 1)
            return AlgLevelStructure("gamma0", best)
        if self.kind == "gamma1":
            return AlgLevelStructure("gamma1", min(self.data, R.neg(self.data)))
        P, Q = self.data
        return AlgLevelStructure("full", min((P, Q), (R.neg(P), R.neg(Q))))

    def conductor(self, R: ResRing) -> QuadIdeal:
        if self.kind == "full":
            return R.O.unit_ideal()
        return conductor_ideal(R, self.data)

    def is_valid(self, R: ResRing) -> bool:
        if self.kind == "full":
            P, Q = self.data
            det = P[0] * Q[1] - P[1] * Q[0]
            return gcd(det, R.N) == 1
        return R.additive_order(self.data) == R.N


def level_structures(R: ResRing, kind: str) -> list[AlgLevelStructure]:
    """All level structures of a kind on O/NO, one canonical representative each."""
    if kind not in KINDS:
        raise ResRingError(f"unknown kind {kind!r}")
    seen = set()
    if kind == "full":
        els = R.elements()
        cands = (AlgLevelStructure("full", (P, Q)) for P in els for Q in els)
    else:
        cands = (AlgLevelStructure(kind, P) for P in R.elements())
    for g in cands:
        if g.is_valid(R):
            seen.add(g.canonical(R))
    return sorted(seen, key=lambda g: g.data)


@dataclass(frozen=True)
class StabilizerGroup:
    kind: str
    modulus: QuadIdeal  # A^{-1} N O (N O itself for full structures)
    elements: tuple

    def __contains__(self, alpha) -> bool:
        return tuple(alpha) in self._set

    @cached_property
    def _set(self):
        return frozenset(self.elements)

    @property
    def order(self) -> int:
        return len(self.elements)


def stabilizer_predicate(R: ResRing, kind: str, modulus: QuadIdeal):
    """alpha -> membership test from the congruence description of the stabilizer."""
    if kind in ("full", "gamma1"):
        return lambda a: modulus.contains(R.add(a, (-1, 0))) or modulus.contains(R.add(a, (1, 0)))
    ints = [c for c in range(R.N) if gcd(c, R.N) == 1]
    return lambda a: any(modulus.contains(R.add(a, (-c, 0))) for c in ints)


def stabilizer(R: ResRing, gamma: AlgLevelStructure) -> StabilizerGroup:
    """Units fixing gamma up to its equivalence; the congruence test is checked against the action."""
    if not gamma.is_valid(R):
        raise ResRingError(f"{gamma} is not a valid {gamma.kind} structure mod {R.N}")
    if gamma.kind == "full":
        modulus = R.O.ideal(R.N)
    else:
        modulus = colon_ideal(R.O, conductor_ideal(R, gamma.data), R.N)
    pred = stabilizer_predicate(R, gamma.kind, modulus)
    base = gamma.canonical(R)
    elems = []
    for a in R.units:
        by_action = gamma.act(R, a).canonical(R) == base
        if by_action != pred(a):
            raise AssertionError(f"stabilizer congruence disagrees with the action at {a}")
        if by_action:
            elems.append(a)
    return StabilizerGroup(gamma.kind, modulus, tuple(elems))


def orbit(R: ResRing, gamma: AlgLevelStructure, gens) -> list[AlgLevelStructure]:
    gens = [R(g) for g in gens]
    for g in gens:
        if not R.is_unit(g):
            raise ResRingError(f"generator {g} is not a unit of O/{R.N}O")
    start = gamma.canonical(R)
    seen = {start}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = x.act(R, g).canonical(R)
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return sorted(seen, key=lambda g: g.data)


def orbit_size(R: ResRing, gamma: AlgLevelStructure, gens) -> int:
    """Orbit length of gamma under the group generated by gens.

    Also computed as |H| / |H meet Stab(gamma)| and the two are required to agree.
    """
    m = len(orbit(R, gamma, gens))
    H = R.subgroup(gens)
    stab = stabilizer(R, gamma)
    closed = len(H) // sum(1 for h in H if h in stab)
    if closed != m:
        raise AssertionError(f"orbit length {m} != |H|/|H & Stab| = {closed}")
    return m


def representative(R: ResRing, A: QuadIdeal, kind: str = "gamma0") -> AlgLevelStructure:
    """Some P in O/NO with (P, N) = A and additive order N."""
    for P in R.elements():
        g = AlgLevelStructure(kind, P)
        if g.is_valid(R) and A.contains(P) and conductor_ideal(R, P) == A:
            return g
    raise ResRingError(f"no element of additive order {R.N} generates {A} with {R.N}")
