"""Component-structure predictions for level-structure craters, from ideal arithmetic alone."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from math import gcd

from sympy import factorint, isprime

from .qorder import (
    NotPrincipalError,
    OrderError,
    QuadIdeal,
    QuadOrder,
    euler_phi,
    factor_prime,
    ideal_class_order,
    principal_generator,
    suborder_class_number,
)
from .resring import (
    KINDS,
    AlgLevelStructure,
    ResRing,
    colon_ideal,
    divisors_of_NO,
    level_structures,
    orbit_size,
    phi_O,
    representative,
)


class InertPrimeError(OrderError):
    """ell is inert in O, so the ell-isogeny graph on the crater level has no edges."""


class ParameterError(ValueError):
    pass


@dataclass(frozen=True)
class ComponentProfile:
    counts: tuple  # sorted ((size, count), ...), largest size first
    n: int

    @staticmethod
    def from_counter(c, n: int) -> ComponentProfile:
        return ComponentProfile(tuple(sorted(((int(s), int(k)) for s, k in c.items() if k), reverse=True)), n)

    @staticmethod
    def from_sizes(sizes, n: int) -> ComponentProfile:
        return ComponentProfile.from_counter(Counter(sizes), n)

    @property
    def total(self) -> int:
        return sum(s * k for s, k in self.counts)

    @property
    def num_components(self) -> int:
        return sum(k for _, k in self.counts)

    def as_dict(self) -> dict:
        return dict(self.counts)

    def check(self):
        bad = [s for s, _ in self.counts if s % self.n]
        if bad:
            raise AssertionError(f"component sizes {bad} are not multiples of n = {self.n}")

    def __str__(self):
        return "{" + ", ".join(f"{s}: {k}" for s, k in self.counts) + "}"


@dataclass(frozen=True)
class CraterShape:
    kind: str  # "cycle", "one-vertex-two-loops", "single-edge", "one-vertex-one-loop"
    n: int

    def __str__(self):
        return f"cycle({self.n})" if self.kind == "cycle" else self.kind


def _prime_factors(N: int):
    return sorted(factorint(N)) if N > 1 else []


def _psi(N: int) -> int:
    """N * prod (1 + 1/p): the number of cyclic subgroups of order N in (Z/N)^2."""
    out = N
    for q in _prime_factors(N):
        out = out // q * (q + 1)
    return out


def vertex_count(n: int, N: int, kind: str) -> int:
    if N < 1:
        raise ParameterError("N must be >= 1")
    if kind == "gamma0":
        return n * _psi(N)
    if kind == "gamma1":
        if N == 1:
            return n
        if N == 2:
            return 3 * n
        return n * euler_phi(N) * _psi(N) // 2
    if kind == "full":
        if N == 1:
            return n
        if N == 2:
            return 6 * n
        return n * N * euler_phi(N) ** 2 * _psi(N) // 2
    raise ParameterError(f"unknown kind {kind!r}")


@dataclass(frozen=True)
class CraterData:
    O: QuadOrder
    ell: int
    kind: str  # split or ramified
    n: int
    l: QuadIdeal
    lbar: QuadIdeal
    lam: tuple
    lam_bar: tuple

    @property
    def shape(self) -> CraterShape:
        if self.kind == "split":
            return CraterShape("one-vertex-two-loops" if self.n == 1 else "cycle", self.n)
        return CraterShape("one-vertex-one-loop" if self.n == 1 else "single-edge", self.n)


def crater_data(O: QuadOrder, ell: int) -> CraterData:
    fp = factor_prime(O, ell)
    if fp.kind == "inert":
        raise InertPrimeError(
            f"{ell} is inert in the order of discriminant {O.D}: the crater has no {ell}-isogenies (totally disconnected)"
        )
    l = fp.ideals[0]
    lbar = fp.ideals[1] if fp.kind == "split" else l
    n = ideal_class_order(O, l)
    lam = principal_generator(O, l**n)
    return CraterData(O, ell, fp.kind, n, l, lbar, lam, O.conj(lam))


def crater_shape(O: QuadOrder, ell: int) -> CraterShape:
    return crater_data(O, ell).shape


def check_params(O: QuadOrder, ell: int, N: int, p: int | None = None):
    if N < 1:
        raise ParameterError("N must be >= 1")
    if not isprime(ell):
        raise ParameterError(f"ell = {ell} is not prime")
    if gcd(N, ell) != 1:
        raise ParameterError(f"N = {N} and ell = {ell} are not coprime")
    if gcd(N, O.conductor) != 1:
        raise ParameterError(f"N = {N} and the conductor {O.conductor} are not coprime")
    if O.conductor % ell == 0:
        raise ParameterError(f"ell = {ell} divides the conductor {O.conductor}")
    if p is not None and gcd(N, p) != 1:
        raise ParameterError(f"N = {N} and p = {p} are not coprime")


GENERATOR_SETS = ("walks", "conjugates", "lambda")


def generators(cd: CraterData, kind: str, which: str = "walks") -> list:
    """Units of O/NO through which closed walks act on level structures of the given kind.

    "walks": closed walks through one curve realize exactly the principal ideals
    l^i lbar^j with n | i - j, i.e. the group generated by lambda and ell (lambda_bar is
    listed too; it is ell^n / lambda).  For gamma0 ell is a scalar and drops out.
    "conjugates" gives {lambda, lambda_bar}; "lambda" gives the l-edges alone.
    """
    if which not in GENERATOR_SETS:
        raise ParameterError(f"unknown generator set {which!r}")
    if kind == "gamma0" or which == "lambda":
        return [cd.lam]
    if which == "conjugates":
        return [cd.lam, cd.lam_bar]
    return [cd.lam, cd.lam_bar, (cd.ell, 0)]


def _structures_with_conductor(R: ResRing, B_phi: int, kind: str) -> int:
    """Number of level structures (P or +-P or subgroup) with a given (P, N) of co-norm phi."""
    N = R.N
    if kind == "gamma0":
        return B_phi // euler_phi(N)
    return B_phi // 2 if N > 2 else B_phi


@dataclass
class IdealRow:
    A: QuadIdeal
    colon: QuadIdeal
    phi: int
    count: int
    m: int
    size: int
    components: int


@dataclass
class Prediction:
    kind: str
    N: int
    crater: CraterData
    profile: ComponentProfile
    rows: list = field(default_factory=list)
    m_full: int | None = None
    notes: list = field(default_factory=list)


def predict(O: QuadOrder, ell: int, N: int, kind: str, gens: str = "walks") -> Prediction:
    """General path: iterate over the conductor ideals (P, N) and take orbit lengths."""
    if kind not in KINDS:
        raise ParameterError(f"unknown kind {kind!r}")
    check_params(O, ell, N)
    cd = crater_data(O, ell)
    n = cd.n
    if N == 1:
        return Prediction(kind, N, cd, ComponentProfile.from_counter({n: 1}, n))
    R = ResRing(O, N)
    which = gens
    gens = generators(cd, kind, which)
    if kind == "full":
        gamma = AlgLevelStructure("full", ((1, 0), (0, 1)))
        m = orbit_size(R, gamma, gens)
        total = vertex_count(1, N, "full")
        if total % m:
            raise AssertionError(f"orbit length {m} does not divide {total}")
        prof = ComponentProfile.from_counter({n * m: total // m}, n)
        return Prediction(kind, N, cd, prof, m_full=m)
    counter = Counter()
    rows = []
    for A in divisors_of_NO(O, N):
        B = colon_ideal(O, A, N)
        ph = phi_O(O, B)
        count = _structures_with_conductor(R, ph, kind)
        gamma = representative(R, A, kind)
        m = orbit_size(R, gamma, gens)
        if count % m:
            raise AssertionError(f"orbit length {m} does not divide the {count} structures with conductor {A}")
        rows.append(IdealRow(A, B, ph, count, m, n * m, count // m))
        counter[n * m] += count // m
    prof = ComponentProfile.from_counter(counter, n)
    if prof.total != vertex_count(n, N, kind):
        raise AssertionError(f"predicted mass {prof.total} != vertex count {vertex_count(n, N, kind)}")
    prof.check()
    return Prediction(kind, N, cd, prof, rows)


def predict_gamma0(O, ell, N) -> ComponentProfile:
    return predict(O, ell, N, "gamma0").profile


def predict_gamma1(O, ell, N) -> ComponentProfile:
    return predict(O, ell, N, "gamma1").profile


def predict_full(O, ell, N) -> ComponentProfile:
    return predict(O, ell, N, "full").profile


def count_structures_by_enumeration(O: QuadOrder, N: int, kind: str) -> int:
    """Level structures on O/NO counted one by one (matches vertex_count(1, N, kind))."""
    return len(level_structures(ResRing(O, N), kind))


# ---------------------------------------------------------------------------
# closed forms for prime N


def _order_mod_scalars(R: ResRing, alpha) -> int:
    """Order of alpha in (O/NO)^x / (Z/NZ)^x."""
    k, cur = 1, R(alpha)
    while cur[1] != 0:
        cur = R.mul(cur, alpha)
        k += 1
    return k


def _order_mod_sign(R: ResRing, gens) -> int:
    """Order of the subgroup generated by gens in (O/NO)^x / {+-1}."""
    H = R.subgroup(list(gens) + [(-1, 0)])
    return len(H) // (2 if R.N > 2 else 1)


def _residue_at(O: QuadOrder, alpha, r: int, N: int) -> int:
    """Image of alpha in O/(N, Phi - r) = Z/NZ."""
    return (alpha[0] + alpha[1] * r) % N


def _order_in_ZN_mod_sign(vals, N: int) -> int:
    seen = {1}
    frontier = [1]
    gens = [v % N for v in vals] + [N - 1]
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = x * g % N
            if y not in seen:
                seen.add(y)
                frontier.append(y)
    return len(seen) // (2 if N > 2 else 1)


@dataclass
class CorollaryResult:
    profile: ComponentProfile | None
    literal_profile: ComponentProfile | None = None
    case: str = ""
    flagged: bool = False
    note: str = ""


def corollary_gamma0(O: QuadOrder, ell: int, N: int) -> CorollaryResult:
    """Prime-N closed form for gamma0: inert, split and ramified N."""
    if not isprime(N):
        raise ParameterError("closed form needs prime N")
    check_params(O, ell, N)
    cd = crater_data(O, ell)
    n = cd.n
    R = ResRing(O, N)
    m = _order_mod_scalars(R, cd.lam)
    kind = factor_prime(O, N).kind
    c = Counter()
    if kind == "inert":
        c[n * m] += (N + 1) // m
    elif kind == "split":
        c[n * m] += (N - 1) // m
        c[n] += 2
    else:
        c[n * m] += N // m
        c[n] += 1
    return CorollaryResult(ComponentProfile.from_counter(c, n), case=kind)


def corollary_gamma1(O: QuadOrder, ell: int, N: int, gens: str = "walks") -> CorollaryResult:
    """Odd prime N closed form for gamma1.

    The ramified case is evaluated with the quotient order m1 in both the count and the size;
    the literal variant with m in the count is returned alongside and flagged when it differs.
    """
    if not isprime(N) or N == 2:
        raise ParameterError("closed form needs an odd prime N")
    check_params(O, ell, N)
    cd = crater_data(O, ell)
    n = cd.n
    R = ResRing(O, N)
    gens = generators(cd, "gamma1", gens)
    m = _order_mod_sign(R, gens)
    fp = factor_prime(O, N)
    c = Counter()
    if fp.kind == "inert":
        c[n * m] += (N * N - 1) // (2 * m)
        return CorollaryResult(ComponentProfile.from_counter(c, n), case="inert")
    roots = [r for r in range(N) if (r * r - O.s * r + O.m) % N == 0]
    if fp.kind == "split":
        c[n * m] += (N - 1) ** 2 // (2 * m)
        for r in roots:
            mi = _order_in_ZN_mod_sign([_residue_at(O, g, r, N) for g in gens], N)
            c[n * mi] += (N - 1) // (2 * mi)
        return CorollaryResult(ComponentProfile.from_counter(c, n), case="split")
    (r,) = roots
    m1 = _order_in_ZN_mod_sign([_residue_at(O, g, r, N) for g in gens], N)
    c[n * m] += (N * N - N) // (2 * m)
    lit = Counter(c)
    c[n * m1] += (N - 1) // (2 * m1)
    prof = ComponentProfile.from_counter(c, n)
    lit_prof = None
    flagged = False
    note = ""
    if (N - 1) % (2 * m) == 0:
        lit[n * m1] += (N - 1) // (2 * m)
        lit_prof = ComponentProfile.from_counter(lit, n)
        flagged = lit_prof != prof
    else:
        flagged = True
        note = f"(N-1)/(2m) = {N - 1}/{2 * m} is not an integer"
    if flagged and not note:
        note = f"literal count (N-1)/(2m) with m = {m} gives {lit_prof}, orbit engine gives {prof}"
    return CorollaryResult(prof, lit_prof, "ramified", flagged, note)


# ---------------------------------------------------------------------------
# generalized class groups


def generalized_class_group_orders(O: QuadOrder, N: int):
    """(|Cl_{NO}(N)|, |Cl_{O,1}(N)|)."""
    if gcd(N, O.conductor) != 1:
        raise ParameterError(f"N = {N} and the conductor {O.conductor} are not coprime")
    h = O.class_number
    first = suborder_class_number(O, N)
    ph = phi_O(O, O.ideal(N))
    second = h * ph // (2 if N > 2 else 1)
    return first, second


def _ray_residue(O: QuadOrder, I: QuadIdeal, J: QuadIdeal, N: int):
    """Residue of a generator of I * conj(J) mod N, up to sign; None if not principal."""
    try:
        g = principal_generator(O, I * J.conj())
    except NotPrincipalError:
        return None
    a, b = g[0] % N, g[1] % N
    return min((a, b), (-a % N, -b % N))


def ray_class_subgroup_order(O: QuadOrder, N: int, ideals) -> int:
    """Order of the subgroup of Cl_{O,1}(N) generated by ideals coprime to N.

    Elements are found by breadth-first multiplication.  Two ideals I, I' in the same
    Cl(O)-class are identified iff the generators of I*conj(J) and I'*conj(J) agree mod N
    up to sign, for a fixed J in that class.
    """
    ideals = list(ideals)
    for I in ideals:
        if gcd(I.norm, N) != 1:
            raise ParameterError(f"{I} is not coprime to {N}")
    start = O.unit_ideal()
    anchors = {}  # reduced form -> (J, set of residues)
    frontier = [start]

    def add(I):
        f = I.to_form().reduce()
        if f not in anchors:
            anchors[f] = (I, {_ray_residue(O, I, I, N)})
            return True
        J, seen = anchors[f]
        r = _ray_residue(O, I, J, N)
        if r in seen:
            return False
        seen.add(r)
        return True

    add(start)
    count = 1
    while frontier:
        nxt = []
        for I in frontier:
            for g in ideals:
                K = I * g
                if add(K):
                    count += 1
                    nxt.append(K)
        frontier = nxt
    return count

