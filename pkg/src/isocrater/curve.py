"""Short Weierstrass curves y^2 = x^3 + ax + b over F_p with points over extensions."""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property
from math import gcd, isqrt

from .arith import (
    ArithError,
    ExtField,
    FieldElem,
    Poly,
    PrimeField,
    irreducible_factors,
    make_extension,
    norm_product,
    one_root,
)

DEFAULT_MAX_EXT_DEGREE = 24


class CurveError(ValueError):
    pass


class SingularCurveError(CurveError):
    pass


class ExcludedJInvariantError(CurveError):
    pass


class SupersingularError(CurveError):
    pass


class ExtensionBoundError(CurveError):
    def __init__(self, needed: int, bound: int, what: str = ""):
        self.needed = needed
        self.bound = bound
        super().__init__(f"{what}needs extension degree {needed}, above the bound {bound} (raise --max-ext-degree)")


class Curve:
    """y^2 = x^3 + a x + b over a prime field, with j not in {0, 1728}."""

    def __init__(self, a, b, field: PrimeField | None = None):
        if field is None:
            if not isinstance(a, FieldElem):
                raise CurveError("pass a field or field elements")
            field = a.field
        if not isinstance(field, PrimeField):
            raise CurveError("curves are defined over prime fields only")
        self.field = field
        self.a = field(a)
        self.b = field(b)
        disc = 4 * self.a**3 + 27 * self.b**2
        if not disc:
            raise SingularCurveError(f"singular curve: 4a^3 + 27b^2 = 0 over {field}")
        if not self.a:
            raise ExcludedJInvariantError("j = 0 is excluded")
        if not self.b:
            raise ExcludedJInvariantError("j = 1728 is excluded")
        self.j = 1728 * 4 * self.a**3 / disc
        self._lifted = {}
        self._divpolys = {}

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def j_int(self) -> int:
        return self.j.raw

    def __eq__(self, other):
        return isinstance(other, Curve) and self.field == other.field and self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((self.field.p, self.a.raw, self.b.raw))

    def __repr__(self):
        return f"Curve(y^2 = x^3 + {self.a}x + {self.b} over F_{self.p})"

    def coeffs_in(self, K):
        """Raw (a, b) inside the field K (F_p itself or an extension of it)."""
        got = self._lifted.get(K)
        if got is None:
            if K == self.field:
                got = (self.a.raw, self.b.raw)
            elif isinstance(K, ExtField) and K.base == self.field:
                got = (K.embed(self.a.raw), K.embed(self.b.raw))
            else:
                raise ArithError(f"{K} is not an extension of {self.field}")
            self._lifted[K] = got
        return got

    def rhs_poly(self) -> Poly:
        F = self.field
        return Poly(F, [self.b.raw, self.a.raw, 0, 1])

    def rhs(self, x: FieldElem) -> FieldElem:
        K = x.field
        a, b = self.coeffs_in(K)
        xr = x.raw
        v = K.add(K.mul(K.add(K.mul(xr, xr), a), xr), b)
        return FieldElem(K, v)

    def infinity(self, K=None) -> Point:
        return Point(self, K or self.field, None, None)

    def point(self, x, y, K=None) -> Point:
        K = K or (x.field if isinstance(x, FieldElem) else self.field)
        x, y = K(x), K(y)
        if y * y != self.rhs(x):
            raise CurveError(f"({x}, {y}) is not on {self}")
        return Point(self, K, x.raw, y.raw)

    def lift_x(self, x: FieldElem) -> Point | None:
        """Point with abscissa x and the canonical (smaller) ordinate, if any."""
        y = self.rhs(x).sqrt()
        if y is None:
            return None
        return Point(self, x.field, x.raw, y.raw)

    def random_point(self, K, rng: random.Random) -> Point:
        while True:
            x = K.random(rng)
            P = self.lift_x(x)
            if P is not None:
                return -P if rng.randrange(2) else P

    @cached_property
    def _counted(self):
        return _count(self)

    @property
    def trace(self) -> int:
        return self._counted[1]

    @property
    def frob_disc(self) -> int:
        return self._counted[2]

    def quadratic_twist(self, d=None) -> Curve:
        F = self.field
        if d is None:
            d = next(F(c) for c in range(2, F.p) if not F(c).is_square())
        d = F(d)
        return Curve(self.a * d * d, self.b * d**3)

    def division_polynomial(self, m: int) -> Poly:
        return division_polynomial(self, m)


class Point:
    """Affine point (raw coordinates in field K) or the point at infinity (x is None)."""

    __slots__ = ("curve", "field", "x", "y")

    def __init__(self, curve: Curve, field, x, y):
        self.curve = curve
        self.field = field
        self.x = x
        self.y = y

    def is_zero(self) -> bool:
        return self.x is None

    @property
    def xe(self) -> FieldElem:
        return FieldElem(self.field, self.x)

    @property
    def ye(self) -> FieldElem:
        return FieldElem(self.field, self.y)

    def key(self):
        """Canonical encoding; infinity sorts first."""
        if self.x is None:
            return (0,)
        return (1, self.x, self.y)

    def __eq__(self, other):
        return isinstance(other, Point) and self.x == other.x and self.y == other.y and self.curve == other.curve

    def __hash__(self):
        return hash((self.x, self.y))

    def __lt__(self, other):
        return self.key() < other.key()

    def __repr__(self):
        if self.x is None:
            return "O"
        fmt = self.field.fmt
        return f"({fmt(self.x)}, {fmt(self.y)})"

    def __neg__(self):
        if self.x is None:
            return self
        return Point(self.curve, self.field, self.x, self.field.neg(self.y))

    def __add__(self, other: Point) -> Point:
        if self.x is None:
            return other
        if other.x is None:
            return self
        K = self.field
        if other.field != K:
            raise ArithError("points over different fields")
        x1, y1, x2, y2 = self.x, self.y, other.x, other.y
        mul, sub, add = K.mul, K.sub, K.add
        if x1 == x2:
            if K.is_zero(add(y1, y2)):
                return Point(self.curve, K, None, None)
            a = self.curve.coeffs_in(K)[0]
            x1s = mul(x1, x1)
            num = add(add(add(x1s, x1s), x1s), a)
            lam = mul(num, K.inv(add(y1, y1)))
        else:
            lam = mul(sub(y2, y1), K.inv(sub(x2, x1)))
        x3 = sub(sub(mul(lam, lam), x1), x2)
        y3 = sub(mul(lam, sub(x1, x3)), y1)
        return Point(self.curve, K, x3, y3)

    def __sub__(self, other: Point) -> Point:
        return self + (-other)

    def __mul__(self, n: int) -> Point:
        if n < 0:
            return (-self) * (-n)
        result = Point(self.curve, self.field, None, None)
        base = self
        while n:
            if n & 1:
                result = result + base
            n >>= 1
            if n:
                base = base + base
        return result

    __rmul__ = __mul__

    def frobenius(self) -> Point:
        if self.x is None:
            return self
        K = self.field
        return Point(self.curve, K, K.frobenius(self.x), K.frobenius(self.y))

    def order_divides(self, n: int) -> bool:
        return (self * n).is_zero()

    def has_exact_order(self, n: int) -> bool:
        if not self.order_divides(n):
            return False
        return all(not (self * (n // q)).is_zero() for q in _prime_factors(n))

    def on_curve(self) -> bool:
        if self.x is None:
            return True
        return self.ye * self.ye == self.curve.rhs(self.xe)


def _prime_factors(n: int):
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def curve_new(a, b, p: int | None = None) -> Curve:
    """Validated curve; ``a`` and ``b`` may be ints when ``p`` is given."""
    if p is not None:
        F = PrimeField(p)
        return Curve(F(a), F(b), F)
    return Curve(a, b)


# ---------------------------------------------------------------------------
# point counting

EXHAUSTIVE_COUNT_LIMIT = 10**4


def _count(E: Curve):
    p = E.p
    if p < EXHAUSTIVE_COUNT_LIMIT:
        order = _count_exhaustive(E)
    else:
        order = _count_bsgs(E)
    t = p + 1 - order
    if t % p == 0:
        raise SupersingularError(f"{E} is supersingular (t = {t})")
    return order, t, t * t - 4 * p


def _count_exhaustive(E: Curve) -> int:
    p = E.p
    a, b = E.a.raw, E.b.raw
    squares = bytearray(p)
    for x in range(1, (p + 1) // 2):
        squares[x * x % p] = 1
    total = 1
    for x in range(p):
        v = (x * x * x + a * x + b) % p
        total += 1 if v == 0 else (2 if squares[v] else 0)
    return total


def _multiples_in_window(P: Point, lo: int, hi: int) -> list[int]:
    """All M in [lo, hi] with M*P = O (baby-step giant-step)."""
    width = hi - lo
    m = isqrt(width) + 1
    baby = {}
    R = P.curve.infinity(P.field)
    for j in range(m):
        baby.setdefault(R.key(), []).append(j)
        R = R + P
    step = -(P * m)
    # want (lo + i*m + j) P = O, i.e. j P = -(lo + i m) P
    G = -(P * lo)
    found = []
    for i in range(m + 1):
        for j in baby.get(G.key(), ()):
            M = lo + i * m + j
            if lo <= M <= hi:
                found.append(M)
        G = G + step
    return sorted(set(found))


def _count_bsgs(E: Curve, seed: int = 0) -> int:
    p = E.p
    rng = random.Random(seed)
    r = 2 * isqrt(p) + 2
    lo, hi = p + 1 - r, p + 1 + r
    twist = E.quadratic_twist()
    cands = set(range(lo, hi + 1))
    for _ in range(64):
        P = E.random_point(E.field, rng)
        cands &= set(_multiples_in_window(P, lo, hi))
        # the twist has order 2p + 2 - M
        Q = twist.random_point(twist.field, rng)
        twist_ok = set(2 * p + 2 - M for M in _multiples_in_window(Q, 2 * p + 2 - hi, 2 * p + 2 - lo))
        cands &= twist_ok
        if len(cands) == 1:
            return cands.pop()
    raise CurveError(f"point count did not converge for {E}")


def point_count(E: Curve):
    """(order, trace, Frobenius discriminant); supersingular curves raise."""
    return E._counted


# ---------------------------------------------------------------------------
# division polynomials (x-only parts: psi_m = y^[m even] * P_m)


def division_polynomial(E: Curve, m: int) -> Poly:
    """The x-only part P_m of psi_m: psi_m = P_m for odd m, psi_m = y P_m for even m.

    So P_2 = 2 (psi_2^2 = 4(x^3 + ax + b)) and deg P_m = (m^2 - 1)/2 for odd m.
    """
    if m < 0:
        raise ValueError("m must be >= 0")
    memo = E._divpolys
    if not memo:
        F = E.field
        a, b = E.a.raw, E.b.raw
        p = F.p
        memo[0] = Poly(F, [])
        memo[1] = Poly(F, [1])
        memo[2] = Poly(F, [2])
        memo[3] = Poly(F, [(-a * a) % p, 12 * b % p, 6 * a % p, 0, 3])
        memo[4] = Poly(F, [(-8 * b * b - a**3) % p, (-4 * a * b) % p, (-5 * a * a) % p, 20 * b % p, 5 * a % p, 0, 1]).scale(4)
    if m in memo:
        return memo[m]
    f2 = E.rhs_poly() ** 2
    k, odd = divmod(m, 2)
    P = lambda i: division_polynomial(E, i)  # noqa: E731
    if odd:
        if k % 2 == 0:
            out = f2 * P(k + 2) * P(k) ** 3 - P(k - 1) * P(k + 1) ** 3
        else:
            out = P(k + 2) * P(k) ** 3 - f2 * P(k - 1) * P(k + 1) ** 3
    else:
        inner = P(k + 2) * P(k - 1) ** 2 - P(k - 2) * P(k + 1) ** 2
        out = (P(k) * inner).scale(E.field(2).inv())
    memo[m] = out
    return out


def multiple_x(E: Curve, k: int, x: FieldElem) -> FieldElem | None:
    """x(kR) for any R with x(R) = x; None when kR is infinity."""
    if k == 1:
        return x
    Pm, P0, Pp = (division_polynomial(E, i)(x) for i in (k - 1, k, k + 1))
    if not P0:
        return None
    f = E.rhs(x)
    if k % 2 == 0:
        return x - Pm * Pp / (f * P0 * P0)
    return x - f * Pm * Pp / (P0 * P0)


def torsion_abscissa_poly(E: Curve, N: int) -> Poly:
    """Monic polynomial whose roots are the abscissae of E[N] minus infinity."""
    P = division_polynomial(E, N)
    if N % 2 == 0:
        P = P * E.rhs_poly()
    return P.monic()


# ---------------------------------------------------------------------------
# torsion bases


@dataclass(frozen=True)
class TorsionBasis:
    N: int
    k: int
    field: object
    P: Point
    Q: Point

    def combination(self, i: int, j: int) -> Point:
        return self.P * i + self.Q * j

    def table(self) -> dict:
        """{(i, j): iP + jQ} for 0 <= i, j < N."""
        N = self.N
        rows = {}
        col = self.P.curve.infinity(self.field)
        for j in range(N):
            acc = col
            for i in range(N):
                rows[(i, j)] = acc
                acc = acc + self.P
            col = col + self.Q
        return rows


def torsion_field_degree(E: Curve, N: int, seed: int = 0) -> int:
    """Least k with E[N] inside E(F_{p^k})."""
    if N == 1:
        return 1
    return _torsion_degree_data(E, N, seed)[0]


def _torsion_degree_data(E: Curve, N: int, seed: int):
    F = E.field
    A = torsion_abscissa_poly(E, N)
    factors = irreducible_factors(A, seed)
    L = 1
    for g in factors:
        L = L * g.degree // gcd(L, g.degree)
    f = E.rhs_poly()
    k = L
    for g in factors:
        d = g.degree
        if (L // d) % 2 == 0:
            continue
        # f(r) for a root r of g is a square in F_{p^d} iff its norm to F_p is a square
        if not F.is_square(norm_product(g, f)):
            k = 2 * L
            break
    return k, factors


def _subgroup_closure(group: dict, gen: Point) -> dict:
    """The group generated by an existing subgroup (as a set-like dict) and gen."""
    if gen.key() in group:
        return group
    multiples = []
    R = gen
    while R.key() not in group:
        multiples.append(R)
        R = R + gen
    out = dict(group)
    for M in multiples:
        for S in group.values():
            T = S + M
            out[T.key()] = T
    return out


def torsion_points(E: Curve, N: int, max_degree: int = DEFAULT_MAX_EXT_DEGREE, seed: int = 0):
    """(K, all N^2 points of E[N] over K) with K of minimal degree."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if N % E.p == 0:
        raise CurveError("N must be prime to p")
    if N == 1:
        K = make_extension(E.field, 1)
        return K, [E.infinity(K)]
    k, factors = _torsion_degree_data(E, N, seed)
    if k > max_degree:
        raise ExtensionBoundError(k, max_degree, f"E[{N}] on {E} ")
    K = make_extension(E.field, k)
    O = E.infinity(K)
    group = {O.key(): O}
    xs = set()
    for idx, g in enumerate(factors):
        if len(group) == N * N:
            break
        if any(g(FieldElem(K, x)).is_zero() for x in xs):
            continue
        r = one_root(g, K, seed + idx)
        R = E.lift_x(r)
        gens = [R]
        S = R.frobenius()
        while S != R and len(gens) < K.k:
            gens.append(S)
            S = S.frobenius()
        for G in gens:
            group = _subgroup_closure(group, G)
        xs = {pt.x for pt in group.values() if pt.x is not None}
    if len(group) != N * N:
        raise CurveError(f"failed to assemble E[{N}] (got {len(group)} points)")
    pts = sorted(group.values(), key=Point.key)
    return K, pts


def canonical_basis(points: list, N: int):
    """Smallest P of exact order N, then the smallest Q of exact order N independent of P."""
    ordered = sorted(points, key=Point.key)
    P = next(pt for pt in ordered if pt.has_exact_order(N))
    span_P = set()
    R = P.curve.infinity(P.field)
    for _ in range(N):
        span_P.add(R.key())
        R = R + P
    for Q in ordered:
        if not Q.has_exact_order(N):
            continue
        R, ok = Q, True
        for _ in range(1, N):
            if R.key() in span_P:
                ok = False
                break
            R = R + Q
        if ok:
            return P, Q
    raise CurveError("no independent partner found")


def torsion_basis(E: Curve, N: int, max_degree: int = DEFAULT_MAX_EXT_DEGREE, seed: int = 0) -> TorsionBasis:
    K, pts = torsion_points(E, N, max_degree, seed)
    if N == 1:
        return TorsionBasis(1, 1, K, pts[0], pts[0])
    P, Q = canonical_basis(pts, N)
    return TorsionBasis(N, K.k, K, P, Q)
