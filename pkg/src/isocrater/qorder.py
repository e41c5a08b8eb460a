"""Imaginary quadratic orders O = Z[Phi], their ideals as lattices, and class groups via forms.

Convention: for discriminant D put s = D mod 2 and m = (s - D)/4, so Phi^2 = s*Phi - m
and N(x + y*Phi) = x^2 + s*x*y + m*y^2.  Elements are integer pairs (x, y).

Ideal/form dictionary, used everywhere in this module:
    primitive ideal [a, b + Phi]  <->  form (a, 2b + s, (b^2 + s*b + m)/a)
    form (A, B, C)                <->  ideal [A, (B - s)/2 + Phi]
This is an isomorphism of class groups (it is the textbook map followed by inversion).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from math import gcd, isqrt

from sympy import factorint


class OrderError(ValueError):
    pass


class ConductorError(OrderError):
    pass


class NotPrincipalError(OrderError):
    pass


def kronecker(D: int, q: int) -> int:
    """(D | q) for a prime q."""
    if q == 2:
        if D % 2 == 0:
            return 0
        return 1 if D % 8 in (1, 7) else -1
    if D % q == 0:
        return 0
    return 1 if pow(D, (q - 1) // 2, q) == 1 else -1


def _xgcd(a: int, b: int):
    """(g, x, y) with a*x + b*y = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def is_discriminant(D: int) -> bool:
    return D < 0 and D % 4 in (0, 1)


def fundamental_part(D: int):
    """(d_K, f) with D = f^2 d_K and d_K fundamental."""
    f = 1
    for q, e in factorint(-D).items():
        f *= q ** (e // 2)
    while True:
        dk = D // (f * f)
        if dk % 4 in (0, 1) and _is_fundamental(dk):
            return dk, f
        # only q = 2 can leave a non-discriminant cofactor
        f //= 2


def _is_fundamental(d: int) -> bool:
    if d % 4 == 1:
        return all(e == 1 for e in factorint(-d).values())
    if d % 4 == 0:
        r = d // 4
        return r % 4 in (2, 3) and all(e == 1 for e in factorint(-r).values())
    return False


class QuadOrder:
    """The imaginary quadratic order of discriminant D."""

    def __init__(self, D: int):
        D = int(D)
        if not is_discriminant(D):
            raise OrderError(f"{D} is not a negative discriminant (need D < 0, D = 0 or 1 mod 4)")
        self.D = D
        self.s = D % 2
        self.m = (self.s - D) // 4
        self.fundamental_disc, self.conductor = fundamental_part(D)

    def __eq__(self, other):
        return isinstance(other, QuadOrder) and other.D == self.D

    def __hash__(self):
        return hash(("O", self.D))

    def __repr__(self):
        return f"QuadOrder({self.D})"

    # element arithmetic -----------------------------------------------------
    def mul(self, u, v):
        a, b = u
        c, d = v
        bd = b * d
        return (a * c - bd * self.m, a * d + b * c + bd * self.s)

    def conj(self, u):
        a, b = u
        return (a + b * self.s, -b)

    def norm(self, u) -> int:
        a, b = u
        return a * a + self.s * a * b + self.m * b * b

    def trace(self, u) -> int:
        a, b = u
        return 2 * a + self.s * b

    def fmt(self, u) -> str:
        a, b = u
        if b == 0:
            return str(a)
        coef = "" if b == 1 else "-" if b == -1 else str(b)
        if a == 0:
            return f"{coef}Φ"
        return f"{coef}Φ {'+' if a > 0 else '-'} {abs(a)}"

    # ideals -------------------------------------------------------------------
    def ideal(self, *gens) -> QuadIdeal:
        """The O-ideal generated by the given elements (ints or pairs)."""
        vecs = []
        for g in gens:
            g = (g, 0) if isinstance(g, int) else tuple(g)
            vecs.append(g)
            vecs.append(self.mul(g, (0, 1)))
        return QuadIdeal.from_lattice(self, vecs)

    def unit_ideal(self) -> QuadIdeal:
        return QuadIdeal(self, 1, 0, 1)

    def principal(self, alpha) -> QuadIdeal:
        return self.ideal(alpha)

    # forms --------------------------------------------------------------------
    def identity_form(self) -> Form:
        return Form(1, self.s, self.m)

    @cached_property
    def class_group(self) -> ClassGroup:
        return class_group(self)

    @property
    def class_number(self) -> int:
        return self.class_group.h

    # suborders ------------------------------------------------------------------
    def suborder(self, f: int) -> QuadOrder:
        return QuadOrder(f * f * self.D)

    def from_suborder(self, f: int, u):
        """Coordinates in this order of an element of Z + fO given in the suborder's basis."""
        s2 = (f * f * self.D) % 2
        shift = (s2 - f * self.s) // 2
        a, b = u
        return (a + b * shift, b * f)

    def to_suborder(self, f: int, u):
        s2 = (f * f * self.D) % 2
        shift = (s2 - f * self.s) // 2
        x, y = u
        if y % f:
            raise OrderError(f"{self.fmt(u)} is not in the index-{f} suborder")
        b = y // f
        return (x - b * shift, b)


@dataclass(frozen=True)
class QuadIdeal:
    """Ideal with Hermite basis [a, b + c*Phi]: a, c > 0 and 0 <= b < a."""

    order: QuadOrder
    a: int
    b: int
    c: int

    @staticmethod
    def from_lattice(O: QuadOrder, vectors) -> QuadIdeal:
        a, b, c = hnf(vectors)
        I = QuadIdeal(O, a, b, c)
        if not I._is_ideal():
            raise OrderError("lattice is not closed under multiplication by Phi")
        return I

    def _is_ideal(self) -> bool:
        O = self.order
        return all(self.contains(O.mul(v, (0, 1))) for v in self.basis())

    @property
    def norm(self) -> int:
        return self.a * self.c

    def basis(self):
        return [(self.a, 0), (self.b, self.c)]

    def contains(self, u) -> bool:
        x, y = u
        if y % self.c:
            return False
        return (x - (y // self.c) * self.b) % self.a == 0

    def contains_ideal(self, other: QuadIdeal) -> bool:
        return all(self.contains(v) for v in other.basis())

    def __mul__(self, other: QuadIdeal) -> QuadIdeal:
        O = self.order
        vecs = [O.mul(u, v) for u in self.basis() for v in other.basis()]
        return QuadIdeal.from_lattice(O, vecs)

    def __pow__(self, e: int) -> QuadIdeal:
        if e < 0:
            raise OrderError("negative ideal powers are not represented")
        out = self.order.unit_ideal()
        base = self
        while e:
            if e & 1:
                out = out * base
            e >>= 1
            if e:
                base = base * base
        return out

    def scale(self, k: int) -> QuadIdeal:
        return QuadIdeal.from_lattice(self.order, [(k * x, k * y) for x, y in self.basis()])

    def conj(self) -> QuadIdeal:
        O = self.order
        return QuadIdeal.from_lattice(O, [O.conj(v) for v in self.basis()])

    @property
    def content(self) -> int:
        return self.c

    def primitive_part(self) -> QuadIdeal:
        c = self.c
        return QuadIdeal(self.order, self.a // c, self.b // c, 1)

    def to_form(self) -> Form:
        J = self.primitive_part()
        O = self.order
        a, b = J.a, J.b
        return Form(a, 2 * b + O.s, (b * b + O.s * b + O.m) // a)

    def is_principal(self) -> bool:
        return ideal_is_principal(self.order, self)

    def __repr__(self):
        O = self.order
        gen = O.fmt((self.b, self.c))
        return f"({self.a}, {gen})"

    def generators_str(self) -> str:
        """Two-generator form (a, Phi - r) for norm-a primitive ideals, else the Hermite basis."""
        return repr(self)


def hnf(vectors):
    """Hermite basis (a, b, c) of the full-rank lattice spanned by integer pairs."""
    pivot = None
    xs = []
    for x, y in vectors:
        if y == 0:
            if x:
                xs.append(x)
            continue
        if pivot is None:
            pivot = (x, y)
            continue
        px, py = pivot
        g, s, t = _xgcd(py, y)
        xs.append((y // g) * px - (py // g) * x)
        pivot = (s * px + t * x, g)
    a = 0
    for x in xs:
        a = gcd(a, x)
    if pivot is None or a == 0:
        raise OrderError("lattice is not of full rank")
    px, py = pivot
    if py < 0:
        px, py = -px, -py
    return a, px % a, py


def form_to_ideal(O: QuadOrder, f: Form) -> QuadIdeal:
    A, B, _ = f
    return QuadIdeal.from_lattice(O, [(A, 0), ((B - O.s) // 2, 1)])


# ---------------------------------------------------------------------------
# binary quadratic forms


class Form(tuple):
    """Primitive positive definite form (A, B, C) = A x^2 + B x y + C y^2."""

    def __new__(cls, A, B, C):
        return super().__new__(cls, (int(A), int(B), int(C)))

    @property
    def disc(self) -> int:
        A, B, C = self
        return B * B - 4 * A * C

    def is_reduced(self) -> bool:
        A, B, C = self
        if not (abs(B) <= A <= C):
            return False
        if (A == C or abs(B) == A) and B < 0:
            return False
        return True

    def reduce(self) -> Form:
        A, B, C = self
        while True:
            if not (-A < B <= A):
                k = (A - B) // (2 * A)
                C = A * k * k + B * k + C
                B = B + 2 * A * k
            if A > C:
                A, B, C = C, -B, A
                continue
            if A == C and B < 0:
                B = -B
            return Form(A, B, C)

    def compose(self, other: Form) -> Form:
        """Gauss composition (Shanks/Cohen), reduced."""
        f1, f2 = self, other
        if f1[0] > f2[0]:
            f1, f2 = f2, f1
        a1, b1, _ = f1
        a2, b2, c2 = f2
        s = (b1 + b2) // 2
        n = b2 - s
        if a2 % a1 == 0:
            y1, d = 0, a1
        else:
            d, u, _ = _xgcd(a2, a1)
            y1 = u
        if s % d == 0:
            y2, x2, d1 = -1, 0, d
        else:
            d1, x2, y2 = _xgcd(s, d)
            y2 = -y2
        v1 = a1 // d1
        v2 = a2 // d1
        r = (y1 * y2 * n - x2 * c2) % v1
        b3 = b2 + 2 * v2 * r
        a3 = v1 * v2
        c3 = (c2 * d1 + r * (b2 + v2 * r)) // v1
        return Form(a3, b3, c3).reduce()

    def inverse(self) -> Form:
        A, B, C = self
        return Form(A, -B, C).reduce()

    def power(self, e: int) -> Form:
        D = self.disc
        ident = Form(1, D % 2, (D % 2 - D) // 4)
        if e < 0:
            return self.inverse().power(-e)
        out, base = ident, self.reduce()
        while e:
            if e & 1:
                out = out.compose(base)
            e >>= 1
            if e:
                base = base.compose(base)
        return out


@dataclass(frozen=True)
class ClassGroup:
    D: int
    forms: tuple

    @property
    def h(self) -> int:
        return len(self.forms)

    @property
    def identity(self) -> Form:
        return self.forms[0]

    def order_of(self, f: Form) -> int:
        f = f.reduce()
        k, cur = 1, f
        while cur != self.identity:
            cur = cur.compose(f)
            k += 1
        return k


@lru_cache(maxsize=256)
def _reduced_forms(D: int) -> tuple:
    out = []
    amax = isqrt(-D // 3) + 1
    for A in range(1, amax + 1):
        for B in range(-A + 1, A + 1):
            if (B - D) % 2:
                continue
            num = B * B - D
            if num % (4 * A):
                continue
            C = num // (4 * A)
            if C < A:
                continue
            if gcd(gcd(A, abs(B)), C) != 1:
                continue
            f = Form(A, B, C)
            if f.is_reduced():
                out.append(f)
    out.sort()
    return tuple(out)


def class_group(O: QuadOrder | int) -> ClassGroup:
    D = O.D if isinstance(O, QuadOrder) else int(O)
    if not is_discriminant(D):
        raise OrderError(f"{D} is not a negative discriminant")
    return ClassGroup(D, _reduced_forms(D))


# ---------------------------------------------------------------------------
# primes, principality, generators


@dataclass(frozen=True)
class PrimeFactorization:
    q: int
    kind: str  # "split", "inert" or "ramified"
    ideals: tuple

    def __repr__(self):
        if self.kind == "inert":
            return f"({self.q})"
        if self.kind == "split":
            return "".join(map(repr, sorted(self.ideals, key=lambda I: (I.a, I.b, I.c))))
        return f"{self.ideals[0]}^2"


def _min_poly_roots(O: QuadOrder, q: int):
    return [r for r in range(q) if (r * r - O.s * r + O.m) % q == 0]


def factor_prime(O: QuadOrder, q: int) -> PrimeFactorization:
    """Factor qO; split primes list l = (q, Phi - r) with the smaller root r first."""
    if O.conductor % q == 0:
        raise ConductorError(f"{q} divides the conductor {O.conductor}")
    k = kronecker(O.D, q)
    if k == -1:
        return PrimeFactorization(q, "inert", (O.ideal(q),))
    roots = _min_poly_roots(O, q)
    ideals = tuple(O.ideal(q, (-r, 1)) for r in roots)
    qO = O.ideal(q)
    if k == 1:
        assert len(ideals) == 2 and ideals[0] * ideals[1] == qO
        return PrimeFactorization(q, "split", ideals)
    assert len(ideals) == 1 and ideals[0] * ideals[0] == qO
    return PrimeFactorization(q, "ramified", ideals)


def ideal_is_principal(O: QuadOrder, I: QuadIdeal) -> bool:
    return I.to_form().reduce() == O.identity_form()


def ideal_class_order(O: QuadOrder, l: QuadIdeal) -> int:
    return class_group(O).order_of(l.to_form())


def _canonical_generator(u):
    x, y = u
    if y > 0 or (y == 0 and x < 0):
        return (-x, -y)
    return (x, y)


def principal_generator(O: QuadOrder, I: QuadIdeal):
    """lambda with I = lambda*O, normalized to y < 0, or y = 0 and x > 0.

    Lagrange reduction of the lattice I under the norm form gives a shortest vector;
    I is principal exactly when that vector has norm N(I).
    """
    v1, v2 = I.basis()
    N = O.norm
    B = lambda u, v: N((u[0] + v[0], u[1] + v[1])) - N(u) - N(v)  # noqa: E731  (twice the bilinear form)
    while True:
        if N(v2) < N(v1):
            v1, v2 = v2, v1
        n1 = N(v1)
        # nearest integer to B(v1, v2) / (2 N(v1))
        mu = (2 * B(v1, v2) + 2 * n1) // (4 * n1)
        if mu == 0:
            break
        v2 = (v2[0] - mu * v1[0], v2[1] - mu * v1[1])
        if N(v2) >= n1:
            break
    if N(v2) < N(v1):
        v1 = v2
    if N(v1) != I.norm or O.principal(v1) != I:
        raise NotPrincipalError(f"{I} is not principal in the order of discriminant {O.D}")
    return _canonical_generator(v1)


def principal_generator_search(O: QuadOrder, I: QuadIdeal):
    """Same as principal_generator, by enumeration over the window |y| <= sqrt(4N/|D|) + 1."""
    n = I.norm
    ymax = isqrt(4 * n // -O.D) + 1
    found = []
    for y in range(-ymax, ymax + 1):
        # x^2 + s*y*x + (m*y^2 - n) = 0
        disc = (O.s * y) ** 2 - 4 * (O.m * y * y - n)
        if disc < 0:
            continue
        r = isqrt(disc)
        if r * r != disc:
            continue
        for sgn in (1, -1):
            num = -O.s * y + sgn * r
            if num % 2:
                continue
            u = (num // 2, y)
            if I.contains(u) and O.principal(u) == I:
                found.append(_canonical_generator(u))
    if not found:
        raise NotPrincipalError(f"{I} is not principal in the order of discriminant {O.D}")
    return min(found, key=lambda u: (abs(u[1]), abs(u[0])))


def euler_phi(n: int) -> int:
    out = n
    for q in factorint(n):
        out = out // q * (q - 1)
    return out


def suborder_class_number(O: QuadOrder, f: int) -> int:
    """h(Z + fO) by direct form enumeration, checked against h(O) phi_O(fO) / phi(f)."""
    if f < 1:
        raise OrderError("index must be >= 1")
    direct = class_group(f * f * O.D).h
    from .resring import phi_O

    units = {-3: 6, -4: 4}.get(O.D, 2)
    unit_index = units // 2 if f > 1 else 1
    via_quotient = O.class_number * phi_O(O, O.ideal(f)) // (euler_phi(f) * unit_index)
    if direct != via_quotient:
        raise AssertionError(f"h(Z + {f}O): form count {direct} != quotient count {via_quotient}")
    return direct
