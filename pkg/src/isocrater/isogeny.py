"""Rational l-kernels, Kohel/Velu isogenies, evaluation at extension points, isomorphisms."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .arith import FieldElem, Poly, make_extension, one_root, irreducible_factors
from .curve import Curve, CurveError, Point, division_polynomial, multiple_x


class InvalidKernelError(CurveError):
    pass


@dataclass(frozen=True)
class KernelPoly:
    """Monic h over F_p cutting out the abscissae of a rational subgroup of order ell."""

    h: Poly
    ell: int

    def key(self):
        return (self.h.degree, tuple(self.h.c))


@dataclass(frozen=True)
class IsogenyMap:
    source: Curve
    target: Curve
    degree: int
    kernel: KernelPoly
    x_num: Poly
    x_den: Poly
    dx_num: Poly = field(repr=False)

    def __call__(self, R: Point) -> Point:
        return evaluate(self, R)


def rational_kernels(E: Curve, ell: int, seed: int = 0) -> list[KernelPoly]:
    """Kernel polynomials of the F_p-rational subgroups of order ell, sorted by coefficients."""
    if ell == E.p:
        raise ValueError("ell must differ from p")
    F = E.field
    if ell == 2:
        f = E.rhs_poly()
        from .arith import poly_roots

        roots = poly_roots(f, seed=seed)
        return sorted(
            (KernelPoly(Poly(F, [F.neg(r.raw), 1]), 2) for r in sorted(set(roots), key=lambda e: e.raw)),
            key=KernelPoly.key,
        )
    half = (ell - 1) // 2
    psi = division_polynomial(E, ell).monic()
    found = {}
    for idx, g in enumerate(irreducible_factors(psi, seed)):
        d = g.degree
        if half % d:
            continue
        K = make_extension(F, d)
        x0 = one_root(g, K, seed + idx)
        xs = [x0]
        for k in range(2, half + 1):
            xk = multiple_x(E, k, x0)
            if xk is None:
                break
            xs.append(xk)
        if len(xs) != half or len({x.raw for x in xs}) != half:
            continue
        # Frobenius must permute the abscissa set of the subgroup
        raws = {x.raw for x in xs}
        if {K.frobenius(r) for r in raws} != raws:
            continue
        h = Poly.from_roots(K, xs)
        if any(any(c[1:]) for c in h.c):
            continue
        hF = Poly(F, [c[0] for c in h.c])
        found[tuple(hF.c)] = KernelPoly(hF, ell)
    return sorted(found.values(), key=KernelPoly.key)


def velu(E: Curve, kernel: KernelPoly) -> IsogenyMap:
    """Isogeny with the given kernel, in Kohel's x-only form (normalized, y -> y X'(x))."""
    F = E.field
    ell = kernel.ell
    h = kernel.h.monic()
    a, b = E.a, E.b
    f = E.rhs_poly()
    if ell == 2:
        if h.degree != 1 or (f % h).c:
            raise InvalidKernelError("a 2-kernel polynomial must be a linear factor of x^3 + ax + b")
        x0 = -h.coeff(0)
        t = 3 * x0 * x0 + a
        w = x0 * t
        x = Poly.x(F)
        x_den = x - Poly.const(F, x0)
        x_num = x * x_den + Poly.const(F, t)
    else:
        d = (ell - 1) // 2
        if h.degree != d or (division_polynomial(E, ell) % h).c:
            raise InvalidKernelError(f"h does not cut out a subgroup of order {ell}")
        e1 = -h.coeff(d - 1)
        e2 = h.coeff(d - 2) if d >= 2 else F.zero
        e3 = -h.coeff(d - 3) if d >= 3 else F.zero
        p1 = e1
        p2 = e1 * e1 - 2 * e2
        p3 = e1**3 - 3 * e1 * e2 + 3 * e3
        t = 6 * p2 + 2 * a * d
        w = 10 * p3 + 6 * a * p1 + 4 * b * d
        x = Poly.x(F)
        h1 = h.derivative()
        h2 = h1.derivative()
        x_num = (x.scale(F(ell)) - Poly.const(F, 2 * p1)) * h * h - (f.derivative() * h1 * h).scale(F(2)) + (f * (h1 * h1 - h * h2)).scale(F(4))
        x_den = h * h
    target = Curve(a - 5 * t, b - 7 * w)
    dx_num = x_num.derivative() * x_den - x_num * x_den.derivative()
    return IsogenyMap(E, target, ell, kernel, x_num, x_den, dx_num)


def evaluate(phi: IsogenyMap, R: Point) -> Point:
    E = phi.source
    if R.curve != E:
        raise CurveError("point is not on the isogeny source")
    K = R.field
    if R.x is None:
        return phi.target.infinity(K)
    if not R.on_curve():
        raise CurveError("point is not on the isogeny source")
    x = FieldElem(K, R.x)
    den = phi.x_den(x)
    if not den:
        return phi.target.infinity(K)
    inv = den.inv()
    X = phi.x_num(x) * inv
    Y = FieldElem(K, R.y) * phi.dx_num(x) * inv * inv
    return Point(phi.target, K, X.raw, Y.raw)


def isomorphism(E1: Curve, E2: Curve):
    """u in F_p with a2 = u^4 a1 and b2 = u^6 b1 (the canonical one of +-u), or None."""
    if E1.field != E2.field or E1.j != E2.j:
        return None
    u2 = (E2.b * E1.a) / (E1.b * E2.a)
    u = u2.sqrt()
    if u is None:
        return None
    if u**4 * E1.a != E2.a or u**6 * E1.b != E2.b:
        return None
    return u


def transport(u: FieldElem, R: Point, target: Curve) -> Point:
    """Image of R under (x, y) -> (u^2 x, u^3 y)."""
    K = R.field
    if R.x is None:
        return target.infinity(K)
    ur = K.embed(u.raw) if K != u.field else u.raw
    u2 = K.mul(ur, ur)
    u3 = K.mul(u2, ur)
    return Point(target, K, K.mul(u2, R.x), K.mul(u3, R.y))


def _test_points(E: Curve, ell: int, count: int, seed: int):
    """Points over F_{p^2} with ell*R != O (so [ell] is visible on them)."""
    K = make_extension(E.field, 2)
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        R = E.random_point(K, rng)
        if not (R * ell).is_zero():
            out.append(R)
    return out


def dual(phi: IsogenyMap, seed: int = 0):
    """(psi, u) with transport(u, psi(phi(R))) = ell*R on the source."""
    ell = phi.degree
    tests = _test_points(phi.source, ell, 2, seed)
    for ker in rational_kernels(phi.target, ell, seed):
        try:
            psi = velu(phi.target, ker)
        except CurveError:
            continue
        u = isomorphism(psi.target, phi.source)
        if u is None:
            continue
        for sgn in (u, -u):
            if all(transport(sgn, evaluate(psi, evaluate(phi, R)), phi.source) == R * ell for R in tests):
                return psi, sgn
    raise CurveError("no dual isogeny found among rational kernels of the target")
