"""Brute-force crater construction with level structures attached.

The crater is walked with explicit Velu isogenies.  Level structures live on E[N] of each
crater curve; E[N] of the seed gets a canonical basis which is pushed along the l-edges, so
every edge acts on coordinates (Z/N)^2 by a matrix read off from the isogeny itself.
Vertices are encoded by actual torsion points on the representative curve, never by
coordinates, so encodings do not depend on the chosen bases.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import cached_property
from math import gcd, isqrt

import networkx as nx

from .arith import FieldElem, irreducible_factors, make_extension, one_root
from .curve import DEFAULT_MAX_EXT_DEGREE, Curve, CurveError, Point, torsion_basis
from .isogeny import (
    IsogenyMap,
    KernelPoly,
    evaluate,
    isomorphism,
    rational_kernels,
    transport,
    velu,
)
from .qorder import QuadOrder
from .theory import ComponentProfile, CraterData, crater_data, vertex_count
from .resring import KINDS


class CraterError(CurveError):
    pass


@dataclass(frozen=True)
class CraterEdge:
    source: int
    target: int
    label: str  # "l" or "lbar"
    phi: IsogenyMap
    u: FieldElem | None  # isomorphism phi.target -> representative target, None if identical

    def __call__(self, R: Point, target_curve: Curve) -> Point:
        S = evaluate(self.phi, R)
        if self.u is None:
            return S
        return transport(self.u, S, target_curve)


@dataclass
class CraterCycle:
    seed: Curve
    O: QuadOrder
    ell: int
    data: CraterData
    curves: list
    l_edges: list
    lbar_edges: list
    pi: tuple  # Frobenius as x + y*Phi
    orientation: str  # "frobenius" (eigenvalue labelling) or "walk"

    @property
    def n(self) -> int:
        return len(self.curves)

    @property
    def j_cycle(self) -> list[int]:
        return [E.j_int for E in self.curves]

    @property
    def shape(self):
        return self.data.shape

    def edge_map(self, e: CraterEdge, R: Point) -> Point:
        return e(R, self.curves[e.target])

    def edges(self):
        return list(self.l_edges) + list(self.lbar_edges)


# ---------------------------------------------------------------------------
# crater walk


def frobenius_in_order(E: Curve, O: QuadOrder) -> tuple:
    """pi = x + y*Phi with y > 0; requires t^2 - 4p = y^2 * D."""
    t, p = E.trace, E.p
    q, r = divmod(t * t - 4 * p, O.D)
    v = isqrt(q) if q > 0 else -1
    if r or v < 1 or v * v != q:
        raise CraterError(f"Frobenius discriminant {t * t - 4 * p} is not a square multiple of {O.D}")
    return ((t - v * O.s) // 2, v)


def kernel_eigenvalue(E: Curve, ker: KernelPoly) -> int:
    """mu mod ell with Frobenius acting as [mu] on the kernel (odd ell)."""
    ell = ker.ell
    F = E.field
    g = irreducible_factors(ker.h)[0]
    d = g.degree
    K = make_extension(F, d)
    x0 = one_root(g, K)
    if not E.rhs(x0).is_square():
        K = make_extension(F, 2 * d)
        x0 = one_root(g, K)
    P = E.lift_x(x0)
    FP = P.frobenius()
    R = P
    for mu in range(1, ell):
        if R == FP:
            return mu
        R = R + P
    raise CraterError("Frobenius does not act on the kernel by a scalar")


class _KernelCache:
    def __init__(self, seed: int):
        self.seed = seed
        self._k = {}
        self._v = {}

    def kernels(self, E: Curve, ell: int):
        key = (E.a.raw, E.b.raw, ell)
        if key not in self._k:
            self._k[key] = rational_kernels(E, ell, self.seed)
        return self._k[key]

    def velu(self, E: Curve, ker: KernelPoly):
        key = (E.a.raw, E.b.raw, ker.key())
        if key not in self._v:
            self._v[key] = velu(E, ker)
        return self._v[key]


def _test_points(E: Curve, count: int, rng: random.Random, avoid: int):
    K = make_extension(E.field, 2)
    out = []
    while len(out) < count:
        R = E.random_point(K, rng)
        if not (R * avoid).is_zero():
            out.append(R)
    return out


def _composes_to_ell(first, second, ell: int, tests) -> bool:
    """second(first(R)) == ell*R for callables on points."""
    return all(second(first(R)) == R * ell for R in tests)


def _is_backtrack(prev: IsogenyMap, nxt: IsogenyMap, rng) -> bool:
    """Whether nxt is the dual of prev (up to an isomorphism of the target)."""
    if nxt.target.j != prev.source.j:
        return False
    u = isomorphism(nxt.target, prev.source)
    if u is None:
        return False
    tests = _test_points(prev.source, 2, rng, prev.degree)
    for s in (u, -u):
        if _composes_to_ell(lambda R: evaluate(prev, R), lambda S: transport(s, evaluate(nxt, S), prev.source), prev.degree, tests):
            return True
    return False


def _closed_walks(seed: Curve, ell: int, n: int, split: bool, cache: _KernelCache, rng):
    """Closed walks of exactly n rational ell-isogenies from seed along crater-like curves.

    A curve is crater-like when it has as many rational ell-kernels as the seed; below the
    crater that number drops or the walk cannot return without backtracking.  For split ell
    the walk may not backtrack; for n >= 3 the curves must have distinct j-invariants.
    """
    base = len(cache.kernels(seed, ell))
    walks = []

    def dfs(path, curve):
        step = len(path)
        for ker in cache.kernels(curve, ell):
            phi = cache.velu(curve, ker)
            T = phi.target
            closing = step == n - 1
            if closing:
                if isomorphism(T, seed) is None:
                    continue
            else:
                if T.j == seed.j and isomorphism(T, seed) is not None:
                    continue
                if n >= 3 and any(e.target.j == T.j for e in path):
                    continue
                if len(cache.kernels(T, ell)) != base:
                    continue
            if split and path and _is_backtrack(path[-1], phi, rng):
                continue
            if closing:
                walks.append(path + [phi])
            else:
                dfs(path + [phi], T)

    dfs([], seed)
    return walks


def build_crater(seed: Curve, ell: int, O: QuadOrder, rng_seed: int = 0) -> CraterCycle:
    """The crater through seed, as a closed walk of n = ord[l] isogenies labelled l."""
    if ell == seed.p:
        raise CraterError("ell must differ from p")
    cd = crater_data(O, ell)
    n = cd.n
    pi = frobenius_in_order(seed, O)
    cache = _KernelCache(rng_seed)
    rng = random.Random(rng_seed)
    split = cd.kind == "split"
    walks = _closed_walks(seed, ell, n, split, cache, rng)
    if not walks:
        raise CraterError(f"no closed walk of {n} horizontal {ell}-isogenies through {seed}: seed is not on a crater for D = {O.D}")
    expected = 2 if split else 1
    if len(walks) != expected:
        raise CraterError(f"found {len(walks)} closed {ell}-walks of length {n}, expected {expected}")

    orientation = "walk"
    if split and ell > 2 and pi[1] % ell:
        r1 = (cd.l.b * -1) % ell  # l = (ell, Phi - r1)
        mu_l = (pi[0] + pi[1] * r1) % ell
        chosen = []
        for w in walks:
            mus = {kernel_eigenvalue(phi.source, phi.kernel) for phi in w}
            if len(mus) != 1:
                raise CraterError("Frobenius eigenvalue changes along a crater walk")
            if mus == {mu_l}:
                chosen.append(w)
        if len(chosen) != 1:
            raise CraterError("could not identify the l-direction from Frobenius eigenvalues")
        walk = chosen[0]
        orientation = "frobenius"
    else:
        walk = min(walks, key=lambda w: w[0].kernel.key())

    curves = [seed] + [phi.target for phi in walk[:-1]]
    l_edges = []
    for i, phi in enumerate(walk):
        j = (i + 1) % n
        u = isomorphism(phi.target, seed) if j == 0 else None
        l_edges.append(CraterEdge(i, j, "l", phi, u))

    lbar_edges = []
    if split:
        for i in range(n):
            incoming = l_edges[(i - 1) % n]
            prev = curves[incoming.source]
            tests = _test_points(prev, 2, rng, ell)
            found = None
            for ker in cache.kernels(curves[i], ell):
                if ker == l_edges[i].phi.kernel:
                    continue
                psi = cache.velu(curves[i], ker)
                u = isomorphism(psi.target, prev)
                if u is None:
                    continue
                for s in (u, -u):
                    e = CraterEdge(i, incoming.source, "lbar", psi, s)
                    if _composes_to_ell(lambda R: incoming(R, curves[i]), lambda S: e(S, prev), ell, tests):
                        found = e
                        break
                if found:
                    break
            if found is None:
                raise CraterError(f"no dual of the l-edge into vertex {i}")
            lbar_edges.append(found)
    return CraterCycle(seed, O, ell, cd, curves, l_edges, lbar_edges, pi, orientation)


def check_duals(C: CraterCycle, count: int = 10, seed: int = 0) -> bool:
    """Each l-edge followed by the edge back (lbar, or l again when ell ramifies) is [ell].

    Split craters must give +[ell] exactly; a ramified crater only fixes the map up to sign.
    """
    rng = random.Random(seed)
    for e in C.l_edges:
        back = C.lbar_edges[e.target] if C.lbar_edges else C.l_edges[e.target]
        tests = _test_points(C.curves[e.source], count, rng, C.ell)
        images = [(C.edge_map(back, C.edge_map(e, R)), R * C.ell) for R in tests]
        if all(a == b for a, b in images):
            continue
        if not C.lbar_edges and all(a == -b for a, b in images):
            continue
        return False
    return True


# ---------------------------------------------------------------------------
# level structures


@dataclass(frozen=True, order=True)
class LSVertex:
    curve: int
    level: tuple  # canonical point keys

    def encode(self, G: LSGraph) -> str:
        return G.level_codes[self]


@dataclass
class LSGraph:
    crater: CraterCycle
    N: int
    kind: str
    vertices: list
    edges: list  # (from_index, to_index, label)
    level_codes: dict
    undirected: bool
    field_degree: int
    edge_matrices: dict = field(default_factory=dict)

    @cached_property
    def index(self) -> dict:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def multigraph(self):
        g = nx.MultiDiGraph()
        g.add_nodes_from(range(len(self.vertices)))
        for a, b, lab in self.edges:
            g.add_edge(a, b, label=lab)
        return g

    @cached_property
    def component_list(self) -> list:
        comps = [frozenset(c) for c in nx.weakly_connected_components(self.multigraph)]
        return sorted(comps, key=lambda c: (-len(c), min(c)))


def _coord_tables(curves, P0: Point, Q0: Point, N: int, l_edges):
    """Per-curve {(a, b): aP_i + bQ_i} with (P_{i+1}, Q_{i+1}) the l-edge images of (P_i, Q_i)."""
    bases = [(P0, Q0)]
    for e in l_edges[:-1]:
        P, Q = bases[-1]
        bases.append((e(P, curves[e.target]), e(Q, curves[e.target])))
    tables = []
    for P, Q in bases:
        tab = {}
        col = P.curve.infinity(P.field)
        for b in range(N):
            acc = col
            for a in range(N):
                tab[(a, b)] = acc
                acc = acc + P
            col = col + Q
        if len({pt.key() for pt in tab.values()}) != N * N:
            raise CraterError("pushed basis is degenerate")
        tables.append(tab)
    return bases, tables


def _edge_matrix(C: CraterCycle, e: CraterEdge, bases, lookups, N: int):
    """2x2 matrix over Z/N of the edge on E[N], columns = images of P, Q; checked on P+Q, P-Q."""
    P, Q = bases[e.source]
    tgt = C.curves[e.target]
    look = lookups[e.target]
    try:
        cP = look[e(P, tgt).key()]
        cQ = look[e(Q, tgt).key()]
    except KeyError as exc:
        raise CraterError("isogeny image is not in the N-torsion table") from exc
    M = ((cP[0], cQ[0]), (cP[1], cQ[1]))
    for i, j in ((1, 1), (1, N - 1), (2 % N, 1)):
        R = P * i + Q * j
        got = look[e(R, tgt).key()]
        want = ((M[0][0] * i + M[0][1] * j) % N, (M[1][0] * i + M[1][1] * j) % N)
        if got != want:
            raise CraterError("edge map is not additive on E[N]")
    return M


def _apply(M, v, N):
    return ((M[0][0] * v[0] + M[0][1] * v[1]) % N, (M[1][0] * v[0] + M[1][1] * v[1]) % N)


def _units(N):
    return [c for c in range(1, N + 1) if gcd(c, N) == 1]


def _neg(v, N):
    return (-v[0] % N, -v[1] % N)


def _canonical(kind, data, table, N, units):
    """Canonical point-key encoding of a level structure given in coordinates."""
    if kind == "gamma0":
        return (min(table[((c * data[0]) % N, (c * data[1]) % N)].key() for c in units),)
    if kind == "gamma1":
        return (min(table[data].key(), table[_neg(data, N)].key()),)
    v, w = data
    a = (table[v].key(), table[w].key())
    b = (table[_neg(v, N)].key(), table[_neg(w, N)].key())
    return min(a, b)


def _coordinate_structures(kind, N):
    vecs = [(a, b) for a in range(N) for b in range(N)]
    if kind in ("gamma0", "gamma1"):
        return [v for v in vecs if gcd(gcd(v[0], v[1]), N) == 1]
    return [(v, w) for v in vecs for w in vecs if gcd(v[0] * w[1] - v[1] * w[0], N) == 1]


def attach_level_structures(
    C: CraterCycle, N: int, kind: str, max_degree: int = DEFAULT_MAX_EXT_DEGREE, seed: int = 0
) -> LSGraph:
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}")
    p = C.seed.p
    if N < 1 or gcd(N, p * C.ell) != 1:
        raise ValueError(f"N = {N} must be positive and prime to p*ell = {p * C.ell}")
    n = C.n
    undirected = kind == "gamma0"
    if N == 1:
        verts = [LSVertex(i, ()) for i in range(n)]
        codes = {v: "" for v in verts}
        edges = sorted((e.source, e.target, e.label) for e in C.edges())
        return LSGraph(C, N, kind, verts, edges, codes, undirected, 1)

    B = torsion_basis(C.seed, N, max_degree, seed)
    bases, tables = _coord_tables(C.curves, B.P, B.Q, N, C.l_edges)
    lookups = [{pt.key(): c for c, pt in tab.items()} for tab in tables]
    mats = {}
    for e in C.edges():
        mats[(e.source, e.target, e.label)] = _edge_matrix(C, e, bases, lookups, N)

    units = _units(N)
    structs = _coordinate_structures(kind, N)
    per_curve = []  # coordinate datum -> canonical key, per curve
    for i in range(n):
        per_curve.append({s: _canonical(kind, s, tables[i], N, units) for s in structs})

    verts = sorted({LSVertex(i, per_curve[i][s]) for i in range(n) for s in structs})
    expected = vertex_count(n, N, kind)
    if len(verts) != expected:
        raise CraterError(f"found {len(verts)} vertices, the count formula gives {expected}")
    index = {v: k for k, v in enumerate(verts)}

    # one coordinate representative per vertex
    rep = {}
    for i in range(n):
        for s in structs:
            v = LSVertex(i, per_curve[i][s])
            rep.setdefault(v, s)

    edges = set()
    for e in C.edges():
        M = mats[(e.source, e.target, e.label)]
        for v, s in rep.items():
            if v.curve != e.source:
                continue
            if kind == "full":
                img = (_apply(M, s[0], N), _apply(M, s[1], N))
            else:
                img = _apply(M, s, N)
            w = LSVertex(e.target, _canonical(kind, img, tables[e.target], N, units))
            edges.add((index[v], index[w], e.label))

    codes = {v: _level_code(kind, v.level) for v in verts}
    G = LSGraph(C, N, kind, verts, sorted(edges), codes, undirected, B.k, mats)
    _check_graph(G)
    return G


def _key_code(key) -> str:
    if key == (0,):
        return "O"
    _, x, y = key
    fx = str(x) if isinstance(x, int) else ",".join(map(str, x))
    fy = str(y) if isinstance(y, int) else ",".join(map(str, y))
    return f"({fx};{fy})"


def _level_code(kind: str, level: tuple) -> str:
    if kind == "gamma0":
        return "<" + _key_code(level[0]) + ">"
    if kind == "gamma1":
        return "±" + _key_code(level[0])
    return "±[" + _key_code(level[0]) + "|" + _key_code(level[1]) + "]"


def _check_graph(G: LSGraph):
    """One outgoing edge per label at every vertex; weak = strong components when directed."""
    out = {}
    for a, _, lab in G.edges:
        out[(a, lab)] = out.get((a, lab), 0) + 1
    labels = {e.label for e in G.crater.edges()}
    if any(out.get((k, lab)) != 1 for k in range(len(G.vertices)) for lab in labels):
        raise CraterError("a vertex does not have exactly one outgoing edge per label")
    if not G.undirected:
        strong = {frozenset(c) for c in nx.strongly_connected_components(G.multigraph)}
        if strong != set(G.component_list):
            raise CraterError("weak and strong components differ")


def components(G: LSGraph) -> ComponentProfile:
    prof = ComponentProfile.from_sizes([len(c) for c in G.component_list], G.crater.n)
    return prof


def principal_vertices(G: LSGraph, v: LSVertex) -> set:
    if v not in G.index:
        raise KeyError(f"{v} is not a vertex of the graph")
    k = G.index[v]
    comp = next(c for c in G.component_list if k in c)
    return {G.vertices[i] for i in comp if G.vertices[i].curve == v.curve}


def check_principal_counts(G: LSGraph) -> bool:
    """|principal vertices| = component size / n for every vertex."""
    n = G.crater.n
    for comp in G.component_list:
        by_curve = {}
        for i in comp:
            by_curve[G.vertices[i].curve] = by_curve.get(G.vertices[i].curve, 0) + 1
        if len(by_curve) != n or any(c * n != len(comp) for c in by_curve.values()):
            return False
    return True


def components_by_label(G: LSGraph, labels=("l",)) -> ComponentProfile:
    """Weak components of the subgraph keeping only edges with the given labels."""
    g = nx.MultiDiGraph()
    g.add_nodes_from(range(len(G.vertices)))
    g.add_edges_from((a, b) for a, b, lab in G.edges if lab in labels)
    return ComponentProfile.from_sizes([len(c) for c in nx.weakly_connected_components(g)], G.crater.n)
