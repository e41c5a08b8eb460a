import pytest

from conftest import EX1, EX2, EX3, crater_for, graph_for
from isocrater.curve import curve_new
from isocrater.graph import (
    CraterError,
    attach_level_structures,
    build_crater,
    check_duals,
    check_principal_counts,
    components,
    components_by_label,
    principal_vertices,
)
from isocrater.qorder import QuadOrder
from isocrater.theory import ComponentProfile, InertPrimeError, predict, vertex_count

P107_CYCLE = [19, 77, 63, 64, 57, 46, 30]


def prof(d, n):
    return ComponentProfile.from_counter(d, n)


def _is_rotation_or_reflection(cyc, ref):
    n = len(ref)
    rots = [ref[i:] + ref[:i] for i in range(n)]
    rev = ref[::-1]
    rots += [rev[i:] + rev[:i] for i in range(n)]
    return cyc in rots


def test_p107_crater(ex1_crater):
    C = ex1_crater
    assert C.n == 7
    assert _is_rotation_or_reflection(C.j_cycle, P107_CYCLE)
    assert C.seed.j_int == 19
    assert C.orientation == "frobenius"


def test_p47_and_p53_craters(ex2_crater, ex3_crater):
    assert sorted(ex2_crater.j_cycle) == [8, 29, 34]
    assert sorted(ex3_crater.j_cycle) == [8, 22, 42]


@pytest.mark.parametrize("spec", [EX1, EX2, EX3])
def test_duals_compose_to_ell(spec):
    assert check_duals(crater_for(spec), count=10)


def test_example1_graph():
    G = graph_for(EX1, 6, "gamma0")
    assert len(G.vertices) == 84 == vertex_count(7, 6, "gamma0")
    assert components(G) == prof({14: 3, 7: 6}, 7)
    assert check_principal_counts(G)
    sizes = {}
    for comp in G.component_list:
        for i in comp:
            v = G.vertices[i]
            sizes[len(comp)] = len(principal_vertices(G, v))
    assert sizes == {14: 2, 7: 1}


def test_example1_edges_are_symmetric():
    G = graph_for(EX1, 6, "gamma0")
    l_edges = {(a, b) for a, b, lab in G.edges if lab == "l"}
    lbar_edges = {(a, b) for a, b, lab in G.edges if lab == "lbar"}
    assert lbar_edges == {(b, a) for a, b in l_edges}


def test_example2_graph():
    G = graph_for(EX2, 3, "gamma0")
    assert components(G) == prof({12: 1}, 3)
    assert check_principal_counts(G)


def test_example3_graph():
    G = graph_for(EX3, 5, "gamma1")
    assert len(G.vertices) == 36
    assert {lab for _, _, lab in G.edges} == {"l", "lbar"}
    assert components(G) == prof({12: 2, 6: 1, 3: 2}, 3)


def test_example3_measured_profiles():
    G = graph_for(EX3, 5, "gamma1")
    assert components(G) == prof({24: 1, 6: 2}, 3)
    assert components_by_label(G, ("l",)) == prof({12: 2, 6: 1, 3: 2}, 3)
    assert check_principal_counts(G)


def test_level_one_graph_is_the_crater(ex1_crater):
    for kind in ("gamma0", "gamma1", "full"):
        G = attach_level_structures(ex1_crater, 1, kind)
        assert len(G.vertices) == 7
        assert components(G) == prof({7: 1}, 7)


@pytest.mark.parametrize("spec,N,kind", [(EX1, 6, "full"), (EX3, 5, "full"), (EX1, 4, "gamma1"), (EX3, 5, "gamma0"), (EX2, 3, "full"), (EX1, 9, "gamma1")])
def test_engines_agree(spec, N, kind):
    G = graph_for(spec, N, kind)
    D, ell = spec[3], spec[4]
    assert components(G) == predict(QuadOrder(D), ell, N, kind).profile
    assert check_principal_counts(G)


def test_floor_curve_is_rejected():
    # y^2 = x^3 + x + 11 over F_107 has trace -12 but only one rational 2-isogeny
    with pytest.raises(CraterError):
        build_crater(curve_new(1, 11, 107), 2, QuadOrder(-71))


def test_inert_ell_is_rejected():
    with pytest.raises(InertPrimeError):
        build_crater(curve_new(14, 5, 47), 3, QuadOrder(-124))


def test_walk_orientation_when_frobenius_is_scalar():
    C = build_crater(curve_new(43, 86, 107), 2, QuadOrder(-71))
    assert C.orientation == "walk"
    assert sorted(C.j_cycle) == sorted(P107_CYCLE)
    assert check_duals(C)


def test_one_vertex_two_loops():
    # D = -11, ell = 3 splits into principal ideals
    C = build_crater(curve_new(2, 37, 59), 3, QuadOrder(-11))
    assert C.n == 1 and C.shape.kind == "one-vertex-two-loops"
    assert len(C.l_edges) == 1 and len(C.lbar_edges) == 1
    G = attach_level_structures(C, 5, "gamma0")
    assert components(G) == predict(QuadOrder(-11), 3, 5, "gamma0").profile == prof({4: 1, 1: 2}, 1)
    assert check_duals(C)


def test_one_vertex_one_loop():
    C = build_crater(curve_new(2, 64, 83), 2, QuadOrder(-8))
    assert C.n == 1 and C.shape.kind == "one-vertex-one-loop"
    G = attach_level_structures(C, 3, "gamma1")
    assert components(G) == predict(QuadOrder(-8), 2, 3, "gamma1").profile
    assert check_duals(C)


@pytest.mark.parametrize("ell", [2, 5])
def test_single_edge(ell):
    C = build_crater(curve_new(1, 85, 131), ell, QuadOrder(-40))
    assert C.n == 2 and C.shape.kind == "single-edge"
    assert not C.lbar_edges
    G = attach_level_structures(C, 3, "full")
    assert components(G) == predict(QuadOrder(-40), ell, 3, "full").profile
    assert check_duals(C)


def test_vertex_identity_uses_points():
    G = graph_for(EX1, 6, "gamma0")
    # the same level code never occurs twice on one curve
    seen = {(v.curve, G.level_codes[v]) for v in G.vertices}
    assert len(seen) == len(G.vertices)
