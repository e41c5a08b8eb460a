import random
from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isocrater.qorder import QuadOrder, factor_prime, principal_generator
from isocrater.resring import (
    AlgLevelStructure,
    ResRing,
    ResRingError,
    colon_ideal,
    colon_ideal_bruteforce,
    conductor_ideal,
    divisors_of_NO,
    level_structures,
    orbit,
    orbit_size,
    phi_O,
    phi_O_bruteforce,
    representative,
    stabilizer,
)
from isocrater.theory import crater_data

SWEEP_DISCS = [-71, -124, -44, -40]


def test_phi_examples():
    O = QuadOrder(-71)
    assert phi_O(O, O.ideal(6)) == 4
    O = QuadOrder(-124)
    assert phi_O(O, O.ideal(3)) == 3 * 3 - 1
    O = QuadOrder(-40)
    assert factor_prime(O, 5).kind == "ramified"
    assert phi_O(O, O.ideal(5)) == 5 * 5 - 5


@pytest.mark.parametrize("D", SWEEP_DISCS)
def test_phi_matches_enumeration_on_divisors(D):
    O = QuadOrder(D)
    for N in range(2, 13):
        if gcd(N, O.conductor) != 1:
            continue
        for A in divisors_of_NO(O, N, primitive_only=False):
            assert phi_O(O, A) == phi_O_bruteforce(O, A)
            B = colon_ideal(O, A, N)
            assert B == colon_ideal_bruteforce(O, A, N)
            assert A * B == O.ideal(N)


@settings(max_examples=25, deadline=None)
@given(D=st.sampled_from(SWEEP_DISCS + [-1116, -15, -8]), x=st.integers(-60, 60), y=st.integers(1, 60), n=st.integers(1, 400))
def test_phi_matches_enumeration_random_ideals(D, x, y, n):
    O = QuadOrder(D)
    I = O.ideal((x, y), n)
    if I.norm > 10**4 or gcd(I.norm, O.conductor) != 1:
        return
    assert phi_O(O, I) == phi_O_bruteforce(O, I)


def test_ring_basics():
    R = ResRing(QuadOrder(-71), 6)
    assert len(R.units) == phi_O(R.O, R.O.ideal(6)) == 4
    for u in R.units:
        assert R.mul(u, R.inv(u)) == R(1)
    with pytest.raises(ResRingError):
        ResRing(QuadOrder(-124), 4)
    with pytest.raises(ResRingError):
        R.inv((2, 0))


@pytest.mark.parametrize("D,N", [(-71, 6), (-44, 5), (-124, 3), (-40, 5), (-71, 4), (-44, 9)])
@pytest.mark.parametrize("kind", ["gamma0", "gamma1", "full"])
def test_stabilizer_closure(D, N, kind):
    R = ResRing(QuadOrder(D), N)
    for g in level_structures(R, kind)[:12]:
        S = stabilizer(R, g)
        els = set(S.elements)
        assert R(1) in els
        for a in els:
            assert R.inv(a) in els
            for b in list(els)[:8]:
                assert R.mul(a, b) in els


def test_stabilizer_chain():
    # full-level stabilizers sit inside every gamma1 stabilizer, which sit inside gamma0 ones
    R = ResRing(QuadOrder(-71), 6)
    full = set(stabilizer(R, AlgLevelStructure("full", ((1, 0), (0, 1)))).elements)
    assert full == {R(1), R(-1)}
    for P in [(1, 0), (0, 1), (2, 1), (3, 1)]:
        g1 = AlgLevelStructure("gamma1", P)
        g0 = AlgLevelStructure("gamma0", P)
        if g1.is_valid(R):
            s1, s0 = set(stabilizer(R, g1).elements), set(stabilizer(R, g0).elements)
            assert full <= s1 <= s0


def test_gamma0_inert_stabilizer_is_scalars():
    R = ResRing(QuadOrder(-124), 3)
    scalars = {R(c) for c in (1, 2)}
    for g in level_structures(R, "gamma0"):
        assert set(stabilizer(R, g).elements) == scalars


def test_example3_gamma1_stabilizer_on_prime_component():
    O = QuadOrder(-44)
    R = ResRing(O, 5)
    n1, n2 = factor_prime(O, 5).ideals
    g = representative(R, n1, "gamma1")
    assert conductor_ideal(R, g.data) == n1
    S = stabilizer(R, g)
    expected = {a for a in R.units if n2.contains(R.add(a, (-1, 0))) or n2.contains(R.add(a, (1, 0)))}
    assert set(S.elements) == expected
    assert S.modulus == n2


def test_example1_conductor_and_residue_group():
    O = QuadOrder(-71)
    R = ResRing(O, 6)
    p2 = factor_prime(O, 2).ideals[0]
    q3 = factor_prime(O, 3).ideals[0]
    A = p2 * q3
    g = representative(R, A, "gamma0")
    assert conductor_ideal(R, g.data) == A
    B = colon_ideal(O, A, 6)
    assert B == p2.conj() * q3.conj()
    assert phi_O(O, B) == 2  # |(Z/6Z)^x|


def test_example1_orbit():
    O = QuadOrder(-71)
    cd = crater_data(O, 5)
    R = ResRing(O, 6)
    assert R(cd.lam) == (5, 2)  # 2 Phi + 5
    g = AlgLevelStructure("gamma0", (1, 0))
    assert orbit_size(R, g, [cd.lam]) == 2


def test_example3_orbit_lambda_alone():
    O = QuadOrder(-44)
    cd = crater_data(O, 3)
    R = ResRing(O, 5)
    g = AlgLevelStructure("gamma1", (1, 0))
    assert orbit_size(R, g, [cd.lam]) == 4
    # lambda^4 = 1 mod 5 and no smaller power is +-1
    powers = [R.pow(cd.lam, k) for k in range(1, 5)]
    assert powers[3] == R(1)
    assert all(p not in (R(1), R(-1)) for p in powers[:3])


def test_example3_orbit_lambda_and_conjugate():
    O = QuadOrder(-44)
    cd = crater_data(O, 3)
    R = ResRing(O, 5)
    g = AlgLevelStructure("gamma1", (1, 0))
    assert orbit_size(R, g, [cd.lam, cd.lam_bar]) == 4


@settings(max_examples=30, deadline=None)
@given(
    D=st.sampled_from([-71, -44, -124, -40, -1116]),
    N=st.integers(2, 9),
    kind=st.sampled_from(["gamma0", "gamma1", "full"]),
    seed=st.integers(0, 10**6),
)
def test_orbit_stabilizer(D, N, kind, seed):
    O = QuadOrder(D)
    if gcd(N, O.conductor) != 1:
        return
    R = ResRing(O, N)
    rng = random.Random(seed)
    gens = [rng.choice(R.units) for _ in range(rng.randint(1, 3))]
    structs = level_structures(R, kind)
    g = rng.choice(structs)
    orb = orbit(R, g, gens)
    assert len(orb) == orbit_size(R, g, gens)
    # orbits partition: every member has the same orbit
    h = orb[-1]
    assert orbit(R, h, gens) == orb


def test_divisors_iteration():
    O = QuadOrder(-71)
    divs = divisors_of_NO(O, 6)
    assert len(divs) == 9
    assert all(O.ideal(6).norm % A.norm == 0 for A in divs)
    O = QuadOrder(-124)
    assert [A.norm for A in divisors_of_NO(O, 9)] == [1]
    assert len(divisors_of_NO(O, 9, primitive_only=False)) == 3


def test_representatives_have_exact_conductor():
    for D, N in [(-71, 6), (-44, 5), (-40, 10), (-71, 12)]:
        O = QuadOrder(D)
        R = ResRing(O, N)
        for A in divisors_of_NO(O, N):
            g = representative(R, A)
            assert R.additive_order(g.data) == N
            assert conductor_ideal(R, g.data) == A


def test_lambda_generates_l_power():
    O = QuadOrder(-44)
    cd = crater_data(O, 3)
    assert principal_generator(O, cd.l ** cd.n) == cd.lam
