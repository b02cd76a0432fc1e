import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from strategies import presentations
from stableres import catalog
from stableres.complexes import (
    ChainMap,
    FreeChainComplex,
    Homotopy,
    chain_map_space,
    check_homotopy,
    cohomology_dim,
    cohomology_rank,
    compose_chain,
    identity_chain,
    induced_on_cokernel,
    is_nullhomotopic,
    lift_resolution,
    shift_complex,
    smoothing_chain_map,
    validate,
    verify_resolution,
    zero_complex,
)
from stableres.field import GF, QQ, Matrix
from stableres.freemod import FreeModule, GradedMatrix
from stableres.grading import critical_grid, grade
from stableres.presentation import (
    FPMorphism,
    hom_space,
    identity_fp,
    minimal_free_resolution,
    smoothing_fp,
)

O = grade(0, 0)
M = catalog.free_module()
N1 = catalog.box_sum(1)
C1 = catalog.box_complex(1)
ETA = Fraction(3, 4)


def test_validate_examples():
    assert validate(catalog.box_sum_resolution(1))
    assert not validate(catalog.literal_box_sum_resolution(1, QQ))
    assert validate(catalog.literal_box_sum_resolution(1, GF(2)))


def test_literal_signs_composite_is_two_zero():
    X = catalog.literal_box_sum_resolution(1, QQ)
    assert (X.diff(-1) @ X.diff(-2)).matrix == Matrix([[2], [0]])


def test_shifted_box_complex_grades():
    D = shift_complex(C1, 2 * ETA)
    assert D.term(0) == FreeModule([grade("-3/2", "-3/2")])
    assert D.term(-1) == FreeModule([grade("-1/2", "-3/2"), grade("-3/2", "-1/2")])
    assert D.term(-2) == FreeModule([grade("-1/2", "-1/2")])


def test_smoothing_chain_map_examples():
    assert smoothing_chain_map(C1, 0) == identity_chain(C1)
    a, b = Fraction(1, 4), Fraction(2, 3)
    law = smoothing_chain_map(C1.shift(a), b) @ smoothing_chain_map(C1, a)
    assert law == smoothing_chain_map(C1, a + b)
    assert smoothing_chain_map(C1, a).commutes()
    with pytest.raises(ValueError):
        smoothing_chain_map(C1, -1)


@pytest.mark.parametrize("eta,feasible", [
    (Fraction(1, 4), False), (Fraction(49, 100), False),
    (Fraction(1, 2), True), (Fraction(3, 4), True), (Fraction(2), True),
])
def test_box_smoothing_nullhomotopy(eta, feasible):
    phi = smoothing_chain_map(C1, 2 * eta)
    h = is_nullhomotopic(phi)
    assert (h is not None) == feasible
    if h is not None:
        assert check_homotopy(phi, h)


def test_hand_written_homotopy_is_a_witness_and_is_found():
    phi = smoothing_chain_map(C1, 2 * ETA)
    h = catalog.box_homotopy(1, ETA)
    assert h.at(-1).matrix == Matrix([[1, 0]])
    assert h.at(0).matrix == Matrix([[0], [1]])
    assert check_homotopy(phi, h)
    found = is_nullhomotopic(phi)
    assert {i: m.matrix for i, m in found.components.items()} == {
        i: m.matrix for i, m in h.components.items()}


def test_hand_written_homotopy_inadmissible_below_half():
    h = catalog.box_homotopy(1, Fraction(1, 4))
    assert not h.is_admissible()


def test_zero_map_has_zero_homotopy():
    h = is_nullhomotopic(ChainMap(C1, C1, {}))
    assert h is not None and h.is_zero()


def test_chain_map_space_examples():
    PM = minimal_free_resolution(M)
    assert len(chain_map_space(PM, PM)) == 1
    # into the free resolution, the degree-0 entry must kill the image of
    # (1 1), so only the zero map commutes
    assert chain_map_space(C1, PM.shift(ETA)) == []
    maps = chain_map_space(PM, C1.shift(ETA))
    assert len(maps) == 1 and maps[0].at(0).matrix == Matrix([[1]])
    assert maps[0].commutes()
    assert chain_map_space(zero_complex(2), PM) == []


def test_lift_examples():
    PM = minimal_free_resolution(M)
    assert lift_resolution(identity_fp(M), PM, PM) == identity_chain(PM)
    eps = Fraction(1, 2)
    lifted = lift_resolution(smoothing_fp(M, eps), PM, PM.shift(eps))
    assert is_nullhomotopic(lifted - smoothing_chain_map(PM, eps)) is not None
    _, g = catalog.interleaving_pair(1, ETA)
    PN = minimal_free_resolution(N1)
    lg = lift_resolution(g, PN, PM.shift(ETA))
    assert lg.at(0).matrix == Matrix([[1, 0]])
    assert all(lg.at(j).is_zero() for j in (-1, -2))


def test_verify_resolution_examples():
    PN = catalog.box_sum_resolution(1)
    assert verify_resolution(N1, PN)
    dropped = FreeChainComplex({0: PN.term(0), -1: PN.term(-1)}, {-1: PN.diff(-1)}, 2, QQ,
                               PN.augmentation, N1)
    assert not verify_resolution(N1, dropped)
    s = grade(1, 1)
    assert cohomology_dim(dropped, -1, s) == 1
    assert verify_resolution(M, FreeChainComplex({0: FreeModule([O])}, {}, 2))


def test_shifted_resolution_resolves_shifted_module():
    X = minimal_free_resolution(N1)
    assert verify_resolution(N1.shift(ETA), X.shift(ETA))
    assert validate(shift_complex(X, -ETA))


def test_induced_on_cokernel_recovers_morphism():
    f, g = catalog.interleaving_pair(1, ETA)
    PM, PN = minimal_free_resolution(M), minimal_free_resolution(N1)
    lf = lift_resolution(f, PM, PN.shift(ETA))
    assert induced_on_cokernel(lf) == f


@given(presentations(max_gens=2, max_rels=2), st.integers(0, 3))
def test_nullhomotopic_maps_vanish_on_cohomology(P, k):
    X = minimal_free_resolution(P)
    eps = Fraction(k, 2)
    phi = smoothing_chain_map(X, eps)
    h = is_nullhomotopic(phi)
    if h is None or X.is_zero():
        return
    assert check_homotopy(phi, h)
    grid = critical_grid(X.all_grades() + X.shift(eps).all_grades())
    for j in X.degrees():
        for s in grid.points():
            # phi at s into X[eps](s) = X(s + eps) is the structure map
            assert cohomology_rank(X, j, s, tuple(x + eps for x in s)) == 0


@given(presentations(max_gens=2, max_rels=2), presentations(max_gens=2, max_rels=2),
       presentations(max_gens=2, max_rels=2), st.randoms(use_true_random=False))
def test_lift_respects_composition(P, Q, R, rng):
    PQ, QR = hom_space(P, Q), hom_space(Q, R)
    if not PQ or not QR:
        return
    f = _combo(PQ, rng)
    g = _combo(QR, rng)
    XP, XQ, XR = (minimal_free_resolution(A) for A in (P, Q, R))
    lhs = lift_resolution(g @ f, XP, XR)
    rhs = compose_chain(lift_resolution(g, XQ, XR), lift_resolution(f, XP, XQ))
    assert lhs.commutes() and rhs.commutes()
    assert is_nullhomotopic(lhs - rhs) is not None


def _combo(basis, rng: random.Random) -> FPMorphism:
    out = basis[0].scale(0)
    for b in basis:
        out = out + b.scale(rng.randint(-2, 2))
    return out
