import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from oracles import homology_dim, homology_rank
from strategies import random_bifiltration
from stableres.field import GF, QQ
from stableres.grading import critical_grid, grade, leq
from stableres.ingest import (
    Bifiltration,
    BifiltrationError,
    homology_presentation,
    perturb,
    sup_distance,
)
from stableres.interleave import estimate_distance
from stableres.presentation import betti, evaluate, structure_map

O = grade(0, 0)
ONE = grade(1, 1)
TWO_POINTS = Bifiltration([((0,), O), ((1,), O), ((0, 1), ONE)])
CIRCLE = Bifiltration([((0,), O), ((1,), O), ((2,), O),
                       ((0, 1), O), ((0, 2), O), ((1, 2), O)])


def test_single_vertex():
    P = homology_presentation(Bifiltration([((0,), O)]), 0)
    assert betti(P, 0) == {O: 1} and len(P.relation_grades) == 0


def test_two_vertices_joined_later():
    P = homology_presentation(TWO_POINTS, 0)
    assert list(P.generators) == [O, O]
    assert list(P.relation_grades) == [ONE]


def test_hollow_triangle_has_a_loop():
    P = homology_presentation(CIRCLE, 1)
    assert betti(P, 0) == {O: 1} and betti(P, 1) == {}
    assert homology_presentation(CIRCLE, 2).generators.grades == ()


def test_filled_triangle_kills_loop_late():
    K = Bifiltration(list(CIRCLE._grade.items()) + [((0, 1, 2), grade(2, 1))])
    P = homology_presentation(K, 1)
    assert betti(P, 0) == {O: 1} and betti(P, 1) == {grade(2, 1): 1}


def test_validation_errors():
    with pytest.raises(BifiltrationError):
        Bifiltration([((0, 1), O)])  # missing faces
    with pytest.raises(BifiltrationError):
        Bifiltration([((0,), ONE), ((1,), O), ((0, 1), O)])  # face after coface
    with pytest.raises(BifiltrationError):
        Bifiltration([((1, 0), O)])
    with pytest.raises(BifiltrationError):
        Bifiltration([((0,), O), ((0,), O)])
    with pytest.raises(BifiltrationError):
        Bifiltration([((0,), grade(0, 0, 0))])


def test_perturb_zero_is_identity():
    assert perturb(TWO_POINTS, 0, seed=5) == TWO_POINTS


def test_perturb_two_points_distance():
    delta = Fraction(1, 10)
    L = perturb(TWO_POINTS, delta, seed=1)
    assert sup_distance(TWO_POINTS, L) <= delta
    br = estimate_distance(homology_presentation(TWO_POINTS, 0, GF(2)),
                           homology_presentation(L, 0, GF(2)))
    assert br.upper is not None and br.upper <= delta


def test_perturb_is_seeded():
    K = random_bifiltration(random.Random(3))
    assert perturb(K, Fraction(1, 2), seed=9) == perturb(K, Fraction(1, 2), seed=9)


@given(st.integers(0, 10_000), st.fractions(min_value=0, max_value=2, max_denominator=10),
       st.integers(0, 100))
def test_perturb_output_is_valid_and_close(kseed, delta, seed):
    K = random_bifiltration(random.Random(kseed))
    L = perturb(K, delta, seed)  # constructor re-validates monotonicity
    assert sup_distance(K, L) <= delta


@given(st.integers(0, 10_000), st.sampled_from([QQ, GF(2), GF(3)]))
def test_homology_matches_boundary_oracle(kseed, field):
    K = random_bifiltration(random.Random(kseed), max_simplices=10, vertices=4)
    simplices = {s.vertices: s.grade for s in K.simplices}
    p = getattr(field, "p", 0)
    grid = critical_grid(K.all_grades())
    pts = list(grid.points())
    for i in (0, 1):
        P = homology_presentation(K, i, field)
        for s in pts:
            assert evaluate(P, s).dim == homology_dim(simplices, s, i, p)
        for s in pts[::3]:
            for t in pts[::2]:
                if leq(s, t):
                    assert structure_map(P, s, t).rank() == homology_rank(simplices, s, t, i, p)
