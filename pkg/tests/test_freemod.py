from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from stableres.field import GF, QQ, Matrix
from stableres.freemod import (
    AdmissibilityError,
    FreeModule,
    GradedMatrix,
    compose,
    evaluate_free,
    shift_free,
    smoothing_free,
    xi,
)
from stableres.grading import grade, leq

O = grade(0, 0)
values = st.sampled_from([Fraction(0), Fraction(1, 2), Fraction(1), Fraction(2)])
grades2 = st.tuples(values, values)
free_modules = st.lists(grades2, min_size=1, max_size=4).map(FreeModule)
shifts = st.fractions(min_value=-2, max_value=2, max_denominator=4)


@st.composite
def admissible(draw, source=None, target=None):
    S = source or draw(free_modules)
    T = target or draw(free_modules)
    rows = [[draw(st.integers(-2, 2)) if leq(t, s) else 0 for s in S] for t in T]
    return GradedMatrix(S, T, Matrix(rows, QQ, cols=len(S)))


def test_xi_examples():
    assert xi(FreeModule([O])) == {O: 1}
    assert xi(FreeModule([O, O])) == {O: 2}
    assert xi(FreeModule((), 2)) == {}


def test_shift_free_examples():
    eps, eta = Fraction(1), Fraction(3, 4)
    F = FreeModule([grade(eps, eps)])
    assert shift_free(F, 2 * eta) == FreeModule([grade(eps - 2 * eta, eps - 2 * eta)])
    assert shift_free(F, 0) == F
    assert shift_free(shift_free(F, eps), -eps) == F


def test_evaluate_free_examples():
    assert evaluate_free(FreeModule([O]), grade(1, 1)) == [0]
    assert evaluate_free(FreeModule([grade(1, 0), grade(0, 1)]), grade("1/2", "1/2")) == []
    assert evaluate_free(FreeModule([O, O]), O) == [0, 1]


def test_admissibility_enforced():
    with pytest.raises(AdmissibilityError):
        GradedMatrix(FreeModule([O]), FreeModule([grade(1, 0)]), Matrix([[1]]))
    GradedMatrix(FreeModule([grade(1, 0)]), FreeModule([O]), Matrix([[1]]))
    with pytest.raises(ValueError):
        FreeModule((), None)


def test_corrected_box_differentials_compose_to_zero():
    t0 = FreeModule([O])
    t1 = FreeModule([grade(1, 0), grade(0, 1)])
    t2 = FreeModule([grade(1, 1)])
    d1 = GradedMatrix(t1, t0, Matrix([[1, 1]]))
    d2 = GradedMatrix(t2, t1, Matrix([[1], [-1]]))
    assert compose(d1, d2).is_zero()
    with pytest.raises(ValueError):
        compose(d2, d1)


def test_identity_composition():
    F = FreeModule([O, grade(1, 0)])
    f = GradedMatrix(F, FreeModule([O]), Matrix([[1, 3]]))
    assert compose(f, GradedMatrix.identity(F)) == f


def test_smoothing_examples():
    F = FreeModule([O])
    s = smoothing_free(F, Fraction(3, 4))
    assert s.target == FreeModule([grade("-3/4", "-3/4")]) and s.is_admissible()
    assert smoothing_free(F, 0) == GradedMatrix.identity(F)
    with pytest.raises(ValueError):
        smoothing_free(F, -1)


@given(free_modules, shifts, shifts)
def test_smoothing_composition_law(F, a, b):
    a, b = abs(a), abs(b)
    s = compose(smoothing_free(F.shift(a), b), smoothing_free(F, a))
    assert s == smoothing_free(F, a + b)


@given(st.data())
def test_admissibility_preserved_by_composition_and_shift(data):
    f = data.draw(admissible())
    g = data.draw(admissible(source=f.target))
    eps = data.draw(shifts)
    assert compose(g, f).is_admissible()
    assert f.shift(eps).is_admissible()
    assert compose(g, f).shift(eps) == compose(g.shift(eps), f.shift(eps))


@given(st.data())
def test_evaluation_is_natural(data):
    f = data.draw(admissible())
    grid = sorted({x for g in list(f.source) + list(f.target) for x in g})
    s = (data.draw(st.sampled_from(grid)), data.draw(st.sampled_from(grid)))
    t = (max(s[0], data.draw(st.sampled_from(grid))), max(s[1], data.draw(st.sampled_from(grid))))
    m_s, rows_s, cols_s = f.at(s)
    m_t, rows_t, cols_t = f.at(t)
    # include(s -> t) then evaluate at t equals evaluate at s then include
    for k, j in enumerate(cols_s):
        via_t = m_t.column(cols_t.index(j))
        via_s = [m_s[rows_s.index(i), k] if i in rows_s else 0 for i in rows_t]
        assert via_t == via_s


def test_over_changes_field():
    F = FreeModule([O])
    f = GradedMatrix(F, F, Matrix([[2]])).over(GF(2))
    assert f.is_zero() and f.field == GF(2)
