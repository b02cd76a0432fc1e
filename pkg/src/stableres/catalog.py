"""The small worked example: a free module versus the same module plus a box.

``M`` is free on one generator at the origin.  ``N(eps)`` adds the half-open
box ``[0, eps)^2``, whose minimal resolution ``box_complex(eps)`` has three
terms.  Betti numbers of ``M`` and ``N(eps)`` differ for every ``eps > 0``
while their interleaving distance is ``eps / 2``.
"""

from __future__ import annotations

from fractions import Fraction

from .complexes import ChainMap, FreeChainComplex, Homotopy
from .field import QQ, Field, Matrix
from .freemod import FreeModule, GradedMatrix
from .grading import as_rational, grade
from .presentation import FPMorphism, Presentation

ORIGIN = grade(0, 0)


def free_module(field: Field = QQ) -> Presentation:
    """``M``: one generator at ``(0,0)``, no relations."""
    return Presentation.build([ORIGIN], [], field)


def box_module(eps=1, field: Field = QQ) -> Presentation:
    """Half-open box ``[0, eps)^2``: generator at the origin killed at ``(eps,0)`` and ``(0,eps)``."""
    eps = as_rational(eps)
    return Presentation.build(
        [ORIGIN], [(grade(eps, 0), [1]), (grade(0, eps), [1])], field
    )


def box_sum(eps=1, field: Field = QQ) -> Presentation:
    """``N(eps)``: free summand first, box summand second."""
    eps = as_rational(eps)
    return Presentation.build(
        [ORIGIN, ORIGIN], [(grade(eps, 0), [0, 1]), (grade(0, eps), [0, 1])], field
    )


def box_complex(eps=1, field: Field = QQ) -> FreeChainComplex:
    """``0 -> F(eps,eps) -> F(eps,0) + F(0,eps) -> F(0,0) -> 0``.

    The middle differential is ``(1, -1)^T`` so that consecutive maps compose
    to zero in every characteristic.
    """
    eps = as_rational(eps)
    t0 = FreeModule([ORIGIN])
    t1 = FreeModule([grade(eps, 0), grade(0, eps)])
    t2 = FreeModule([grade(eps, eps)])
    d1 = GradedMatrix(t1, t0, Matrix([[1, 1]], field))
    d2 = GradedMatrix(t2, t1, Matrix([[1], [-1]], field))
    return FreeChainComplex({0: t0, -1: t1, -2: t2}, {-1: d1, -2: d2}, 2, field)


def box_sum_resolution(eps=1, field: Field = QQ) -> FreeChainComplex:
    """Minimal resolution of ``N(eps)`` written out by hand, augmented to ``box_sum``."""
    eps = as_rational(eps)
    t0 = FreeModule([ORIGIN, ORIGIN])
    t1 = FreeModule([grade(eps, 0), grade(0, eps)])
    t2 = FreeModule([grade(eps, eps)])
    d1 = GradedMatrix(t1, t0, Matrix([[0, 0], [1, 1]], field))
    d2 = GradedMatrix(t2, t1, Matrix([[1], [-1]], field))
    N = box_sum(eps, field)
    aug = GradedMatrix.identity(t0, field)
    return FreeChainComplex({0: t0, -1: t1, -2: t2}, {-1: d1, -2: d2}, 2, field,
                            augmentation=aug, resolved=N)


def literal_box_sum_resolution(eps=1, field: Field = QQ) -> FreeChainComplex:
    """The same shape with ``(1, 1)^T`` in the middle; a complex only in characteristic 2."""
    eps = as_rational(eps)
    t0 = FreeModule([ORIGIN, ORIGIN])
    t1 = FreeModule([grade(eps, 0), grade(0, eps)])
    t2 = FreeModule([grade(eps, eps)])
    d1 = GradedMatrix(t1, t0, Matrix([[1, 1], [0, 0]], field))
    d2 = GradedMatrix(t2, t1, Matrix([[1], [1]], field))
    return FreeChainComplex({0: t0, -1: t1, -2: t2}, {-1: d1, -2: d2}, 2, field)


def free_resolution_of_free(field: Field = QQ) -> FreeChainComplex:
    M = free_module(field)
    F = M.generators
    return FreeChainComplex({0: F}, {}, 2, field,
                            augmentation=GradedMatrix.identity(F, field), resolved=M)


def box_homotopy(eps=1, eta=Fraction(3, 4), field: Field = QQ) -> Homotopy:
    """Contraction of ``s_{2 eta}`` on :func:`box_complex`, admissible once ``eta >= eps/2``.

    Degree ``-1`` sends the first middle generator to the top term; degree
    ``0`` sends the origin generator to the second middle generator.
    """
    eta = as_rational(eta)
    C = box_complex(eps, field)
    D = C.shift(2 * eta)
    h1 = GradedMatrix(C.term(-1), D.term(-2), Matrix([[1, 0]], field), check=False)
    h0 = GradedMatrix(C.term(0), D.term(-1), Matrix([[0], [1]], field), check=False)
    return Homotopy(C, D, {-1: h1, 0: h0})


def interleaving_pair(eps=1, eta=Fraction(3, 4), field: Field = QQ
                      ) -> tuple[FPMorphism, FPMorphism]:
    """``f: M -> N[eta]`` onto the free summand and ``g: N -> M[eta]`` killing the box."""
    eta = as_rational(eta)
    M, N = free_module(field), box_sum(eps, field)
    Ns, Ms = N.shift(eta), M.shift(eta)
    f = FPMorphism(M, Ns, GradedMatrix(M.generators, Ns.generators,
                                       Matrix([[1], [0]], field), check=False))
    g = FPMorphism(N, Ms, GradedMatrix(N.generators, Ms.generators,
                                       Matrix([[1, 0]], field), check=False))
    return f, g


def zero_map(X: FreeChainComplex, Y: FreeChainComplex) -> ChainMap:
    return ChainMap(X, Y, {})


EXAMPLES = {
    "free": lambda eps, field: free_module(field),
    "box": box_module,
    "box-sum": box_sum,
    "box-complex": box_complex,
    "box-sum-resolution": box_sum_resolution,
}
