"""Random objects for property tests: seeded generators and hypothesis strategies."""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations

from hypothesis import strategies as st

from stableres.field import GF, QQ
from stableres.grading import join
from stableres.ingest import Bifiltration
from stableres.presentation import Presentation

GRID3 = (0, 1, 2)


def _leq(a, b):
    return all(x <= y for x, y in zip(a, b))


def _coeff(rng: random.Random, field) -> int:
    return rng.randint(-2, 2) if field == QQ else rng.randrange(field.p)


def random_presentation(rng: random.Random, values=GRID3, n: int = 2, max_gens: int = 2,
                        max_rels: int = 2, field=GF(2)) -> Presentation:
    gens = [tuple(Fraction(rng.choice(values)) for _ in range(n))
            for _ in range(rng.randint(1, max_gens))]
    rels = []
    for _ in range(rng.randint(0, max_rels)):
        g = tuple(Fraction(rng.choice(values)) for _ in range(n))
        coeffs = [_coeff(rng, field) if _leq(a, g) else 0 for a in gens]
        rels.append((g, coeffs))
    return Presentation.build(gens, rels, field, n)


def random_pair(seed: int, **kw):
    rng = random.Random(seed)
    return random_presentation(rng, **kw), random_presentation(rng, **kw)


@st.composite
def presentations(draw, values=GRID3, n=2, max_gens=3, max_rels=3, field=QQ):
    grade = st.tuples(*[st.sampled_from(values)] * n).map(lambda t: tuple(Fraction(x) for x in t))
    gens = draw(st.lists(grade, min_size=1, max_size=max_gens))
    coeff = st.integers(-2, 2) if field == QQ else st.integers(0, field.p - 1)
    rels = []
    for _ in range(draw(st.integers(0, max_rels))):
        g = draw(grade)
        rels.append((g, [draw(coeff) if _leq(a, g) else 0 for a in gens]))
    return Presentation.build(gens, rels, field, n)


def random_bifiltration(rng: random.Random, max_simplices: int = 20, vertices: int = 5,
                        values=(0, Fraction(1, 2), 1, 2, 3)) -> Bifiltration:
    """Random flag-free complex: some edges and triangles with all their faces."""
    verts = list(range(rng.randint(2, vertices)))
    chosen = {(v,) for v in verts}
    edges = list(combinations(verts, 2))
    rng.shuffle(edges)
    for e in edges[: rng.randint(1, len(edges))]:
        chosen.add(e)
    tris = [t for t in combinations(verts, 3)
            if all(f in chosen for f in combinations(t, 2))]
    rng.shuffle(tris)
    for t in tris[: rng.randint(0, len(tris))]:
        if len(chosen) < max_simplices:
            chosen.add(t)
    # trim to size while keeping face closure: drop top simplices first
    ordered = sorted(chosen, key=lambda v: (-len(v), v))
    while len(chosen) > max_simplices:
        top = next(v for v in ordered if v in chosen and len(v) > 1
                   and not any(set(v) < set(w) for w in chosen))
        chosen.discard(top)
    grades = {}
    for v in sorted(chosen, key=lambda v: (len(v), v)):
        g = (Fraction(rng.choice(values)), Fraction(rng.choice(values)))
        for f in combinations(v, len(v) - 1) if len(v) > 1 else ():
            g = join(g, grades[f])
        grades[v] = g
    return Bifiltration(list(grades.items()))
