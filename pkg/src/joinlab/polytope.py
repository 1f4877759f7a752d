"""Exact rational linear algebra and double-description vertex enumeration.

The polytope ``{x >= 0 : A x = b}`` is homogenized into the cone
``{(x, t) >= 0 : A x - b t = 0}``.  The cone's linear hull is parametrized by
an exact null-space basis, and its extreme rays are built by inserting the
nonnegativity half-spaces one at a time (Motzkin's double description with
the combinatorial adjacency test).  Rays with ``t > 0`` rescale to vertices.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

Vector = tuple[Fraction, ...]


def rref(rows: Sequence[Sequence[Fraction]], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    mat = [[Fraction(v) for v in row] for row in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if pivot is None:
            continue
        mat[r], mat[pivot] = mat[pivot], mat[r]
        inv = 1 / mat[r][c]
        mat[r] = [v * inv for v in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                factor = mat[i][c]
                mat[i] = [a - factor * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return mat[:r], pivots


def rank(rows: Sequence[Sequence[Fraction]], ncols: int) -> int:
    return len(rref(rows, ncols)[1])


def nullspace(rows: Sequence[Sequence[Fraction]], ncols: int) -> list[Vector]:
    """Basis of ``{v : rows · v = 0}``, one vector per free column."""
    reduced, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(reduced, pivots):
            v[p] = -row[f]
        basis.append(tuple(v))
    return basis


def solve(rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction], ncols: int) -> Vector | None:
    """One solution of ``rows · v = rhs`` (free variables set to 0), or None."""
    augmented = [list(row) + [Fraction(b)] for row, b in zip(rows, rhs)]
    reduced, pivots = rref(augmented, ncols + 1)
    if ncols in pivots:
        return None
    v = [Fraction(0)] * ncols
    for row, p in zip(reduced, pivots):
        v[p] = row[ncols]
    return tuple(v)


def _dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def _primitive(v: Sequence[Fraction]) -> Vector:
    """Scale a nonzero vector to coprime integers, keeping its direction."""
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    return tuple(Fraction(x // g) for x in ints)


def _normalized_row(row: Sequence[Fraction]) -> Vector | None:
    if all(x == 0 for x in row):
        return None
    return _primitive(row)


def extreme_rays(constraints: Sequence[Sequence[Fraction]], dim: int) -> list[Vector]:
    """Extreme rays of the pointed cone ``{c in Q^dim : a · c >= 0 for every a}``.

    Each ray is returned as a primitive integer vector.  Raises ValueError if
    the cone is not pointed (nonzero lineality space remains).
    """
    rows = []
    seen = set()
    for a in constraints:
        norm = _normalized_row(a)
        if norm is not None and norm not in seen:
            seen.add(norm)
            rows.append(norm)

    lineality: list[list[Fraction]] = [
        [Fraction(int(i == j)) for j in range(dim)] for i in range(dim)
    ]
    rays: list[list[Fraction]] = []
    zero_sets: list[int] = []

    for k, a in enumerate(rows):
        bit = 1 << k
        values = [_dot(a, l) for l in lineality]
        pick = next((i for i, v in enumerate(values) if v != 0), None)
        if pick is not None:
            l0 = lineality.pop(pick)
            v0 = values.pop(pick)
            if v0 < 0:
                l0 = [-x for x in l0]
                v0 = -v0
            lineality = [[x - (v / v0) * y for x, y in zip(l, l0)] for l, v in zip(lineality, values)]
            new_rays = []
            for r, z in zip(rays, zero_sets):
                s = _dot(a, r)
                new_rays.append([x - (s / v0) * y for x, y in zip(r, l0)] if s != 0 else r)
            # Every ray is now zero on a; l0 is positive on a and zero on all earlier rows.
            rays = new_rays + [l0]
            zero_sets = [z | bit for z in zero_sets] + [(1 << k) - 1]
            continue

        values = [_dot(a, r) for r in rays]
        pos = [i for i, v in enumerate(values) if v > 0]
        neg = [i for i, v in enumerate(values) if v < 0]
        zer = [i for i, v in enumerate(values) if v == 0]
        next_rays = [rays[i] for i in pos] + [rays[i] for i in zer]
        next_zero = [zero_sets[i] for i in pos] + [zero_sets[i] | bit for i in zer]
        for p in pos:
            for n in neg:
                common = zero_sets[p] & zero_sets[n]
                if any(i != p and i != n and (zero_sets[i] & common) == common
                       for i in range(len(rays))):
                    continue
                vp, vn = values[p], values[n]
                ray = [vp * xn - vn * xp for xp, xn in zip(rays[p], rays[n])]
                next_rays.append(list(_primitive(ray)))
                next_zero.append(common | bit)
        rays, zero_sets = next_rays, next_zero

    if lineality:
        raise ValueError("cone is not pointed")
    return [_primitive(r) for r in rays]


def polytope_vertices(equalities: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction],
                      nvars: int) -> list[Vector]:
    """Vertices of the bounded polytope ``{x in Q^nvars : x >= 0, A x = b}``.

    Returned sorted lexicographically and free of duplicates.  Raises
    ValueError if the polytope is unbounded.
    """
    homog = [list(row) + [-Fraction(b)] for row, b in zip(equalities, rhs)]
    basis = nullspace(homog, nvars + 1)
    if not basis:
        return []
    # Coordinate i of K c is (row i of K) · c; every coordinate must be >= 0.
    constraints = [[vec[i] for vec in basis] for i in range(nvars + 1)]
    rays = extreme_rays(constraints, len(basis))
    vertices = set()
    for c in rays:
        point = [_dot([vec[i] for vec in basis], c) for i in range(nvars + 1)]
        t = point[nvars]
        if t == 0:
            raise ValueError("polytope is unbounded")
        vertices.add(tuple(x / t for x in point[:nvars]))
    return sorted(vertices)
