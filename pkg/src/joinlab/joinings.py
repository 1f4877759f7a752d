"""Joinings of finite systems: the polytope J(T,S) and what it reveals.

A joining of ``T`` on ``X`` and ``S`` on ``Y`` is an ``|X| × |Y|`` matrix of
nonnegative rationals with marginals ``μ`` and ``ν`` that is invariant under
``T×S``.  Because ``T×S`` permutes cells, invariance means the matrix is
constant along each ``T×S``-orbit of cells.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import polytope
from .core import (
    FactorMap,
    FiniteSystem,
    format_rational,
    is_ergodic_system,
    is_isomorphism_map,
    iter_isomorphisms,
    to_fraction,
)
from .errors import (
    BruteForceCapExceeded,
    DimensionCapExceeded,
    InvalidCoupling,
    NotInCommutant,
    SystemMismatch,
)

DIMENSION_CAP = 64
COMMUTANT_CAP = 10

Cell = tuple[int, int]
Matrix = tuple[tuple[Fraction, ...], ...]


@dataclass(frozen=True)
class Violation:
    kind: str  # "shape", "negative", "not_normalized", "bad_marginal", "not_invariant"
    where: tuple
    detail: str = ""

    def __str__(self):
        return f"{self.kind} at {self.where}" + (f": {self.detail}" if self.detail else "")


def _as_matrix(weights) -> Matrix:
    return tuple(tuple(to_fraction(w) for w in row) for row in weights)


def joining_violations(weights, left: FiniteSystem, right: FiniteSystem) -> list[Violation]:
    """Every constraint of J(left, right) that ``weights`` breaks."""
    w = _as_matrix(weights)
    if len(w) != left.size or any(len(row) != right.size for row in w):
        return [Violation("shape", (len(w), tuple(len(r) for r in w)),
                          f"expected {left.size}x{right.size}")]
    out = []
    for x in range(left.size):
        for y in range(right.size):
            if w[x][y] < 0:
                out.append(Violation("negative", (x, y), str(w[x][y])))
    total = sum(sum(row) for row in w)
    if total != 1:
        out.append(Violation("not_normalized", (), f"total mass {total}"))
    for x in range(left.size):
        s = sum(w[x])
        if s != left.measure[x]:
            out.append(Violation("bad_marginal", ("row", x), f"{s} != {left.measure[x]}"))
    for y in range(right.size):
        s = sum(w[x][y] for x in range(left.size))
        if s != right.measure[y]:
            out.append(Violation("bad_marginal", ("column", y), f"{s} != {right.measure[y]}"))
    for x in range(left.size):
        for y in range(right.size):
            tx, sy = left.perm[x], right.perm[y]
            if w[tx][sy] != w[x][y]:
                out.append(Violation("not_invariant", ((x, y), (tx, sy)),
                                     f"{w[x][y]} != {w[tx][sy]}"))
    return out


@dataclass(frozen=True)
class Coupling:
    """A validated joining λ ∈ J(left, right)."""

    left: FiniteSystem
    right: FiniteSystem
    weights: Matrix

    def __post_init__(self):
        object.__setattr__(self, "weights", _as_matrix(self.weights))
        violations = joining_violations(self.weights, self.left, self.right)
        if violations:
            raise InvalidCoupling(violations)

    def __getitem__(self, cell: Cell) -> Fraction:
        x, y = cell
        return self.weights[x][y]

    @property
    def shape(self) -> tuple[int, int]:
        return self.left.size, self.right.size

    def support(self) -> list[Cell]:
        return [(x, y) for x in range(self.left.size) for y in range(self.right.size)
                if self.weights[x][y] > 0]

    def flat(self) -> tuple[Fraction, ...]:
        return tuple(w for row in self.weights for w in row)

    def rectangle(self, rows, cols) -> Fraction:
        """λ(A × B)."""
        return sum((self.weights[x][y] for x in set(rows) for y in set(cols)), Fraction(0))

    def to_json(self) -> dict:
        return {
            "left": self.left.to_json(),
            "right": self.right.to_json(),
            "weights": [[format_rational(w) for w in row] for row in self.weights],
        }


def validate_joining(weights, left: FiniteSystem, right: FiniteSystem) -> Coupling:
    """Return the Coupling or raise :class:`InvalidCoupling` listing every violation."""
    return Coupling(left, right, weights)


def product_joining(left: FiniteSystem, right: FiniteSystem) -> Coupling:
    return Coupling(left, right, tuple(tuple(mx * ny for ny in right.measure) for mx in left.measure))


def graph_joining(factor: FactorMap) -> Coupling:
    """Δ_π: mass μ(x) on each cell ``(x, π(x))``."""
    src, tgt = factor.source, factor.target
    weights = [[Fraction(0)] * tgt.size for _ in range(src.size)]
    for x in range(src.size):
        weights[x][factor.mapping[x]] = src.measure[x]
    return Coupling(src, tgt, weights)


def product_orbits(left: FiniteSystem, right: FiniteSystem) -> list[tuple[Cell, ...]]:
    """Orbits of ``T×S`` on cells, each walked from its least cell, ordered by that cell."""
    seen = set()
    orbits = []
    for x in range(left.size):
        for y in range(right.size):
            if (x, y) in seen:
                continue
            orbit = []
            cell = (x, y)
            while cell not in seen:
                seen.add(cell)
                orbit.append(cell)
                cell = (left.perm[cell[0]], right.perm[cell[1]])
            orbits.append(tuple(orbit))
    return orbits


# -- the polytope -------------------------------------------------------------

@dataclass(frozen=True)
class LinearEquation:
    coefficients: tuple[tuple[Cell, int], ...]
    rhs: Fraction

    def holds(self, weights: Matrix) -> bool:
        return sum((c * weights[x][y] for (x, y), c in self.coefficients), Fraction(0)) == self.rhs


@dataclass
class JoiningPolytope:
    """J(left, right) as equalities over the ``n_X·n_Y`` cell weights plus ``w >= 0``."""

    left: FiniteSystem
    right: FiniteSystem
    equalities: tuple[LinearEquation, ...]
    _vertices: tuple[Coupling, ...] | None = field(default=None, repr=False, compare=False)

    @property
    def nvars(self) -> int:
        return self.left.size * self.right.size

    def cell_index(self, x: int, y: int) -> int:
        return x * self.right.size + y

    def matrix_form(self) -> tuple[list[list[Fraction]], list[Fraction]]:
        rows, rhs = [], []
        for eq in self.equalities:
            row = [Fraction(0)] * self.nvars
            for (x, y), c in eq.coefficients:
                row[self.cell_index(x, y)] += c
            rows.append(row)
            rhs.append(eq.rhs)
        return rows, rhs

    def dimension(self) -> int:
        """Affine dimension.  The product joining is strictly positive, so this is the nullity."""
        rows, _ = self.matrix_form()
        return self.nvars - polytope.rank(rows, self.nvars)

    def contains(self, weights) -> bool:
        w = _as_matrix(weights)
        if any(v < 0 for row in w for v in row):
            return False
        return all(eq.holds(w) for eq in self.equalities)

    @property
    def vertex_cache(self) -> tuple[Coupling, ...] | None:
        return self._vertices

    def _store(self, vertices: tuple[Coupling, ...]) -> None:
        if self._vertices is None:
            self._vertices = vertices


def joining_polytope(left: FiniteSystem, right: FiniteSystem) -> JoiningPolytope:
    eqs = []
    for x in range(left.size):
        eqs.append(LinearEquation(tuple(((x, y), 1) for y in range(right.size)), left.measure[x]))
    for y in range(right.size):
        eqs.append(LinearEquation(tuple(((x, y), 1) for x in range(left.size)), right.measure[y]))
    # One equation per orbit edge; the closing edge of each cycle is implied by the others.
    for orbit in product_orbits(left, right):
        for a, b in zip(orbit, orbit[1:]):
            eqs.append(LinearEquation(((a, 1), (b, -1)), Fraction(0)))
    return JoiningPolytope(left, right, tuple(eqs))


def _check_cap(left: FiniteSystem, right: FiniteSystem, cap: int) -> None:
    if left.size * right.size > cap:
        raise DimensionCapExceeded(
            f"{left.size}x{right.size} = {left.size * right.size} cells exceeds the cap of {cap}")


def enumerate_vertices(poly: JoiningPolytope, cap: int = DIMENSION_CAP) -> list[Coupling]:
    """Extreme points of J(T,S), validated, deduplicated and sorted by weight matrix."""
    _check_cap(poly.left, poly.right, cap)
    if poly.vertex_cache is not None:
        return list(poly.vertex_cache)
    rows, rhs = poly.matrix_form()
    m = poly.right.size
    vertices = []
    for flat in polytope.polytope_vertices(rows, rhs, poly.nvars):
        weights = tuple(tuple(flat[x * m:(x + 1) * m]) for x in range(poly.left.size))
        vertices.append(Coupling(poly.left, poly.right, weights))
    vertices.sort(key=lambda c: c.weights)
    poly._store(tuple(vertices))
    return vertices


def is_disjoint(left: FiniteSystem, right: FiniteSystem, cap: int = DIMENSION_CAP) -> bool:
    """True iff the product measure is the only joining."""
    _check_cap(left, right, cap)
    return joining_polytope(left, right).dimension() == 0


def joining_metric(a: Coupling, b: Coupling) -> Fraction:
    """Σ 2^-(i+j+2) |a(i,j) - b(i,j)| over singleton rectangles in index order."""
    if a.left != b.left or a.right != b.right:
        raise SystemMismatch("couplings are over different systems")
    total = Fraction(0)
    for i, (ra, rb) in enumerate(zip(a.weights, b.weights)):
        for j, (wa, wb) in enumerate(zip(ra, rb)):
            if wa != wb:
                total += abs(wa - wb) / 2 ** (i + j + 2)
    return total


def is_ergodic_joining(coupling: Coupling) -> bool:
    """Support is one ``T×S``-orbit and the weight is constant on it."""
    support = coupling.support()
    x, y = support[0]
    orbit = []
    cell = (x, y)
    while True:
        orbit.append(cell)
        cell = (coupling.left.perm[cell[0]], coupling.right.perm[cell[1]])
        if cell == (x, y):
            break
    if set(orbit) != set(support):
        return False
    return len({coupling[c] for c in orbit}) == 1


# -- ergodic decomposition ----------------------------------------------------

@dataclass(frozen=True)
class OrbitComponent:
    """The uniform probability on one ``T×S``-orbit, with its mixture weight."""

    weight: Fraction
    orbit: tuple[Cell, ...]
    left: FiniteSystem
    right: FiniteSystem

    @property
    def matrix(self) -> Matrix:
        w = [[Fraction(0)] * self.right.size for _ in range(self.left.size)]
        share = Fraction(1, len(self.orbit))
        for x, y in self.orbit:
            w[x][y] = share
        return tuple(tuple(r) for r in w)

    def as_coupling(self) -> Coupling | None:
        """The component as a joining, when its marginals are μ and ν."""
        if joining_violations(self.matrix, self.left, self.right):
            return None
        return Coupling(self.left, self.right, self.matrix)


@dataclass(frozen=True)
class ErgodicDecomposition:
    source: Coupling
    components: tuple[OrbitComponent, ...]

    def reconstruct(self) -> Matrix:
        n, m = self.source.shape
        total = [[Fraction(0)] * m for _ in range(n)]
        for comp in self.components:
            for x, row in enumerate(comp.matrix):
                for y, v in enumerate(row):
                    if v:
                        total[x][y] += comp.weight * v
        return tuple(tuple(r) for r in total)


def ergodic_decomposition(coupling: Coupling) -> ErgodicDecomposition:
    comps = []
    for orbit in product_orbits(coupling.left, coupling.right):
        mass = sum((coupling[c] for c in orbit), Fraction(0))
        if mass > 0:
            comps.append(OrbitComponent(mass, orbit, coupling.left, coupling.right))
    return ErgodicDecomposition(coupling, tuple(comps))


# -- commutant and graph structure --------------------------------------------

def commutant(system: FiniteSystem, cap: int = COMMUTANT_CAP) -> list[tuple[int, ...]]:
    """All μ-preserving permutations commuting with T, in lexicographic order.

    The search fixes the image of one point per cycle; equivariance then
    determines the whole cycle.
    """
    if system.size > cap:
        raise BruteForceCapExceeded(f"commutant search capped at {cap} states, got {system.size}")
    return sorted(iter_isomorphisms(system, system, cap=10 ** 7))


def in_commutant(system: FiniteSystem, perm: Sequence[int]) -> bool:
    return is_isomorphism_map(system, system, perm)


def self_joining_from_commutant(system: FiniteSystem, perm: Sequence[int]) -> Coupling:
    """Δ_S(A×B) = μ(A ∩ S^{-1}B) for S in C(T)."""
    perm = tuple(perm)
    if not in_commutant(system, perm):
        raise NotInCommutant(f"{list(perm)} does not commute with T or does not preserve μ")
    weights = [[Fraction(0)] * system.size for _ in range(system.size)]
    for x in range(system.size):
        weights[x][perm[x]] = system.measure[x]
    return Coupling(system, system, weights)


@dataclass(frozen=True)
class GraphStructure:
    kind: str  # "isomorphism", "factor" or "none"
    factor: FactorMap | None = None

    @property
    def mapping(self) -> tuple[int, ...] | None:
        return None if self.factor is None else self.factor.mapping


def detect_graph_structure(coupling: Coupling) -> GraphStructure:
    """Whether λ sits on the graph of a factor map or of an isomorphism."""
    support = coupling.support()
    images: dict[int, list[int]] = {}
    preimages: dict[int, list[int]] = {}
    for x, y in support:
        images.setdefault(x, []).append(y)
        preimages.setdefault(y, []).append(x)
    if any(len(ys) != 1 for ys in images.values()):
        return GraphStructure("none")
    mapping = tuple(images[x][0] for x in range(coupling.left.size))
    factor = FactorMap(coupling.left, coupling.right, mapping)
    if all(len(xs) == 1 for xs in preimages.values()):
        return GraphStructure("isomorphism", factor)
    return GraphStructure("factor", factor)


def find_isomorphism(left: FiniteSystem, right: FiniteSystem,
                     cap: int = DIMENSION_CAP) -> tuple[int, ...] | None:
    """An isomorphism left -> right, or None.

    For ergodic systems this scans the vertices of J(T,S) for a graph of an
    isomorphism; otherwise it searches equivariant measure-preserving bijections.
    """
    if left.size != right.size:
        return None
    if is_ergodic_system(left) and is_ergodic_system(right):
        for v in enumerate_vertices(joining_polytope(left, right), cap=cap):
            structure = detect_graph_structure(v)
            if structure.kind == "isomorphism":
                return structure.mapping
        return None
    _check_cap(left, right, cap)
    return min(iter_isomorphisms(left, right), default=None)
