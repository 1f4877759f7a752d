"""Relative products over a common factor and factor enumeration."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import (
    FactorMap,
    FiniteSystem,
    format_rational,
    is_ergodic_system,
    iter_isomorphisms,
    quotient,
    to_fraction,
)
from .errors import BruteForceCapExceeded, FactorMismatch, InvalidCoupling, JoinlabError
from .joinings import (
    DIMENSION_CAP,
    Coupling,
    Violation,
    detect_graph_structure,
    enumerate_vertices,
    graph_joining,
    joining_polytope,
    product_joining,
)

FACTOR_CAP = 12
# Bound on the number of invariant partitions visited; the identity on 12
# points alone has 4.2 million of them.
PARTITION_CAP = 200_000

Tensor = tuple[tuple[tuple[Fraction, ...], ...], ...]


@dataclass(frozen=True)
class TripleCoupling:
    """A ``T×S×R``-invariant probability on ``X×Y×Z`` with marginals μ, ν, ρ."""

    systems: tuple[FiniteSystem, FiniteSystem, FiniteSystem]
    weights: Tensor

    def __post_init__(self):
        w = tuple(tuple(tuple(to_fraction(v) for v in row) for row in plane) for plane in self.weights)
        object.__setattr__(self, "weights", w)
        violations = triple_violations(w, *self.systems)
        if violations:
            raise InvalidCoupling(violations)

    def marginal(self, keep: tuple[int, int]) -> tuple[tuple[Fraction, ...], ...]:
        """Two-dimensional marginal on the coordinates in ``keep`` (in that order)."""
        sizes = [s.size for s in self.systems]
        a, b = keep
        out = [[Fraction(0)] * sizes[b] for _ in range(sizes[a])]
        for x, plane in enumerate(self.weights):
            for y, row in enumerate(plane):
                for z, v in enumerate(row):
                    if v:
                        idx = (x, y, z)
                        out[idx[a]][idx[b]] += v
        return tuple(tuple(r) for r in out)


def triple_violations(w: Tensor, t: FiniteSystem, s: FiniteSystem, r: FiniteSystem) -> list[Violation]:
    shape = (t.size, s.size, r.size)
    if len(w) != shape[0] or any(len(p) != shape[1] for p in w) or \
            any(len(row) != shape[2] for p in w for row in p):
        return [Violation("shape", (), f"expected {shape}")]
    out = []
    cells = [(x, y, z) for x in range(shape[0]) for y in range(shape[1]) for z in range(shape[2])]
    for x, y, z in cells:
        if w[x][y][z] < 0:
            out.append(Violation("negative", (x, y, z)))
        if w[t.perm[x]][s.perm[y]][r.perm[z]] != w[x][y][z]:
            out.append(Violation("not_invariant", (x, y, z)))
    if sum(w[x][y][z] for x, y, z in cells) != 1:
        out.append(Violation("not_normalized", ()))
    for axis, system in enumerate((t, s, r)):
        sums = [Fraction(0)] * system.size
        for cell in cells:
            sums[cell[axis]] += w[cell[0]][cell[1]][cell[2]]
        for i, total in enumerate(sums):
            if total != system.measure[i]:
                out.append(Violation("bad_marginal", (axis, i), f"{total} != {system.measure[i]}"))
    return out


@dataclass(frozen=True)
class FactorPair:
    """Two factor maps onto the same system ``R``."""

    left: FactorMap
    right: FactorMap

    def __post_init__(self):
        if self.left.target != self.right.target:
            raise FactorMismatch("factor maps have different targets")

    @property
    def target(self) -> FiniteSystem:
        return self.left.target

    def is_trivial(self) -> bool:
        return self.target.size == 1


def relative_product(lam_t: Coupling, lam_s: Coupling) -> TripleCoupling:
    """λ_T ⊗_R λ_S: pick z by ρ, then x and y independently given z."""
    if lam_t.right != lam_s.right:
        raise FactorMismatch("the two joinings are not over the same system R")
    t, s, r = lam_t.left, lam_s.left, lam_t.right
    rho = r.measure
    weights = tuple(
        tuple(tuple(lam_t[x, z] * lam_s[y, z] / rho[z] for z in range(r.size)) for y in range(s.size))
        for x in range(t.size)
    )
    return TripleCoupling((t, s, r), weights)


def rel_indep_joining(pair: FactorPair) -> Coupling:
    """μ ⊗_R ν, the X×Y marginal of the relative product of the two graph joinings."""
    triple = relative_product(graph_joining(pair.left), graph_joining(pair.right))
    return Coupling(pair.left.source, pair.right.source, triple.marginal((0, 1)))


def nondisjointness_witness(pair: FactorPair) -> Coupling | None:
    """μ ⊗_R ν when it differs from μ ⊗ ν, which happens exactly when R is nontrivial."""
    joining = rel_indep_joining(pair)
    if joining == product_joining(joining.left, joining.right):
        return None
    return joining


# -- factor enumeration -------------------------------------------------------

def _close(parent: list[int], perm: tuple[int, ...], a: int, b: int) -> None:
    """Merge a and b, then keep merging images until the partition is T-invariant."""
    def find(u):
        while parent[u] != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    stack = [(a, b)]
    while stack:
        u, v = stack.pop()
        ru, rv = find(u), find(v)
        if ru == rv:
            continue
        if rv < ru:
            ru, rv = rv, ru
        parent[rv] = ru
        stack.append((perm[u], perm[v]))


def _canonical_labels(parent: list[int]) -> tuple[int, ...]:
    def find(u):
        while parent[u] != u:
            u = parent[u]
        return u

    roots: dict[int, int] = {}
    labels = []
    for x in range(len(parent)):
        r = find(x)
        labels.append(roots.setdefault(r, len(roots)))
    return tuple(labels)


def invariant_partitions(system: FiniteSystem, cap: int = FACTOR_CAP) -> list[tuple[int, ...]]:
    """Every T-invariant partition as a restricted-growth label string.

    Starts from the partition into points and repeatedly merges two blocks,
    closing under T; every invariant partition is reachable this way.
    """
    n = system.size
    if n > cap:
        raise BruteForceCapExceeded(f"factor enumeration capped at {cap} states, got {n}")
    start = tuple(range(n))
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for labels in frontier:
            reps = {}
            for x, lab in enumerate(labels):
                reps.setdefault(lab, x)
            blocks = sorted(reps.values())
            for i, a in enumerate(blocks):
                for b in blocks[i + 1:]:
                    parent = list(range(n))
                    for x, lab in enumerate(labels):
                        if x != reps[lab]:
                            parent[x] = reps[lab]
                    _close(parent, system.perm, a, b)
                    merged = _canonical_labels(parent)
                    if merged not in seen:
                        seen.add(merged)
                        nxt.append(merged)
                        if len(seen) > PARTITION_CAP:
                            raise BruteForceCapExceeded(
                                f"more than {PARTITION_CAP} invariant partitions")
        frontier = nxt
    return sorted(seen, key=lambda lab: (-max(lab), lab))


def enumerate_factors(system: FiniteSystem, cap: int = FACTOR_CAP) -> list[FactorMap]:
    """One factor map per T-invariant partition, finest partition first.

    Target states are numbered by the least source state mapped to them.
    """
    out = []
    for labels in invariant_partitions(system, cap):
        blocks: dict[int, list[int]] = {}
        for x, lab in enumerate(labels):
            blocks.setdefault(lab, []).append(x)
        out.append(quotient(system, list(blocks.values())))
    return out


def common_factors(left: FiniteSystem, right: FiniteSystem, cap: int = FACTOR_CAP) -> list[FactorPair]:
    """Every pair of factor maps onto a shared target, up to relabeling the target.

    The target is taken in the labeling of the left factor; each isomorphism
    from the right quotient to it gives a distinct pair.
    """
    pairs = []
    right_factors = enumerate_factors(right, cap)
    for f in enumerate_factors(left, cap):
        for g in right_factors:
            for iso in sorted(iter_isomorphisms(g.target, f.target)):
                relabeled = FactorMap(right, f.target, tuple(iso[z] for z in g.mapping))
                pairs.append(FactorPair(f, relabeled))
    pairs.sort(key=lambda p: (p.target.size, p.left.mapping, p.right.mapping))
    return pairs


# -- self-joining census ------------------------------------------------------

@dataclass(frozen=True)
class VertexLabel:
    kind: str  # "power", "product" or "other"
    power: int | None = None

    def __str__(self):
        if self.kind != "power":
            return self.kind
        return {0: "Δ_Id", 1: "Δ_T"}.get(self.power, f"Δ_T^{self.power}")


@dataclass(frozen=True)
class SelfJoiningReport:
    system: FiniteSystem
    vertices: tuple[Coupling, ...]
    labels: tuple[VertexLabel, ...]

    def count(self, kind: str) -> int:
        return sum(1 for lab in self.labels if lab.kind == kind)

    @property
    def has_other(self) -> bool:
        return self.count("other") > 0


def label_self_joining(coupling: Coupling) -> VertexLabel:
    system = coupling.left
    structure = detect_graph_structure(coupling)
    if structure.kind == "isomorphism":
        for n in range(system.period()):
            if system.power(n) == structure.mapping:
                return VertexLabel("power", n)
    if coupling == product_joining(system, system):
        return VertexLabel("product")
    return VertexLabel("other")


def classify_self_joinings(system: FiniteSystem, cap: int = DIMENSION_CAP) -> SelfJoiningReport:
    """Label each vertex of J(T,T) as some Δ_{T^n}, the product, or other."""
    if not is_ergodic_system(system):
        raise JoinlabError("self-joining classification needs an ergodic system")
    vertices = enumerate_vertices(joining_polytope(system, system), cap=cap)
    labels = tuple(label_self_joining(v) for v in vertices)
    return SelfJoiningReport(system, tuple(vertices), labels)


def triple_to_json(triple: TripleCoupling) -> dict:
    return {
        "systems": [s.to_json() for s in triple.systems],
        "weights": [[[format_rational(v) for v in row] for row in plane] for plane in triple.weights],
    }
