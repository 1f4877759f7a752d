"""Exact checks for pairwise-independent triple laws.

A :class:`TripleLaw` is the joint distribution of three random variables on
a common finite alphabet.  The oracles here test, case by case, two facts
about such laws when the variables are identically distributed and
pairwise independent:

* if the third is a function of the first two, the common law is uniform on
  its support;
* over a finite abelian group with ``ξ3 = ξ1 + ξ2``, the common law is
  uniform on a subgroup.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Hashable, Sequence

from .core import to_fraction
from .errors import ConclusionFailed, HypothesisFailed, NonMonotoneSupport, PrefixDependentSupport

Cell = tuple[int, int, int]


@dataclass(frozen=True)
class TripleLaw:
    """Sparse law of ``(ξ1, ξ2, ξ3)`` on ``range(alphabet_size)``³.

    ``symbols`` optionally names each letter (word-level laws use tuples).
    """

    alphabet_size: int
    weights: tuple[tuple[Cell, Fraction], ...]
    symbols: tuple[Hashable, ...] | None = None

    def __post_init__(self):
        merged: dict[Cell, Fraction] = {}
        for cell, w in (self.weights.items() if isinstance(self.weights, dict) else self.weights):
            cell = tuple(int(c) for c in cell)
            w = to_fraction(w)
            if len(cell) != 3 or any(not 0 <= c < self.alphabet_size for c in cell):
                raise ValueError(f"cell {cell} outside the alphabet")
            if w < 0:
                raise ValueError(f"negative mass at {cell}")
            if w:
                merged[cell] = merged.get(cell, Fraction(0)) + w
        if sum(merged.values()) != 1:
            raise ValueError(f"law sums to {sum(merged.values())}, not 1")
        if self.symbols is not None and len(self.symbols) != self.alphabet_size:
            raise ValueError("symbol list has the wrong length")
        object.__setattr__(self, "weights", tuple(sorted(merged.items())))

    @classmethod
    def from_dict(cls, alphabet_size: int, weights: dict, symbols=None) -> TripleLaw:
        return cls(alphabet_size, tuple(weights.items()), tuple(symbols) if symbols else None)

    @classmethod
    def from_relation(cls, p: Sequence, f: Callable[[int, int], int]) -> TripleLaw:
        """Law of ``(ξ1, ξ2, f(ξ1, ξ2))`` with ξ1, ξ2 i.i.d. with law ``p``."""
        p = [to_fraction(v) for v in p]
        w: dict[Cell, Fraction] = {}
        for i, pi in enumerate(p):
            for j, pj in enumerate(p):
                if pi and pj:
                    cell = (i, j, f(i, j))
                    w[cell] = w.get(cell, Fraction(0)) + pi * pj
        return cls.from_dict(len(p), w)

    def as_dict(self) -> dict[Cell, Fraction]:
        return dict(self.weights)

    def support(self) -> list[Cell]:
        return [c for c, _ in self.weights]

    def marginal(self, axis: int) -> tuple[Fraction, ...]:
        out = [Fraction(0)] * self.alphabet_size
        for cell, w in self.weights:
            out[cell[axis]] += w
        return tuple(out)

    def pair_marginal(self, a: int, b: int) -> dict[tuple[int, int], Fraction]:
        out: dict[tuple[int, int], Fraction] = {}
        for cell, w in self.weights:
            key = (cell[a], cell[b])
            out[key] = out.get(key, Fraction(0)) + w
        return out

    def relabel(self, perm: Sequence[int]) -> TripleLaw:
        """Apply the same alphabet permutation to all three coordinates."""
        return TripleLaw(self.alphabet_size,
                         tuple(((perm[i], perm[j], perm[k]), w) for (i, j, k), w in self.weights))


def identically_distributed(law: TripleLaw) -> bool:
    return law.marginal(0) == law.marginal(1) == law.marginal(2)


def check_pairwise_independent(law: TripleLaw) -> bool:
    """Every two-coordinate marginal equals the product of its one-coordinate marginals."""
    marg = [law.marginal(a) for a in range(3)]
    for a, b in ((0, 1), (0, 2), (1, 2)):
        joint = law.pair_marginal(a, b)
        sa = [i for i, v in enumerate(marg[a]) if v]
        sb = [j for j, v in enumerate(marg[b]) if v]
        # Both sides sum to 1 over supp × supp, so agreement there forces zeros elsewhere.
        for i in sa:
            for j in sb:
                if joint.get((i, j), 0) != marg[a][i] * marg[b][j]:
                    return False
    return True


def is_fully_independent(law: TripleLaw) -> bool:
    marg = [law.marginal(a) for a in range(3)]
    w = law.as_dict()
    supports = [[i for i, v in enumerate(m) if v] for m in marg]
    return all(w.get((i, j, k), 0) == marg[0][i] * marg[1][j] * marg[2][k]
               for i in supports[0] for j in supports[1] for k in supports[2])


def find_functional_relation(law: TripleLaw) -> tuple[tuple[int, ...], ...] | None:
    """A table ``f[i][j]`` with ξ3 = f(ξ1, ξ2) almost surely, or None.

    Cells where ``(ξ1, ξ2)`` has zero mass get the value 0.
    """
    n = law.alphabet_size
    table = [[None] * n for _ in range(n)]
    for (i, j, k), _ in law.weights:
        if table[i][j] is not None and table[i][j] != k:
            return None
        table[i][j] = k
    return tuple(tuple(0 if v is None else v for v in row) for row in table)


@dataclass(frozen=True)
class UniformVerdict:
    support: tuple[int, ...]
    probability: Fraction
    relation: tuple[tuple[int, ...], ...]
    bistochastic: tuple[tuple[Fraction, ...], ...]  # rows and columns indexed by ``support``


def _hypotheses(law: TripleLaw) -> list[str]:
    failed = []
    if not identically_distributed(law):
        failed.append("identical distribution")
    if not check_pairwise_independent(law):
        failed.append("pairwise independence")
    return failed


def uniform_law_oracle(law: TripleLaw) -> UniformVerdict:
    """Confirm the common marginal is uniform on its support.

    Also rebuilds the matrix ``m[k][i] = p[j_k(i)]`` where ``j_k(i)`` is the
    unique ``j`` with ``f(i, j) = k``, and checks it is bistochastic with
    ``M p = p``.  Raises :class:`HypothesisFailed` naming unmet hypotheses,
    and :class:`ConclusionFailed` if a conclusion fails on valid input.
    """
    failed = _hypotheses(law)
    f = find_functional_relation(law)
    if f is None:
        failed.append("functional relation")
    if failed:
        raise HypothesisFailed(failed)

    p = law.marginal(0)
    support = tuple(i for i, v in enumerate(p) if v)
    index = {s: r for r, s in enumerate(support)}
    matrix = [[Fraction(0)] * len(support) for _ in support]
    for i in support:
        hits: dict[int, list[int]] = {}
        for j in support:
            hits.setdefault(f[i][j], []).append(j)
        for k in support:
            if len(hits.get(k, [])) != 1:
                raise ConclusionFailed(f"f({i}, .) does not hit {k} exactly once on the support")
            matrix[index[k]][index[i]] = p[hits[k][0]]
    for r in range(len(support)):
        if sum(matrix[r]) != 1 or sum(row[r] for row in matrix) != 1:
            raise ConclusionFailed("reconstructed matrix is not bistochastic")
    pi = [p[s] for s in support]
    if [sum(m * q for m, q in zip(row, pi)) for row in matrix] != pi:
        raise ConclusionFailed("M p != p")
    if len(set(pi)) != 1:
        raise ConclusionFailed(f"marginal {pi} is not uniform on its support")
    return UniformVerdict(support, pi[0], f, tuple(tuple(r) for r in matrix))


# -- finite abelian groups ----------------------------------------------------

@dataclass(frozen=True)
class FiniteAbelianGroup:
    """``Z/n1 × ... × Z/nr``, elements encoded in mixed radix (last factor fastest)."""

    orders: tuple[int, ...]

    def __post_init__(self):
        orders = tuple(int(n) for n in self.orders)
        if any(n < 2 for n in orders):
            raise ValueError("cyclic factors must have order >= 2")
        object.__setattr__(self, "orders", orders)

    @property
    def order(self) -> int:
        out = 1
        for n in self.orders:
            out *= n
        return out

    def decode(self, g: int) -> tuple[int, ...]:
        digits = []
        for n in reversed(self.orders):
            digits.append(g % n)
            g //= n
        return tuple(reversed(digits))

    def encode(self, digits: Sequence[int]) -> int:
        g = 0
        for d, n in zip(digits, self.orders):
            g = g * n + d % n
        return g

    def add(self, g: int, h: int) -> int:
        return self.encode([a + b for a, b in zip(self.decode(g), self.decode(h))])

    def neg(self, g: int) -> int:
        return self.encode([-a for a in self.decode(g)])

    def elements(self) -> range:
        return range(self.order)

    def check_axioms(self) -> bool:
        els = self.elements()
        return (all(self.add(0, g) == g for g in els)
                and all(self.add(g, self.neg(g)) == 0 for g in els)
                and all(self.add(g, h) == self.add(h, g) for g in els for h in els)
                and all(self.add(self.add(g, h), k) == self.add(g, self.add(h, k))
                        for g in els for h in els for k in els))

    def is_subgroup(self, subset) -> bool:
        s = set(subset)
        return 0 in s and all(self.add(g, h) in s and self.neg(g) in s for g in s for h in s)

    def generated(self, gens) -> frozenset[int]:
        group = {0}
        frontier = [0]
        while frontier:
            g = frontier.pop()
            for h in gens:
                k = self.add(g, h)
                if k not in group:
                    group.add(k)
                    frontier.append(k)
        return frozenset(group)

    def subgroups(self) -> list[frozenset[int]]:
        """All subgroups, by closing every subset of generators of size <= rank + 1."""
        found = set()
        for r in range(len(self.orders) + 1):
            for gens in itertools.combinations(self.elements(), r):
                found.add(self.generated(gens))
        return sorted(found, key=lambda h: (len(h), sorted(h)))


def cyclic_group(n: int) -> FiniteAbelianGroup:
    return FiniteAbelianGroup((n,))


@dataclass(frozen=True)
class HaarVerdict:
    subgroup: tuple[int, ...]
    probability: Fraction


def haar_oracle(group: FiniteAbelianGroup, law: TripleLaw) -> HaarVerdict:
    """Stabilizer H of the common marginal ν; confirm ν is uniform on H."""
    if law.alphabet_size != group.order:
        raise ValueError("law alphabet and group order differ")
    failed = _hypotheses(law)
    if any(k != group.add(i, j) for (i, j, k), _ in law.weights):
        failed.append("additive relation")
    if failed:
        raise HypothesisFailed(failed)
    nu = law.marginal(0)
    stabilizer = tuple(g for g in group.elements()
                       if all(nu[group.add(h, g)] == nu[h] for h in group.elements()))
    support = {g for g, v in enumerate(nu) if v}
    if not group.is_subgroup(stabilizer):
        raise ConclusionFailed("stabilizer is not a subgroup")
    if not support <= set(stabilizer):
        raise ConclusionFailed("stabilizer does not contain the support")
    share = Fraction(1, len(stabilizer))
    if any(nu[g] != share for g in stabilizer):
        raise ConclusionFailed("marginal is not uniform on the stabilizer")
    return HaarVerdict(stabilizer, share)


def subgroup_law(group: FiniteAbelianGroup, subgroup) -> TripleLaw:
    """Uniform ``(a, b, a+b)`` with a, b independent and uniform on ``subgroup``."""
    h = sorted(subgroup)
    share = Fraction(1, len(h) ** 2)
    return TripleLaw.from_dict(group.order, {(a, b, group.add(a, b)): share for a in h for b in h})


# -- word-level laws ----------------------------------------------------------

def word_law(process: dict[tuple[int, ...], Fraction],
             combine: Callable[[tuple[int, ...], tuple[int, ...]], tuple[int, ...]]) -> TripleLaw:
    """Law of ``(w, w', combine(w, w'))`` for independent words with law ``process``.

    Letters are the words in the union of supports, ordered lexicographically.
    """
    process = {w: to_fraction(p) for w, p in process.items() if p}
    pairs = {}
    for w, p in process.items():
        for v, q in process.items():
            pairs[(w, v, tuple(combine(w, v)))] = pairs.get((w, v, tuple(combine(w, v))), 0) + p * q
    words = sorted({w for cell in pairs for w in cell})
    index = {w: i for i, w in enumerate(words)}
    weights = {tuple(index[w] for w in cell): p for cell, p in pairs.items()}
    return TripleLaw.from_dict(len(words), weights, symbols=words)


def xor_triple(p: Sequence, m: int) -> TripleLaw:
    """(w, w', w ⊕ w') for i.i.d. words of length ``m`` with symbol law ``p`` on {0, 1}."""
    if m < 1:
        raise ValueError("word length must be positive")
    p = [to_fraction(v) for v in p]
    if len(p) != 2 or sum(p) != 1 or min(p) < 0:
        raise ValueError("p must be a probability vector on {0, 1}")
    process = {}
    for w in itertools.product((0, 1), repeat=m):
        mass = Fraction(1)
        for s in w:
            mass *= p[s]
        if mass:
            process[w] = mass
    return word_law(process, lambda w, v: tuple(a ^ b for a, b in zip(w, v)))


@dataclass(frozen=True)
class GrowthReport:
    counts: tuple[int, ...]  # a_1, ..., a_M

    @property
    def verdict(self) -> str:
        return "periodic" if 1 in self.counts else "entropy >= log 2"

    @property
    def periodic_at(self) -> int | None:
        return self.counts.index(1) + 1 if 1 in self.counts else None


def _first_process(law: TripleLaw, m: int) -> dict[tuple, Fraction]:
    if law.symbols is None:
        raise ValueError("word-level laws need word symbols")
    out = {}
    for i, p in enumerate(law.marginal(0)):
        if p:
            word = tuple(law.symbols[i])
            if len(word) != m:
                raise ValueError(f"expected words of length {m}, found {word}")
            out[word] = p
    return out


def support_growth(builder: Callable[[int], TripleLaw], horizon: int,
                   check_hypotheses: bool = True) -> GrowthReport:
    """Support sizes a_m of the next-symbol law given a positive-mass prefix.

    ``builder(m)`` returns the triple law of length-``m`` words.  Raises
    :class:`PrefixDependentSupport` if a_m depends on the prefix and
    :class:`NonMonotoneSupport` if a_m > a_{m-1}.
    """
    counts = []
    previous = None
    for m in range(1, horizon + 1):
        law = builder(m)
        if check_hypotheses:
            failed = _hypotheses(law)
            if find_functional_relation(law) is None:
                failed.append("functional relation")
            if failed:
                raise HypothesisFailed([f"{h} (m={m})" for h in failed])
        process = _first_process(law, m)
        if previous is not None:
            prefixes: dict[tuple, Fraction] = {}
            for w, p in process.items():
                prefixes[w[:-1]] = prefixes.get(w[:-1], Fraction(0)) + p
            if prefixes != previous:
                raise ValueError(f"the length-{m} law does not extend the length-{m - 1} law")
        followers: dict[tuple, set] = {}
        for w in process:
            followers.setdefault(w[:-1], set()).add(w[-1])
        sizes = {len(s) for s in followers.values()}
        if len(sizes) != 1:
            raise PrefixDependentSupport(f"a_{m} depends on the prefix: sizes {sorted(sizes)}")
        a_m = sizes.pop()
        if counts and a_m > counts[-1]:
            raise NonMonotoneSupport(f"a_{m} = {a_m} > a_{m - 1} = {counts[-1]}")
        counts.append(a_m)
        previous = process
    return GrowthReport(tuple(counts))


# -- exhaustive sweeps --------------------------------------------------------

@dataclass(frozen=True)
class SweepResult:
    laws: int  # (p, f) pairs visited
    satisfying: int  # laws meeting every hypothesis, all confirmed
    nonuniform_candidates: int  # satisfying laws with a non-uniform marginal (must stay 0)


def rational_vectors(n: int, max_den: int) -> list[tuple[Fraction, ...]]:
    """Probability vectors on ``n`` letters whose entries have denominator <= max_den."""
    seen = set()
    for d in range(1, max_den + 1):
        for c in itertools.product(range(d + 1), repeat=n):
            if sum(c) == d:
                seen.add(tuple(Fraction(x, d) for x in c))
    return sorted(seen)


def uniform_law_sweep(max_alphabet: int = 3, max_den: int = 6) -> SweepResult:
    """Run :func:`uniform_law_oracle` on every law ``(ξ1, ξ2, f(ξ1, ξ2))``.

    ξ1, ξ2 are i.i.d. with a marginal from :func:`rational_vectors`, and f
    ranges over every table on the support (values off the support do not
    change the law).  A cheap necessary test, ξ3 having law p, screens the
    tables before the full oracle runs.  Any oracle failure propagates.
    """
    laws = satisfying = nonuniform = 0
    for n in range(1, max_alphabet + 1):
        for p in rational_vectors(n, max_den):
            support = [i for i in range(n) if p[i]]
            cells = [(i, j) for i in support for j in support]
            # integer numerators over a common denominator keep the screen fast
            den = math.lcm(*(q.denominator for q in p))
            num = [q.numerator * (den // q.denominator) for q in p]
            mass = [num[i] * num[j] for i, j in cells]
            target = [den * v for v in num]
            for values in itertools.product(range(n), repeat=len(cells)):
                laws += 1
                push = [0] * n
                for w, k in zip(mass, values):
                    push[k] += w
                if push != target:
                    continue
                table = dict(zip(cells, values))
                law = TripleLaw.from_relation(p, lambda i, j: table.get((i, j), 0))
                try:
                    uniform_law_oracle(law)
                except HypothesisFailed:
                    continue
                satisfying += 1
                if len({p[i] for i in support}) != 1:
                    nonuniform += 1
    return SweepResult(laws, satisfying, nonuniform)


def haar_sweep(groups: Sequence[FiniteAbelianGroup]) -> int:
    """Check :func:`haar_oracle` recovers every subgroup of every group; returns the count."""
    checked = 0
    for group in groups:
        for h in group.subgroups():
            verdict = haar_oracle(group, subgroup_law(group, h))
            if set(verdict.subgroup) != set(h):
                raise ConclusionFailed(f"{group.orders}: expected {sorted(h)}, got {verdict.subgroup}")
            checked += 1
    return checked
