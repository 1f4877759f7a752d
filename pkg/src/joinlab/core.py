"""Finite measure-preserving systems, factor maps and exact measures.

A finite system is a permutation of ``{0, ..., n-1}`` together with an
invariant probability vector of strictly positive rationals.  Everything in
this module is exact: measures are :class:`fractions.Fraction` and no float
ever enters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence

from .errors import (
    BruteForceCapExceeded,
    InvalidMeasure,
    NotAPermutation,
    NotEquivariant,
    NotInvariant,
    NotMeasurePreserving,
    NotSurjective,
    ZeroMassState,
)

Rational = Fraction

ISOMORPHISM_CAP = 100_000


def to_fraction(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction.

    Floats are refused: a float carries a binary expansion, not the rational
    the caller probably meant.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not measures")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidMeasure(f"cannot parse rational {value!r}") from exc
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def prob_vector(entries: Iterable) -> tuple[Fraction, ...]:
    """Validate a probability vector: nonnegative entries summing to exactly 1."""
    vec = tuple(to_fraction(e) for e in entries)
    if not vec:
        raise InvalidMeasure("probability vector must be nonempty")
    if any(e < 0 for e in vec):
        raise InvalidMeasure("probability vector has a negative entry")
    if sum(vec) != 1:
        raise InvalidMeasure(f"probability vector sums to {sum(vec)}, not 1")
    return vec


def permutation_cycles(perm: Sequence[int]) -> tuple[tuple[int, ...], ...]:
    """Cycles of a permutation, each starting at its least element, ordered by it."""
    seen = [False] * len(perm)
    cycles = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        cycle = []
        x = start
        while not seen[x]:
            seen[x] = True
            cycle.append(x)
            x = perm[x]
        cycles.append(tuple(cycle))
    return tuple(cycles)


def compose(outer: Sequence[int], inner: Sequence[int]) -> tuple[int, ...]:
    """The permutation ``outer ∘ inner``."""
    return tuple(outer[i] for i in inner)


def perm_power(perm: Sequence[int], k: int) -> tuple[int, ...]:
    n = len(perm)
    k %= math.lcm(*(len(c) for c in permutation_cycles(perm))) if n else 1
    result = tuple(range(n))
    for _ in range(k):
        result = compose(perm, result)
    return result


@dataclass(frozen=True)
class FiniteSystem:
    """A permutation ``perm`` of ``range(n)`` preserving the measure ``measure``.

    Construct through :func:`make_finite_system` or call the constructor
    directly; both validate.
    """

    perm: tuple[int, ...]
    measure: tuple[Fraction, ...]

    def __post_init__(self):
        perm = tuple(int(p) for p in self.perm)
        measure = prob_vector(self.measure)
        n = len(perm)
        if n == 0:
            raise NotAPermutation("a system needs at least one state")
        if sorted(perm) != list(range(n)):
            raise NotAPermutation(f"{list(perm)} is not a permutation of range({n})")
        if len(measure) != n:
            raise InvalidMeasure(f"measure has length {len(measure)}, expected {n}")
        zero = [i for i, m in enumerate(measure) if m == 0]
        if zero:
            raise ZeroMassState(f"states {zero} carry zero mass")
        for i in range(n):
            if measure[perm[i]] != measure[i]:
                raise NotInvariant(
                    f"measure differs on the orbit of state {i}: "
                    f"mu({i})={measure[i]} but mu(T{i})={measure[perm[i]]}"
                )
        object.__setattr__(self, "perm", perm)
        object.__setattr__(self, "measure", measure)

    @property
    def size(self) -> int:
        return len(self.perm)

    def cycles(self) -> tuple[tuple[int, ...], ...]:
        return permutation_cycles(self.perm)

    def orbit_of(self, x: int) -> tuple[int, ...]:
        orbit = [x]
        y = self.perm[x]
        while y != x:
            orbit.append(y)
            y = self.perm[y]
        return tuple(orbit)

    def apply(self, x: int, k: int = 1) -> int:
        if k < 0:
            k %= len(self.orbit_of(x))
        for _ in range(k):
            x = self.perm[x]
        return x

    def power(self, k: int) -> tuple[int, ...]:
        return perm_power(self.perm, k)

    def period(self) -> int:
        """Least ``p >= 1`` with ``T^p = Id``."""
        return math.lcm(*(len(c) for c in self.cycles()))

    def mass(self, indices: Iterable[int]) -> Fraction:
        return sum((self.measure[i] for i in set(indices)), Fraction(0))

    def to_json(self) -> dict:
        return {
            "type": "finite",
            "perm": list(self.perm),
            "measure": [format_rational(m) for m in self.measure],
        }


def format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def make_finite_system(perm: Sequence[int], measure: Iterable | None = None) -> FiniteSystem:
    """Build a validated system; ``measure`` defaults to uniform."""
    if measure is None:
        measure = [Fraction(1, len(perm))] * len(perm)
    return FiniteSystem(tuple(perm), tuple(to_fraction(m) for m in measure))


def cycle_system(n: int) -> FiniteSystem:
    """The rotation ``x -> x+1 mod n`` with uniform measure."""
    return make_finite_system([(i + 1) % n for i in range(n)])


def identity_system(measure: int | Iterable) -> FiniteSystem:
    """Identity map; pass an int for the uniform measure on that many points."""
    if isinstance(measure, int):
        measure = [Fraction(1, measure)] * measure
    measure = list(measure)
    return make_finite_system(range(len(measure)), measure)


def one_point_system() -> FiniteSystem:
    return make_finite_system([0], [1])


def product_system(left: FiniteSystem, right: FiniteSystem) -> FiniteSystem:
    """``T×S`` on the cells ``(x, y)`` encoded as ``x * right.size + y``."""
    m = right.size
    perm = [left.perm[x] * m + right.perm[y] for x in range(left.size) for y in range(m)]
    measure = [left.measure[x] * right.measure[y] for x in range(left.size) for y in range(m)]
    return make_finite_system(perm, measure)


def is_ergodic_system(system: FiniteSystem) -> bool:
    """A permutation system is ergodic iff it is a single cycle."""
    return len(system.orbit_of(0)) == system.size


@dataclass(frozen=True)
class MeasurableSet:
    system: FiniteSystem
    indices: frozenset[int]

    def __post_init__(self):
        indices = frozenset(int(i) for i in self.indices)
        bad = [i for i in indices if not 0 <= i < self.system.size]
        if bad:
            raise ValueError(f"indices {sorted(bad)} out of range")
        object.__setattr__(self, "indices", indices)

    def measure(self) -> Fraction:
        return self.system.mass(self.indices)

    def preimage(self) -> MeasurableSet:
        """``T^{-1}A``."""
        return MeasurableSet(self.system, frozenset(x for x in range(self.system.size)
                                                    if self.system.perm[x] in self.indices))


# -- factor maps ----------------------------------------------------------------

@dataclass(frozen=True)
class FactorMap:
    """An equivariant, measure-preserving surjection ``source -> target``."""

    source: FiniteSystem
    target: FiniteSystem
    mapping: tuple[int, ...]

    def __post_init__(self):
        mapping = tuple(int(z) for z in self.mapping)
        object.__setattr__(self, "mapping", mapping)
        src, tgt = self.source, self.target
        if len(mapping) != src.size:
            raise ValueError(f"map has {len(mapping)} entries, source has {src.size} states")
        if any(not 0 <= z < tgt.size for z in mapping):
            raise ValueError("map sends a state outside the target")
        missing = sorted(set(range(tgt.size)) - set(mapping))
        if missing:
            raise NotSurjective(f"target states {missing} are not hit")
        pushed = [Fraction(0)] * tgt.size
        for x, z in enumerate(mapping):
            pushed[z] += src.measure[x]
        for z in range(tgt.size):
            if pushed[z] != tgt.measure[z]:
                raise NotMeasurePreserving(
                    f"pushforward mass at {z} is {pushed[z]}, target has {tgt.measure[z]}")
        for x in range(src.size):
            if mapping[src.perm[x]] != tgt.perm[mapping[x]]:
                raise NotEquivariant(f"map(T {x}) != R(map({x}))")

    def __call__(self, x: int) -> int:
        return self.mapping[x]

    def then(self, other: FactorMap) -> FactorMap:
        """Composition ``other ∘ self``."""
        if other.source != self.target:
            raise ValueError("cannot compose: target of the first map is not the source of the second")
        return FactorMap(self.source, other.target, tuple(other.mapping[z] for z in self.mapping))

    def is_isomorphism(self) -> bool:
        return self.source.size == self.target.size

    def partition(self) -> tuple[tuple[int, ...], ...]:
        blocks: dict[int, list[int]] = {}
        for x, z in enumerate(self.mapping):
            blocks.setdefault(z, []).append(x)
        return tuple(sorted(tuple(b) for b in blocks.values()))


def make_factor_map(source: FiniteSystem, target: FiniteSystem,
                    mapping: Sequence[int] | Callable[[int], int]) -> FactorMap:
    if callable(mapping):
        mapping = [mapping(x) for x in range(source.size)]
    return FactorMap(source, target, tuple(mapping))


def identity_factor(system: FiniteSystem) -> FactorMap:
    return FactorMap(system, system, tuple(range(system.size)))


def trivial_factor(system: FiniteSystem) -> FactorMap:
    return FactorMap(system, one_point_system(), (0,) * system.size)


def quotient(system: FiniteSystem, blocks: Sequence[Sequence[int]]) -> FactorMap:
    """Factor map onto the quotient by a ``T``-invariant partition.

    Target states are numbered by the least source state of each block.
    """
    ordered = sorted((sorted(b) for b in blocks), key=lambda b: b[0])
    label = {}
    for z, block in enumerate(ordered):
        for x in block:
            label[x] = z
    if sorted(label) != list(range(system.size)):
        raise ValueError("blocks do not partition the state space")
    perm = []
    for block in ordered:
        images = {label[system.perm[x]] for x in block}
        if len(images) != 1:
            raise NotEquivariant(f"block {block} is not mapped into a single block")
        perm.append(images.pop())
    measure = [system.mass(b) for b in ordered]
    target = make_finite_system(perm, measure)
    return FactorMap(system, target, tuple(label[x] for x in range(system.size)))


def is_isomorphism_map(source: FiniteSystem, target: FiniteSystem, mapping: Sequence[int]) -> bool:
    if source.size != target.size or sorted(mapping) != list(range(target.size)):
        return False
    return all(mapping[source.perm[x]] == target.perm[mapping[x]]
               and source.measure[x] == target.measure[mapping[x]]
               for x in range(source.size))


def iter_isomorphisms(source: FiniteSystem, target: FiniteSystem,
                      cap: int = ISOMORPHISM_CAP) -> Iterator[tuple[int, ...]]:
    """All measure-preserving equivariant bijections ``source -> target``.

    Each cycle of ``source`` must land on a distinct cycle of ``target`` with
    the same length and mass, at some rotation offset; the search walks those
    choices.  Raises :class:`BruteForceCapExceeded` once more than ``cap`` maps were produced.
    """
    if source.size != target.size:
        return
    src_cycles = source.cycles()
    tgt_cycles = target.cycles()
    signature = lambda sys, c: (len(c), sys.measure[c[0]])  # noqa: E731
    if sorted(signature(source, c) for c in src_cycles) != sorted(signature(target, c) for c in tgt_cycles):
        return

    # Options for a source cycle: (target cycle index, start point), sorted by the image of its first point.
    options = []
    for c in src_cycles:
        opts = [(t, d) for t, d_cycle in enumerate(tgt_cycles)
                if signature(target, d_cycle) == signature(source, c) for d in d_cycle]
        opts.sort(key=lambda o: o[1])
        options.append(opts)

    mapping = [None] * source.size
    used = [False] * len(tgt_cycles)
    produced = 0

    def backtrack(k):
        nonlocal produced
        if k == len(src_cycles):
            produced += 1
            if produced > cap:
                raise BruteForceCapExceeded(f"more than {cap} isomorphisms")
            yield tuple(mapping)
            return
        cycle = src_cycles[k]
        for t, start in options[k]:
            if used[t]:
                continue
            used[t] = True
            y = start
            for x in cycle:
                mapping[x] = y
                y = target.perm[y]
            yield from backtrack(k + 1)
            used[t] = False
        for x in cycle:
            mapping[x] = None

    yield from backtrack(0)
