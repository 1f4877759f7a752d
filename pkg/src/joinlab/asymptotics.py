"""Cylinder calculus on stationary Markov shifts, plus orbit averages on finite systems.

Cylinders are anchored at coordinate 0: the word ``w`` of length ``ℓ`` names
``{x : x_0 ... x_{ℓ-1} = w}``, and ``T^{-n}`` moves the anchor to ``n``.  An
intersection of shifted cylinders is evaluated by choosing one word from each
set, merging them into a partial assignment of coordinates, and summing the
Markov path weight across the gaps with transition-matrix powers.

Two arithmetic modes: exact (Fractions, the default) and float.
"""

from __future__ import annotations

import itertools
import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import polytope
from .core import FiniteSystem, to_fraction
from .errors import CapExceeded, InvalidMarkovShift, Reducible
from .joinings import Coupling, joining_violations

FLOAT_TOL = 1e-12
RATIONAL_HORIZON_CAP = 1000

Number = Fraction | float
Matrix = tuple[tuple[Number, ...], ...]


def _matmul(a: Matrix, b: Matrix) -> Matrix:
    cols = list(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in cols) for row in a)


@dataclass(frozen=True)
class MarkovShift:
    """A stationary Markov chain on symbols ``0..m-1`` viewed as a shift system."""

    transition: Matrix
    stationary: tuple[Number, ...]
    exact: bool = True
    symbols: tuple[str, ...] | None = None
    _powers: dict = field(default_factory=dict, init=False, repr=False, compare=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, init=False, repr=False, compare=False)

    def __post_init__(self):
        conv = to_fraction if self.exact else float
        p = tuple(tuple(conv(v) for v in row) for row in self.transition)
        pi = tuple(conv(v) for v in self.stationary)
        m = len(p)
        if m == 0 or any(len(row) != m for row in p):
            raise InvalidMarkovShift("transition matrix must be square and nonempty")
        if len(pi) != m:
            raise InvalidMarkovShift("stationary vector has the wrong length")
        if self.symbols is not None and len(self.symbols) != m:
            raise InvalidMarkovShift("symbol list has the wrong length")
        close = (lambda a, b: a == b) if self.exact else (lambda a, b: abs(a - b) <= FLOAT_TOL)
        if any(v < 0 for row in p for v in row):
            raise InvalidMarkovShift("negative transition probability")
        for i, row in enumerate(p):
            if not close(sum(row), 1):
                raise InvalidMarkovShift(f"row {i} sums to {sum(row)}")
        if any(v <= 0 for v in pi) or not close(sum(pi), 1):
            raise InvalidMarkovShift("stationary vector must be positive and sum to 1")
        for j in range(m):
            if not close(sum(pi[i] * p[i][j] for i in range(m)), pi[j]):
                raise InvalidMarkovShift("stationary vector is not invariant under the transition")
        object.__setattr__(self, "transition", p)
        object.__setattr__(self, "stationary", pi)

    @property
    def size(self) -> int:
        return len(self.transition)

    def zero(self) -> Number:
        return Fraction(0) if self.exact else 0.0

    def power(self, k: int) -> Matrix:
        """``P^k``, memoized; the memo never changes results."""
        with self._lock:
            cached = self._powers.get(k)
        if cached is not None:
            return cached
        if k == 0:
            one = Fraction(1) if self.exact else 1.0
            result = tuple(tuple(one if i == j else self.zero() for j in range(self.size))
                           for i in range(self.size))
        elif k == 1:
            result = self.transition
        else:
            half = self.power(k // 2)
            result = _matmul(half, half)
            if k % 2:
                result = _matmul(result, self.transition)
        with self._lock:
            self._powers.setdefault(k, result)
        return result

    def to_json(self) -> dict:
        from .core import format_rational
        fmt = format_rational if self.exact else float
        return {
            "type": "markov",
            "alphabet": list(self.symbols or [str(i) for i in range(self.size)]),
            "transition": [[fmt(v) for v in row] for row in self.transition],
            "stationary": [fmt(v) for v in self.stationary],
        }


def _graph(shift: MarkovShift) -> list[list[int]]:
    return [[j for j, v in enumerate(row) if v > 0] for row in shift.transition]


def is_irreducible(shift: MarkovShift) -> bool:
    adj = _graph(shift)
    rev = [[] for _ in adj]
    for i, out in enumerate(adj):
        for j in out:
            rev[j].append(i)

    def reach(g):
        seen = {0}
        stack = [0]
        while stack:
            for j in g[stack.pop()]:
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        return len(seen) == len(g)

    return reach(adj) and reach(rev)


def period_classes(shift: MarkovShift) -> tuple[int, tuple[int, ...]]:
    """Period ``p`` of an irreducible chain and the cyclic class (mod p) of each state."""
    adj = _graph(shift)
    depth = {0: 0}
    queue = [0]
    for i in queue:
        for j in adj[i]:
            if j not in depth:
                depth[j] = depth[i] + 1
                queue.append(j)
    p = 0
    for i, out in enumerate(adj):
        for j in out:
            p = math.gcd(p, depth[i] + 1 - depth[j])
    p = abs(p) or 1
    return p, tuple(depth[i] % p for i in range(shift.size))


def stationary_distribution(transition, exact: bool = True) -> tuple[Number, ...]:
    """The unique stationary row vector of an irreducible chain."""
    m = len(transition)
    if exact:
        p = [[to_fraction(v) for v in row] for row in transition]
        rows = [[p[i][j] - (1 if i == j else 0) for i in range(m)] for j in range(m)]
        rows.append([Fraction(1)] * m)
        rhs = [Fraction(0)] * m + [Fraction(1)]
        if polytope.rank(rows, m) != m:
            raise Reducible("stationary distribution is not unique")
        return polytope.solve(rows, rhs, m)
    # Replace one balance equation by the normalization; nonsingular iff π is unique.
    a = np.array(transition, dtype=float).T - np.eye(m)
    a[-1, :] = 1.0
    b = np.zeros(m)
    b[-1] = 1.0
    if np.linalg.matrix_rank(a) != m:
        raise Reducible("stationary distribution is not unique")
    sol = np.clip(np.linalg.solve(a, b), 0.0, None)
    return tuple(float(v) for v in sol / sol.sum())


def markov_shift(transition, stationary=None, exact: bool = True,
                 symbols: Sequence[str] | None = None) -> MarkovShift:
    """Build a shift, computing the stationary vector when not given."""
    if stationary is None:
        stationary = stationary_distribution(transition, exact)
    return MarkovShift(tuple(tuple(r) for r in transition), tuple(stationary), exact,
                       tuple(symbols) if symbols is not None else None)


def bernoulli(probabilities: Sequence, exact: bool = True) -> MarkovShift:
    row = tuple(probabilities)
    return markov_shift([row] * len(row), row, exact)


# -- cylinders ----------------------------------------------------------------

@dataclass(frozen=True)
class CylinderSet:
    words: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        words = tuple(sorted({tuple(int(s) for s in w) for w in self.words}))
        if not words:
            raise ValueError("a cylinder set needs at least one word")
        if len({len(w) for w in words}) != 1 or len(words[0]) == 0:
            raise ValueError("all words must share one positive length")
        object.__setattr__(self, "words", words)

    @property
    def length(self) -> int:
        return len(self.words[0])


def cylinder(*words: str | Sequence[int]) -> CylinderSet:
    """``cylinder("01", "10")``: digit strings or integer sequences."""
    return CylinderSet(tuple(tuple(int(c) for c in w) for w in words))


def _assignment(placed: Sequence[tuple[int, Sequence[int]]]) -> dict[int, int] | None:
    coords: dict[int, int] = {}
    for offset, word in placed:
        for i, s in enumerate(word):
            if coords.setdefault(offset + i, s) != s:
                return None
    return coords


def _path_weight(shift: MarkovShift, coords: dict[int, int],
                 power: Callable[[int], Matrix]) -> Number:
    positions = sorted(coords)
    weight = shift.stationary[coords[positions[0]]]
    for a, b in zip(positions, positions[1:]):
        weight *= power(b - a)[coords[a]][coords[b]]
        if not weight:
            return weight
    return weight


def intersection_measure(shift: MarkovShift, placed: Sequence[tuple[int, CylinderSet]],
                         power: Callable[[int], Matrix] | None = None) -> Number:
    """μ(∩ T^{-offset} C) for the given (offset, cylinder set) pairs."""
    power = power or shift.power
    for _, c in placed:
        if any(s >= shift.size for w in c.words for s in w):
            raise ValueError(f"cylinder uses a symbol outside 0..{shift.size - 1}")
    total = shift.zero()
    for choice in itertools.product(*(c.words for _, c in placed)):
        coords = _assignment([(off, w) for (off, _), w in zip(placed, choice)])
        if coords is not None:
            total += _path_weight(shift, coords, power)
    return total


def cylinder_measure(shift: MarkovShift, a: CylinderSet) -> Number:
    return intersection_measure(shift, [(0, a)])


def correlation(shift: MarkovShift, a: CylinderSet, b: CylinderSet, n: int) -> Number:
    """μ(A ∩ T^{-n}B)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return intersection_measure(shift, [(0, a), (n, b)])


def triple_correlation(shift: MarkovShift, a: CylinderSet, b: CylinderSet, c: CylinderSet,
                       n: int, m: int) -> Number:
    """μ(A ∩ T^{-n}B ∩ T^{-(n+m)}C)."""
    if n < 0 or m < 0:
        raise ValueError("n and m must be nonnegative")
    return intersection_measure(shift, [(0, a), (n, b), (n + m, c)])


def furstenberg_average(shift: MarkovShift, sets: Sequence[CylinderSet], n: int) -> Number:
    """(1/n) Σ_{j=1}^{n} μ(A_0 ∩ T^{-j}A_1 ∩ ... ∩ T^{-kj}A_k)."""
    if len(sets) < 2:
        raise ValueError("need at least A_0 and A_1")
    if n < 1:
        raise ValueError("n must be positive")
    total = shift.zero()
    for j in range(1, n + 1):
        total += intersection_measure(shift, [(i * j, s) for i, s in enumerate(sets)])
    return total / n


# -- mixing -------------------------------------------------------------------

def spectral_certificate(shift: MarkovShift) -> float:
    """Largest eigenvalue modulus after removing one eigenvalue 1.

    Equals 1 for periodic chains, and bounds the geometric decay rate of
    correlations for mixing ones.
    """
    eig = np.linalg.eigvals(np.array([[float(v) for v in row] for row in shift.transition]))
    k = int(np.argmin(np.abs(eig - 1.0)))
    rest = np.delete(eig, k)
    if rest.size == 0:
        return 0.0
    value = float(np.max(np.abs(rest)))
    return 0.0 if value < FLOAT_TOL else value


def _require_irreducible(shift: MarkovShift) -> tuple[int, tuple[int, ...]]:
    if not is_irreducible(shift):
        raise Reducible("the chain is reducible")
    return period_classes(shift)


def _limit_power(shift: MarkovShift, period: int, classes: Sequence[int], residue: int) -> Matrix:
    """lim_k P^{kp + residue}: p·π_j on pairs whose classes differ by ``residue`` mod p."""
    m = shift.size
    zero = shift.zero()
    return tuple(tuple(period * shift.stationary[j] if (classes[j] - classes[i]) % period == residue % period
                       else zero for j in range(m)) for i in range(m))


def correlation_limsup(shift: MarkovShift, a: CylinderSet, b: CylinderSet) -> Number:
    """limsup_n μ(A ∩ T^{-n}B), exact for irreducible chains."""
    period, classes = _require_irreducible(shift)
    values = []
    for r in range(period):
        # Pick n whose single long gap n - ℓ_A + 1 = 2p + r (>= 2, so never a within-word step).
        n = a.length - 1 + 2 * period + r
        limit = _limit_power(shift, period, classes, r)
        values.append(intersection_measure(
            shift, [(0, a), (n, b)],
            power=lambda k, limit=limit: limit if k == n - a.length + 1 else shift.power(k)))
    return max(values)


@dataclass(frozen=True)
class MixingReport:
    a: CylinderSet
    b: CylinderSet
    horizon: int
    correlations: tuple[Number, ...]  # c_n for n = 0..horizon
    target: Number
    certificate: float
    period: int

    @property
    def mixing(self) -> bool:
        return self.period == 1

    def deviations(self) -> tuple[Number, ...]:
        return tuple(abs(c - self.target) for c in self.correlations)


def mixing_report(shift: MarkovShift, a: CylinderSet, b: CylinderSet, horizon: int) -> MixingReport:
    period, _ = _require_irreducible(shift)
    corr = tuple(correlation(shift, a, b, n) for n in range(horizon + 1))
    target = cylinder_measure(shift, a) * cylinder_measure(shift, b)
    return MixingReport(a, b, horizon, corr, target, spectral_certificate(shift), period)


@dataclass(frozen=True)
class OrnsteinReport:
    theta: Number
    bound: Number  # θ μ(A) μ(B)
    window_start: int
    horizon: int
    window_max: Number
    limsup: Number
    certificate: float

    @property
    def satisfied(self) -> bool:
        return self.limsup <= self.bound


def ornstein_check(shift: MarkovShift, a: CylinderSet, b: CylinderSet, theta, horizon: int,
                   start: int | None = None) -> OrnsteinReport:
    """Compare limsup_n μ(A ∩ T^{-n}B) with θ μ(A)μ(B).

    The verdict uses the exact limsup (limit matrices per cyclic residue);
    the observed maximum over ``start..horizon`` is reported alongside it.
    """
    theta = to_fraction(theta) if shift.exact else float(theta)
    if theta <= 0:
        raise ValueError("theta must be positive")
    _require_irreducible(shift)
    start = a.length if start is None else start
    window = [correlation(shift, a, b, n) for n in range(start, max(start, horizon) + 1)]
    bound = theta * cylinder_measure(shift, a) * cylinder_measure(shift, b)
    return OrnsteinReport(theta, bound, start, horizon, max(window),
                          correlation_limsup(shift, a, b), spectral_certificate(shift))


# -- orbit averages on finite systems -----------------------------------------

@dataclass(frozen=True)
class EmpiricalJoining:
    weights: tuple[tuple[Fraction, ...], ...]
    coupling: Coupling | None

    @property
    def is_coupling(self) -> bool:
        return self.coupling is not None


def empirical_joining(left: FiniteSystem, right: FiniteSystem, x: int, y: int, n: int) -> EmpiricalJoining:
    """δ_n(x,y) = (1/n) Σ_{k<n} δ_{(T^k x, S^k y)}, flagged when it is a joining."""
    if n < 1:
        raise ValueError("n must be positive")
    counts = [[0] * right.size for _ in range(left.size)]
    for _ in range(n):
        counts[x][y] += 1
        x, y = left.perm[x], right.perm[y]
    weights = tuple(tuple(Fraction(c, n) for c in row) for row in counts)
    coupling = None if joining_violations(weights, left, right) else Coupling(left, right, weights)
    return EmpiricalJoining(weights, coupling)


def weak_disjointness_average(left: FiniteSystem, right: FiniteSystem,
                              f: Sequence | Callable[[int], object],
                              g: Sequence | Callable[[int], object],
                              x: int, y: int, horizon: int) -> tuple[Fraction, Fraction]:
    """(1/N) Σ_{n<N} f(T^n x) g(S^n y) and its limit, the average over one joint period."""
    if horizon < 1:
        raise ValueError("N must be positive")
    fv = [to_fraction(f(i) if callable(f) else f[i]) for i in range(left.size)]
    gv = [to_fraction(g(i) if callable(g) else g[i]) for i in range(right.size)]

    def average(steps: int) -> Fraction:
        u, v, total = x, y, Fraction(0)
        for _ in range(steps):
            total += fv[u] * gv[v]
            u, v = left.perm[u], right.perm[v]
        return total / steps

    period = math.lcm(len(left.orbit_of(x)), len(right.orbit_of(y)))
    return average(horizon), average(period)


def check_horizon(shift: MarkovShift, horizon: int) -> None:
    if shift.exact and horizon > RATIONAL_HORIZON_CAP:
        raise CapExceeded(f"horizon {horizon} exceeds the exact-mode cap {RATIONAL_HORIZON_CAP}")
