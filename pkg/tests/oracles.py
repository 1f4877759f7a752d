"""Brute-force reference computations used only by the tests.

Each oracle takes a route independent of the library code it checks:
vertices by basis enumeration, commutants over all permutations,
invariant partitions over all set partitions, cylinder measures by summing
over every word.
"""

from __future__ import annotations

import itertools
from fractions import Fraction



def _square_solve(m, b):
    """Gauss-Jordan on a square Fraction system; None if singular."""
    n = len(m)
    aug = [list(row) + [v] for row, v in zip(m, b)]
    for c in range(n):
        piv = next((r for r in range(c, n) if aug[r][c] != 0), None)
        if piv is None:
            return None
        aug[c], aug[piv] = aug[piv], aug[c]
        inv = 1 / aug[c][c]
        aug[c] = [v * inv for v in aug[c]]
        for r in range(n):
            if r != c and aug[r][c] != 0:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    return [row[n] for row in aug]


def _independent_rows(rows):
    basis, keep = [], []
    for i, row in enumerate(rows):
        v = list(row)
        for piv, brow in basis:
            if v[piv] != 0:
                f = v[piv] / brow[piv]
                v = [x - f * y for x, y in zip(v, brow)]
        lead = next((j for j, x in enumerate(v) if x != 0), None)
        if lead is not None:
            basis.append((lead, v))
            keep.append(i)
    return keep


def basis_vertices(rows, rhs, nvars):
    """Vertices of {x >= 0 : A x = b} as basic feasible solutions."""
    keep = _independent_rows(rows)
    a = [[Fraction(v) for v in rows[i]] for i in keep]
    b = [Fraction(rhs[i]) for i in keep]
    found = set()
    for cols in itertools.combinations(range(nvars), len(keep)):
        sol = _square_solve([[row[c] for c in cols] for row in a], b)
        if sol is None or any(v < 0 for v in sol):
            continue
        x = [Fraction(0)] * nvars
        for c, v in zip(cols, sol):
            x[c] = v
        found.add(tuple(x))
    return sorted(found)


def brute_commutant(perm, measure):
    n = len(perm)
    out = []
    for s in itertools.permutations(range(n)):
        if all(s[perm[x]] == perm[s[x]] for x in range(n)) and \
                all(measure[s[x]] == measure[x] for x in range(n)):
            out.append(s)
    return sorted(out)


def set_partitions(items):
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def brute_invariant_partitions(perm):
    out = []
    for part in set_partitions(range(len(perm))):
        blocks = [frozenset(b) for b in part]
        if all(frozenset(perm[x] for x in b) in blocks for b in blocks):
            out.append(frozenset(blocks))
    return out


def word_sum_measure(transition, stationary, placed, length):
    """μ of ∩ T^{-offset} C by summing π(w_0) Π P(w_i, w_{i+1}) over every word of ``length``."""
    m = len(transition)
    total = Fraction(0)
    for w in itertools.product(range(m), repeat=length):
        if all(any(tuple(w[off:off + len(word)]) == tuple(word) for word in words)
               for off, words in placed):
            p = Fraction(stationary[w[0]])
            for a, b in zip(w, w[1:]):
                p *= transition[a][b]
            total += p
    return total


def orbit_ergodic_joinings(left, right):
    """Every uniform-on-one-orbit measure whose marginals are μ and ν, as weight matrices."""
    seen = set()
    out = []
    for x in range(left.size):
        for y in range(right.size):
            if (x, y) in seen:
                continue
            orbit = []
            cell = (x, y)
            while cell not in orbit:
                orbit.append(cell)
                cell = (left.perm[cell[0]], right.perm[cell[1]])
            seen.update(orbit)
            w = [[Fraction(0)] * right.size for _ in range(left.size)]
            for cx, cy in orbit:
                w[cx][cy] = Fraction(1, len(orbit))
            if all(sum(w[i]) == left.measure[i] for i in range(left.size)) and \
                    all(sum(w[i][j] for i in range(left.size)) == right.measure[j] for j in range(right.size)):
                out.append(tuple(tuple(r) for r in w))
    return out
