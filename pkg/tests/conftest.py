"""Shared fixtures and independent oracles.

The oracles deliberately avoid the package's own BFS/flood machinery: ball
sizes come from a degree recursion over the q-schedule, group tables from
permutation composition, coset counts from brute-force enumeration.
"""

from __future__ import annotations

import itertools
from collections import Counter

import pytest

from nagaotree import datum as D
from nagaotree import tree as T


@pytest.fixture(scope="session")
def d0():
    return D.builtin("D0")


@pytest.fixture(scope="session")
def d1():
    return D.builtin("D1")


@pytest.fixture(scope="session")
def d2():
    return D.builtin("D2")


@pytest.fixture(scope="session")
def d3():
    return D.builtin("D3")


@pytest.fixture(scope="session")
def ball_d0_6(d0):
    return T.ball(d0, T.base_vertex(), 6)


@pytest.fixture(scope="session")
def ball_d2_4(d2):
    return T.ball(d2, T.base_vertex(), 4)


# -- oracles ------------------------------------------------------------------

def ball_size_oracle(profile, radius: int) -> int:
    """Vertex count of a ball around the base vertex, by degree recursion.

    States are (level, entered-from-above?) pairs; the base vertex seeds k
    level-1 children, a level-0 vertex continues with k - 1 level-1
    children, and a level-l vertex continues with q_l or q_l - 1 + 1
    children depending on the entry direction.
    """
    total = 1
    layer = Counter({(1, False): profile.k})  # (level, from_up), from base
    for _ in range(radius):
        total += sum(layer.values())
        nxt = Counter()
        for (lv, from_up), count in layer.items():
            if lv == 0:
                nxt[(1, False)] += count * (profile.k - 1)
            elif from_up:
                nxt[(lv - 1, True)] += count * profile.q(lv)
            else:
                nxt[(lv + 1, False)] += count
                nxt[(lv - 1, True)] += count * (profile.q(lv) - 1)
        layer = nxt
    return total


def perm_group_closure(gens: list[tuple[int, ...]]) -> list[tuple[int, ...]]:
    """Brute-force closure of permutation generators under composition."""
    n = len(gens[0])
    ident = tuple(range(n))
    elems = {ident}
    frontier = [ident]
    while frontier:
        p = frontier.pop()
        for g in gens:
            q = tuple(p[g[x]] for x in range(n))
            if q not in elems:
                elems.add(q)
                frontier.append(q)
    return sorted(elems)


def perm_table(elems: list[tuple[int, ...]]) -> list[list[int]]:
    index = {p: i for i, p in enumerate(elems)}
    return [
        [index[tuple(p[q[x]] for x in range(len(p)))] for q in elems]
        for p in elems
    ]


def brute_cosets(order: int, table, members) -> list[frozenset]:
    """Left cosets of a subgroup by scanning all elements."""
    seen = set()
    cosets = []
    for g in range(order):
        cs = frozenset(table[g][h] for h in members)
        if cs not in seen:
            seen.add(cs)
            cosets.append(cs)
    return cosets


def geodesic_levels(t, a, b) -> list[int]:
    return [v[2] for v in T.geodesic(t, a, b)]


def horoball_oracle(t, x) -> set:
    """Geodesic characterization: y is in the horoball of x iff the tree
    path from x to y never dips below the level of x."""
    lv = x[2]
    out = set()
    for vid in range(t.n):
        y = t.verts[vid]
        if y[2] < lv:
            continue
        if min(geodesic_levels(t, x, y)) >= lv:
            out.add(y)
    return out


def all_level_matchings(d, c, c2, level_bound=None):
    """All level-preserving bijections between the stars of c and c2,
    as dictionaries including the centers.  With a bound, only neighbors
    at or below it take part (stars inside a bounded-level component)."""
    if c[2] != c2[2]:
        return

    def star(center):
        out = [u for u in T.neighbors(d, center)
               if level_bound is None or u[2] <= level_bound]
        return sorted(out, key=T.address_key)

    n1 = star(c)
    n2 = star(c2)
    by_level = {}
    for u in n2:
        by_level.setdefault(u[2], []).append(u)
    groups = {}
    for u in n1:
        groups.setdefault(u[2], []).append(u)
    if sorted(groups) != sorted(by_level):
        return
    pools = []
    for lv in sorted(groups):
        if len(groups[lv]) != len(by_level[lv]):
            return
        pools.append([list(zip(groups[lv], perm))
                      for perm in itertools.permutations(by_level[lv])])
    for combo in itertools.product(*pools):
        pairs = {c: c2}
        for block in combo:
            pairs.update(dict(block))
        yield pairs
