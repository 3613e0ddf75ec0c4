"""The truncated tree of a directly split Nagao datum.

A vertex address is a triple (word, s, i) naming the vertex word.x_{i,s},
where x_{i,s} is the i-th vertex of the s-th translated standard ray.  The
word is the canonical coset representative modulo the vertex stabilizer, so
address equality is vertex equality.  Level-0 vertices carry s = 0: the free
product acts simply transitively on them and the word alone is the name.

Adjacency, levels and the group action are all symbolic (no truncation
needed); balls, distances and component structure are computed on explicit
BFS truncations.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import words as W
from .datum import NagaoDatum
from .errors import LevelTooHigh, NonCanonicalAddress, NotInTruncation
from .words import Gamma, Word

Vertex = tuple  # (word, s, i)


def base_vertex() -> Vertex:
    return (W.EMPTY, 0, 0)


def ray_vertex(i: int, s: int = 1) -> Vertex:
    """The standard-ray vertex x_{i,s} (x_i when s = 1)."""
    return (W.EMPTY, 0, 0) if i == 0 else (W.EMPTY, s, i)


def level(v: Vertex) -> int:
    return v[2]


def vertex_type(v: Vertex) -> int:
    """Parity class of the vertex (levels and tree distance agree mod 2)."""
    return v[2] % 2


def address_key(v: Vertex):
    """Canonical total order on addresses: by level, ray, then word."""
    return (v[2], v[1], v[0])


def validate_address(d: NagaoDatum, v: Vertex) -> None:
    w, s, i = v
    if i < 0:
        raise NonCanonicalAddress(f"negative level in {v}")
    if i == 0:
        if s != 0:
            raise NonCanonicalAddress(f"level-0 address must carry s=0: {v}")
    elif not 1 <= s <= d.k:
        raise NonCanonicalAddress(f"ray index {s} out of range 1..{d.k}")
    if not W.is_normal_form(d, w):
        raise NonCanonicalAddress(f"word not in normal form: {v}")
    if W.canon_coset(d, w, i, s) != w:
        raise NonCanonicalAddress(f"word not reduced modulo Stab(x_{{{i},{s}}}): {v}")


def act(d: NagaoDatum, g: Gamma, v: Vertex) -> Vertex:
    """Image of the vertex under a group element (g0, w_g)."""
    w, s, i = v
    g0, wg = g
    w2 = W.delta_mul(d, wg, w)
    if g0 != d.ident0:
        w2 = W.gamma0_conj(d, g0, w2)
        s2 = d.ray_shift(g0, s)[0] if i > 0 else 0
    else:
        s2 = s
    return (W.canon_coset(d, w2, i, s2), s2, i)


def act_word(d: NagaoDatum, wg: Word, v: Vertex) -> Vertex:
    """Image under an element of the free product (fast path, no Gamma0 part)."""
    w, s, i = v
    return (W.canon_coset(d, W.delta_mul(d, wg, w), i, s), s, i)


def neighbors(d: NagaoDatum, v: Vertex, checked: bool = True) -> list[Vertex]:
    """All tree neighbors, canonical addresses, deterministic order.

    Level 0: the k vertices w.x_{1,s}, s = 1..k.  Level i > 0: the unique
    up-neighbor w.x_{i+1,s} first, then the q_i down-neighbors
    w u.x_{i-1,s} for u in U_{i,s}, in element order.  `checked=False`
    skips address validation (hot path inside ball construction).
    """
    if checked:
        validate_address(d, v)
    w, s, i = v
    if i == 0:
        return [(W.canon_coset(d, w, 1, t), t, 1) for t in range(1, d.k + 1)]
    out = [(W.canon_coset(d, w, i + 1, s), s, i + 1)]
    grp = d.root(i).group
    down_level = i - 1
    s_down = s if down_level > 0 else 0
    for u in range(grp.order):
        if u == grp.identity:
            w2 = w
        else:
            w2 = W.delta_mul(d, w, ((s, ((i, u),)),))
        out.append((W.canon_coset(d, w2, down_level, s), s_down, down_level))
    return out


def up_neighbor(d: NagaoDatum, v: Vertex) -> Vertex:
    w, s, i = v
    if i == 0:
        raise NonCanonicalAddress("level-0 vertices have no distinguished up-neighbor")
    return (W.canon_coset(d, w, i + 1, s), s, i + 1)


@dataclass
class TruncatedTree:
    """Radius-rho ball around a center vertex, with exact addresses.

    Vertices are indexed in BFS discovery order; `parent` gives the tree
    structure toward the center, `adj` the full in-ball adjacency.  A vertex
    is interior when all its tree neighbors lie in the ball.
    """

    datum: NagaoDatum
    center: Vertex
    radius: int
    verts: list[Vertex]
    index: dict[Vertex, int]
    dist: list[int]
    parent: list[int]
    adj: list[list[int]]

    def __post_init__(self):
        self._perm_cache: dict = {}
        self._graph_cache: dict = {}

    @property
    def n(self) -> int:
        return len(self.verts)

    def vid(self, v: Vertex) -> int:
        i = self.index.get(v)
        if i is None:
            raise NotInTruncation(f"{v} is outside the radius-{self.radius} ball")
        return i

    def __contains__(self, v: Vertex) -> bool:
        return v in self.index

    def level(self, vid: int) -> int:
        return self.verts[vid][2]

    def is_interior(self, vid: int) -> bool:
        return self.dist[vid] < self.radius

    def interior_ids(self) -> list[int]:
        return [i for i in range(self.n) if self.dist[i] < self.radius]

    def degree(self, vid: int) -> int:
        return len(self.adj[vid])

    def perm(self, g: Gamma) -> list[int]:
        """The action of g on ball indices; -1 where the image escapes.

        Exact escaped images are always available through `act`.
        """
        cached = self._perm_cache.get(g)
        if cached is None:
            d = self.datum
            idx = self.index
            cached = [idx.get(act(d, g, v), -1) for v in self.verts]
            self._perm_cache[g] = cached
        return cached

    def to_json(self) -> dict:
        from .serialize import vertex_to_json
        edges = sorted(
            (a, b) for a in range(self.n) for b in self.adj[a] if a < b
        )
        return {
            "datum": self.datum.name or "custom",
            "radius": self.radius,
            "vertices": [
                {"id": i, "address": vertex_to_json(v), "level": v[2],
                 "dist": self.dist[i]}
                for i, v in enumerate(self.verts)
            ],
            "edges": [[a, b] for a, b in edges],
        }


def ball(d: NagaoDatum, center: Vertex, radius: int) -> TruncatedTree:
    """BFS closure of `center` to distance `radius`; cached per datum."""
    key = (center, radius)
    hit = d._caches.get(key)
    if hit is not None:
        return hit
    validate_address(d, center)
    verts = [center]
    index = {center: 0}
    dist = [0]
    parent = [-1]
    adj: list[list[int]] = [[]]
    frontier = [0]
    for depth in range(1, radius + 1):
        nxt = []
        for vid in frontier:
            v = verts[vid]
            for u in neighbors(d, v, checked=False):
                uid = index.get(u)
                if uid is None:
                    uid = len(verts)
                    verts.append(u)
                    index[u] = uid
                    dist.append(depth)
                    parent.append(vid)
                    adj.append([])
                    adj[vid].append(uid)
                    adj[uid].append(vid)
                    nxt.append(uid)
                # an already-seen neighbor is the BFS parent: edge recorded
        frontier = nxt
    t = TruncatedTree(datum=d, center=center, radius=radius, verts=verts,
                      index=index, dist=dist, parent=parent, adj=adj)
    d._caches[key] = t
    return t


def distance(t: TruncatedTree, a: Vertex, b: Vertex) -> int:
    """Tree distance via the lowest common ancestor in the BFS structure."""
    return len(geodesic(t, a, b)) - 1


def geodesic(t: TruncatedTree, a: Vertex, b: Vertex) -> list[Vertex]:
    """The unique tree path from a to b, both inside the truncation."""
    ia, ib = t.vid(a), t.vid(b)
    up_a = [ia]
    up_b = [ib]
    da, db = t.dist[ia], t.dist[ib]
    while da > db:
        ia = t.parent[ia]
        up_a.append(ia)
        da -= 1
    while db > da:
        ib = t.parent[ib]
        up_b.append(ib)
        db -= 1
    while ia != ib:
        ia = t.parent[ia]
        ib = t.parent[ib]
        up_a.append(ia)
        up_b.append(ib)
    path = up_a + list(reversed(up_b[:-1]))
    return [t.verts[i] for i in path]


def is_biregular(d: NagaoDatum) -> bool:
    """True iff the degree sequence depends only on level parity."""
    return d.profile.biregular


@dataclass
class UniformPiece:
    """The in-ball part of Y_i (levels <= i reachable from the center),
    together with generators of the uniform lattice acting on it and the
    truncated fundamental domain (the k clipped rays)."""

    i: int
    vertex_ids: list[int]
    generators: list[Word]
    fundamental_domain: list[Vertex]
    tree: TruncatedTree

    @property
    def vertices(self) -> list[Vertex]:
        return [self.tree.verts[vid] for vid in self.vertex_ids]

    def degree_in_piece(self, vid: int) -> int:
        member = set(self.vertex_ids)
        return sum(1 for u in self.tree.adj[vid] if u in member)


def component_ids(t: TruncatedTree, start_vid: int, level_bound: int) -> list[int]:
    """Flood fill over vertices of level <= level_bound, sorted ids."""
    if t.level(start_vid) > level_bound:
        raise LevelTooHigh(
            f"start vertex has level {t.level(start_vid)} > bound {level_bound}")
    seen = {start_vid}
    stack = [start_vid]
    while stack:
        v = stack.pop()
        for u in t.adj[v]:
            if u not in seen and t.level(u) <= level_bound:
                seen.add(u)
                stack.append(u)
    return sorted(seen)


def uniform_piece(d: NagaoDatum, i: int, radius: int) -> UniformPiece:
    """Y_i intersected with the standard ball, plus Delta_i generators."""
    t = ball(d, base_vertex(), radius)
    ids = component_ids(t, t.vid(base_vertex()), i)
    gens = [W.generator(s, j, u)
            for s in range(1, d.k + 1)
            for j in range(1, i + 1)
            for u in range(d.root(j).group.order)
            if u != d.root(j).group.identity]
    fd = [base_vertex()] + [
        (W.EMPTY, s, lev)
        for s in range(1, d.k + 1)
        for lev in range(1, min(i, radius) + 1)
    ]
    fd = [v for v in fd if v in t]
    return UniformPiece(i=i, vertex_ids=ids, generators=gens,
                        fundamental_domain=fd, tree=t)


# -- level reconstruction from degrees ---------------------------------------

@dataclass
class LevelReconstruction:
    """Levels recoverable from the ball graph and its degree schedule.

    `levels` maps each determined vertex to the unique level consistent with
    every admissible labelling; `ambiguous` is True when no vertex at all is
    pinned down (e.g. biregular trees, where the level function leaves no
    local trace).
    """

    ambiguous: bool
    levels: dict[Vertex, int]


def _candidates(t: TruncatedTree, lmax: int) -> list[int]:
    """Per-vertex admissible-label bitmasks (bit m = label m allowed)."""
    prof = t.datum.profile
    full = (1 << (lmax + 1)) - 1
    cands = []
    for vid in range(t.n):
        if t.is_interior(vid):
            deg = t.degree(vid)
            mask = 0
            for lv in range(lmax + 1):
                if prof.degree(lv) == deg:
                    mask |= 1 << lv
            cands.append(mask)
        else:
            cands.append(full)
    return cands


def _propagate(t, cand: list[int], queue: list[int], full: int) -> bool:
    """Arc consistency for the level axioms; False on contradiction.

    Axioms: adjacent labels differ by exactly 1; an interior vertex labelled
    m > 0 has exactly one neighbor labelled m + 1; labels are >= 0.
    Candidate sets are bitmasks, so the edge rule is a pair of shifts.
    """
    adj = t.adj
    pending = set(queue)
    while pending:
        vid = pending.pop()
        cv = cand[vid]
        if not cv:
            return False
        allowed = ((cv << 1) | (cv >> 1)) & full
        for u in adj[vid]:
            newc = cand[u] & allowed
            if newc != cand[u]:
                if not newc:
                    return False
                cand[u] = newc
                pending.add(u)
                pending.update(adj[u])
        if cv & (cv - 1) == 0 and t.dist[vid] < t.radius:
            m = cv.bit_length() - 1
            if m > 0:
                up_bit = 1 << (m + 1)
                ups = [u for u in adj[vid] if cand[u] == up_bit]
                can_up = [u for u in adj[vid] if cand[u] & up_bit]
                if len(ups) > 1 or not can_up:
                    return False
                if len(ups) == 1:
                    for u in adj[vid]:
                        if u != ups[0] and cand[u] & up_bit:
                            if cand[u] == up_bit:
                                return False
                            cand[u] &= ~up_bit
                            pending.add(u)
                            pending.update(adj[u])
                elif len(can_up) == 1:
                    u = can_up[0]
                    if cand[u] != up_bit:
                        cand[u] = up_bit
                        pending.add(u)
                        pending.update(adj[u])
    return True


def _solve(t, cand: list[int], full: int):
    """One admissible labelling extending the candidate masks, or None."""
    if not _propagate(t, cand, list(range(t.n)), full):
        return None
    pick = -1
    best = 1 << 30
    for vid in range(t.n):
        c = cand[vid]
        if c & (c - 1):
            size = bin(c).count("1")
            if size < best:
                best, pick = size, vid
    if pick < 0:
        for vid in t.interior_ids():
            m = cand[vid].bit_length() - 1
            if m > 0:
                up_bit = 1 << (m + 1)
                if sum(1 for u in t.adj[vid] if cand[u] == up_bit) != 1:
                    return None
        return cand
    c = cand[pick]
    while c:
        bit = c & -c
        trial = cand.copy()
        trial[pick] = bit
        got = _solve(t, trial, full)
        if got is not None:
            return got
        c &= c - 1
    return None


def level_from_degrees(t: TruncatedTree) -> LevelReconstruction:
    """Reconstruct levels from local degrees where they are forced.

    A vertex is determined when exactly one label value admits an admissible
    labelling of the whole ball.  For biregular data nothing is determined
    and the result is flagged ambiguous: shifting any admissible labelling
    up by two produces another one, so no label is forced.
    """
    if t.datum.profile.biregular:
        return LevelReconstruction(ambiguous=True, levels={})
    lmax = 2 * t.radius + 2
    full = (1 << (lmax + 1)) - 1
    base = _candidates(t, lmax)
    if not _propagate(t, base, list(range(t.n)), full):
        raise NotInTruncation("degree data admits no level labelling")
    # every found labelling certifies all its vertex-value pairs as feasible
    feasible: list[int] = [0] * t.n
    first = _solve(t, base.copy(), full)
    if first is None:
        raise NotInTruncation("degree data admits no level labelling")
    for vid in range(t.n):
        feasible[vid] |= first[vid]
    # a vertex is pinned once every alternative candidate value is proven
    # infeasible; feasibility facts harvested later only widen value sets,
    # so the verdict is taken after the whole sweep
    exhausted = [False] * t.n
    for vid in range(t.n):
        if feasible[vid] & (feasible[vid] - 1):
            continue
        c = base[vid] & ~feasible[vid]
        found_extra = False
        while c:
            bit = c & -c
            trial = base.copy()
            trial[vid] = bit
            got = _solve(t, trial, full)
            if got is not None:
                for u in range(t.n):
                    feasible[u] |= got[u]
                found_extra = True
                break
            c &= c - 1
        exhausted[vid] = not found_extra
    levels: dict[Vertex, int] = {}
    for vid in range(t.n):
        fv = feasible[vid]
        if exhausted[vid] and fv and fv & (fv - 1) == 0:
            levels[t.verts[vid]] = fv.bit_length() - 1
    return LevelReconstruction(ambiguous=not levels, levels=levels)
