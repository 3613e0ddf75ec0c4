"""Horospheres, horoballs, bounded-level components and the component graph.

For a vertex x of positive level, the horoball HB(x) is the connected
component of x in the forest spanned by all vertices of level >= l(x); the
horosphere HS(x) is its set of level-l(x) vertices.  For a level bound i,
the components of the level-<=i forest form the nodes of a graph whose edges
join components touching a common horosphere at level i.  Both families are
computed extensionally inside a built ball; all sets are convex, so their
in-ball parts are connected and flood fill is exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import tree as T
from . import words as W
from .datum import NagaoDatum
from .errors import LevelTooHigh, LevelZeroBase, NotInGraph
from .tree import TruncatedTree, Vertex


def level_increasing_ray(d: NagaoDatum, x: Vertex, length: int) -> list[Vertex]:
    """The unique ray from x along which the level increases by 1 per step."""
    if x[2] == 0:
        raise LevelZeroBase(f"{x} has level 0: no level-increasing ray")
    out = [x]
    for _ in range(length):
        out.append(T.up_neighbor(d, out[-1]))
    return out


@dataclass
class HoroballView:
    """HB(base) intersected with a ball; horosphere = its level-l(base) part."""

    base: Vertex
    tree: TruncatedTree
    vertex_ids: list[int]

    @property
    def level(self) -> int:
        return self.base[2]

    def horosphere_ids(self) -> list[int]:
        lv = self.level
        return [vid for vid in self.vertex_ids if self.tree.level(vid) == lv]

    def vertices(self) -> list[Vertex]:
        return [self.tree.verts[vid] for vid in self.vertex_ids]


def _flood(t: TruncatedTree, start: int, keep) -> list[int]:
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for u in t.adj[v]:
            if u not in seen and keep(u):
                seen.add(u)
                stack.append(u)
    return sorted(seen)


def horoball(t: TruncatedTree, x: Vertex) -> HoroballView:
    """In-ball part of the horoball of x (level of x must be positive).

    Cached per ball: the same horoballs are consulted over and over by the
    membership checks.
    """
    if x[2] == 0:
        raise LevelZeroBase(f"{x} has level 0: horoballs need positive level")
    cache = t._graph_cache.setdefault("horoballs", {})
    hit = cache.get(x)
    if hit is None:
        start = t.vid(x)
        lv = x[2]
        ids = _flood(t, start, lambda u: t.level(u) >= lv)
        hit = HoroballView(base=x, tree=t, vertex_ids=ids)
        cache[x] = hit
    return hit


def horosphere(t: TruncatedTree, x: Vertex) -> list[Vertex]:
    hb = horoball(t, x)
    return [t.verts[vid] for vid in hb.horosphere_ids()]


def in_same_horosphere(d: NagaoDatum, x: Vertex, y: Vertex) -> bool:
    """Exact symbolic test: y lies on the horosphere of x.

    After translating x to the standard position x_{i,s}, the horosphere is
    the orbit of the single-syllable words at ray s supported above i.
    """
    if x[2] != y[2] or x[2] == 0:
        return False
    if x == y:
        return True
    w, s, i = x
    y2 = T.act(d, (d.ident0, W.delta_inv(d, w)), y)
    wy, sy, _ = y2
    if sy != s or len(wy) != 1:
        return False
    ss, pay = wy[0]
    return ss == s and all(j > i for j, _ in pay)


@dataclass
class Component:
    """Connected component of the level-<=i subforest, inside a ball."""

    i: int
    anchor: Vertex
    tree: TruncatedTree
    vertex_ids: list[int]

    @property
    def key(self) -> Vertex:
        """Canonical node identity: minimal vertex address in the component."""
        return min((self.tree.verts[v] for v in self.vertex_ids),
                   key=T.address_key)

    def boundary_ids(self) -> list[int]:
        return [v for v in self.vertex_ids if self.tree.level(v) == self.i]

    def vertices(self) -> list[Vertex]:
        return [self.tree.verts[v] for v in self.vertex_ids]


def component(t: TruncatedTree, x: Vertex, i: int) -> Component:
    if x[2] > i:
        raise LevelTooHigh(f"level {x[2]} exceeds the component bound {i}")
    start = t.vid(x)
    ids = _flood(t, start, lambda u: t.level(u) <= i)
    return Component(i=i, anchor=x, tree=t, vertex_ids=ids)


@dataclass
class ComponentGraph:
    """The graph on level-<=i components visible inside a ball.

    Nodes are keyed by the minimal vertex address of the component; each
    edge stores its unique witness pair (x, y): level-i vertices on a shared
    horosphere, x in the first component, y in the second.
    """

    i: int
    tree: TruncatedTree
    components: dict[Vertex, Component]
    edges: dict[Vertex, list[Vertex]]
    edge_witness: dict[tuple[Vertex, Vertex], tuple[Vertex, Vertex]]
    comp_of_vid: dict[int, Vertex] = field(repr=False, default_factory=dict)
    _ids: dict[Vertex, int] = field(repr=False, default_factory=dict)

    def node_keys(self) -> list[Vertex]:
        return sorted(self.components, key=T.address_key)

    def node_id(self, key: Vertex) -> int:
        if not self._ids:
            self._ids = {k: n for n, k in enumerate(self.node_keys())}
        return self._ids[key]

    def component_of(self, v: Vertex) -> Component:
        key = self.comp_of_vid.get(self.tree.vid(v))
        if key is None:
            raise NotInGraph(f"{v} has level > {self.i}")
        return self.components[key]

    def witness(self, a: Vertex, b: Vertex) -> tuple[Vertex, Vertex]:
        wit = self.edge_witness.get((a, b))
        if wit is None:
            raise NotInGraph(f"components {a} and {b} are not adjacent")
        return wit

    def geodesic(self, a: Vertex, b: Vertex) -> list[Vertex]:
        """Unique geodesic between two nodes, by BFS over visible edges."""
        if a not in self.components or b not in self.components:
            raise NotInGraph("both endpoints must be nodes of the graph")
        if a == b:
            return [a]
        prev = {a: None}
        queue = [a]
        while queue:
            nxt = []
            for x in queue:
                for y in self.edges[x]:
                    if y not in prev:
                        prev[y] = x
                        if y == b:
                            path = [y]
                            while prev[path[-1]] is not None:
                                path.append(prev[path[-1]])
                            return list(reversed(path))
                        nxt.append(y)
            queue = nxt
        raise NotInGraph(f"no in-ball path between {a} and {b}")


def component_graph(t: TruncatedTree, i: int) -> ComponentGraph:
    """All level-<=i components meeting the ball, with horosphere edges."""
    if i < 1:
        raise LevelTooHigh("component graphs need a level bound i >= 1")
    cache = t._graph_cache
    if i in cache:
        return cache[i]
    comp_of_vid: dict[int, Vertex] = {}
    components: dict[Vertex, Component] = {}
    for vid in range(t.n):
        if t.level(vid) <= i and vid not in comp_of_vid:
            comp = component(t, t.verts[vid], i)
            key = comp.key
            comp.anchor = key
            components[key] = comp
            for u in comp.vertex_ids:
                comp_of_vid[u] = key
    edges: dict[Vertex, list[Vertex]] = {key: [] for key in components}
    witness: dict[tuple[Vertex, Vertex], tuple[Vertex, Vertex]] = {}
    seen_hb = set()
    for vid in range(t.n):
        if t.level(vid) != i or vid in seen_hb:
            continue
        hb_ids = _flood(t, vid, lambda u: t.level(u) >= i)
        sphere = [u for u in hb_ids if t.level(u) == i]
        seen_hb.update(sphere)
        for a_pos in range(len(sphere)):
            for b_pos in range(a_pos + 1, len(sphere)):
                xa, xb = sphere[a_pos], sphere[b_pos]
                ka, kb = comp_of_vid[xa], comp_of_vid[xb]
                # distinct components, seen at most once: anything else would
                # close a cycle in the tree
                assert ka != kb and (ka, kb) not in witness
                witness[(ka, kb)] = (t.verts[xa], t.verts[xb])
                witness[(kb, ka)] = (t.verts[xb], t.verts[xa])
                edges[ka].append(kb)
                edges[kb].append(ka)
    for key in edges:
        edges[key].sort(key=T.address_key)
    g = ComponentGraph(i=i, tree=t, components=components, edges=edges,
                       edge_witness=witness, comp_of_vid=comp_of_vid)
    cache[i] = g
    return g
