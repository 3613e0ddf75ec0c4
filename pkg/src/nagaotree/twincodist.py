"""The codistance facet: the level function as a codistance from a fixed
opposite vertex, the one-sided codistance axioms on truncations, vertex
types, and the infinite star (the union of the standard rays).

Only the codistance family from the fixed negative base vertex is modeled;
the negative tree itself is never materialized.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import tree as T
from . import words as W
from .tree import TruncatedTree, Vertex


@dataclass
class CodistanceTable:
    """Codistance from the fixed negative base vertex, tabulated on a ball."""

    base_tag: str
    tree: TruncatedTree
    values: dict[Vertex, int]

    def value(self, v: Vertex) -> int:
        return self.values[v]

    def to_json(self) -> dict:
        from .serialize import vertex_to_json
        return {
            "base": self.base_tag,
            "values": [
                [vertex_to_json(v), m]
                for v, m in sorted(self.values.items(),
                                   key=lambda p: T.address_key(p[0]))
            ],
        }


def synthesize_codistance(t: TruncatedTree) -> CodistanceTable:
    """The codistance from the negative base vertex is the level function."""
    return CodistanceTable(base_tag="v-", tree=t,
                           values={v: v[2] for v in t.verts})


@dataclass
class CodistReport:
    checked: int = 0
    failures: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures and self.checked > 0

    def to_json(self) -> dict:
        return {"checked": self.checked, "passed": self.passed,
                "failures": self.failures[:10]}


def verify_codist(table: CodistanceTable, t: TruncatedTree) -> CodistReport:
    """One-sided codistance axioms at every interior vertex.

    With m the value at x: every neighbor has value m - 1 or m + 1; when
    m > 0 exactly one neighbor has value m + 1; when m = 0 all neighbors
    have value 1 (no uniqueness constraint).
    """
    rep = CodistReport()
    for vid in t.interior_ids():
        v = t.verts[vid]
        m = table.values[v]
        ups = 0
        bad = None
        for uid in t.adj[vid]:
            u = t.verts[uid]
            mu = table.values[u]
            if abs(mu - m) != 1:
                bad = {"x": str(v), "m": m, "neighbor": str(u), "value": mu,
                       "axiom": "neighbors differ by one"}
                break
            if mu == m + 1:
                ups += 1
        if bad is None and m > 0 and ups != 1:
            bad = {"x": str(v), "m": m, "ups": ups,
                   "axiom": "unique ascent for m > 0"}
        if bad is None and m == 0 and ups != len(t.adj[vid]):
            bad = {"x": str(v), "m": 0, "ups": ups,
                   "axiom": "all neighbors ascend from an opposite vertex"}
        rep.checked += 1
        if bad:
            rep.failures.append(bad)
    return rep


def infinite_star(t: TruncatedTree) -> list[Vertex]:
    """The union of the k standard rays inside the ball.

    This is the truncated fundamental domain of the free-product action:
    every ball vertex is the translate of exactly one star vertex.
    """
    d = t.datum
    out = [T.base_vertex()]
    for s in range(1, d.k + 1):
        for i in range(1, t.radius + 1):
            v = (W.EMPTY, s, i)
            if v in t:
                out.append(v)
    return out


def vertex_type(v: Vertex) -> int:
    """The parity class of a vertex (level mod 2 = distance parity)."""
    return v[2] % 2
