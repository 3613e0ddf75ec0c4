"""Named invariant suites over a datum, shared by the CLI and the tests.

Each suite returns a SuiteReport with one entry per failed instance;
reports are deterministic functions of (datum, radius, seed).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import extension as E
from . import horo as H
from . import transport as TR
from . import tree as T
from . import twincodist as TC
from . import words as W
from .datum import NagaoDatum

SUITE_NAMES = ("degrees", "transitivity", "horoball", "transport", "li", "codist")


@dataclass
class SuiteReport:
    suite: str
    checked: int = 0
    failures: list[dict] = field(default_factory=list)
    info: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures and self.checked > 0

    def to_json(self) -> dict:
        return {"suite": self.suite, "checked": self.checked,
                "passed": self.passed, "failures": self.failures[:20],
                "info": self.info}


def suite_degrees(d: NagaoDatum, radius: int) -> SuiteReport:
    """Every interior vertex has degree k at level 0 and q_i + 1 above."""
    rep = SuiteReport("degrees")
    t = T.ball(d, T.base_vertex(), radius)
    for vid in t.interior_ids():
        lv = t.level(vid)
        want = d.profile.degree(lv)
        got = t.degree(vid)
        rep.checked += 1
        if got != want:
            rep.failures.append({"vertex": str(t.verts[vid]), "level": lv,
                                 "degree": got, "expected": want})
    rep.info["interior"] = rep.checked
    rep.info["ball"] = t.n
    return rep


def suite_transitivity(d: NagaoDatum, radius: int, max_j: int = 3) -> SuiteReport:
    """Simple transitivity of U_i x ... x U_j on the down-sets M_{i,j}.

    M_{i,j} is the set of level-(i-1) vertices at distance j - i + 1 from
    the standard ray vertex x_j; the product of root groups between i and j
    must act on it freely and transitively.
    """
    rep = SuiteReport("transitivity")
    t = T.ball(d, T.base_vertex(), radius)
    # M_{i,j} reaches distance 2j - i + 1 from the base vertex; only spans
    # fully visible in the ball are checked
    max_j = min(max_j, radius // 2)
    rep.info["max_j"] = max_j
    for j in range(1, max_j + 1):
        xj = T.ray_vertex(j)
        for i in range(1, j + 1):
            span = j - i + 1
            m_set = {
                t.verts[vid]
                for vid in range(t.n)
                if t.level(vid) == i - 1
                and T.distance(t, t.verts[vid], xj) == span
            }
            expected = 1
            for r in range(i, j + 1):
                expected *= d.q(r)
            rep.checked += 1
            if len(m_set) != expected:
                rep.failures.append({"instance": f"M_{i},{j}", "size": len(m_set),
                                     "expected": expected})
                continue
            payloads = W.enumerate_payloads(d, list(range(i, j + 1)))
            images = []
            base = T.ray_vertex(i - 1)
            for pay in payloads:
                images.append(T.act_word(d, W.syllable_word(1, pay), base))
            rep.checked += 1
            if len(set(images)) != expected or set(images) != m_set:
                rep.failures.append({"instance": f"M_{i},{j}",
                                     "orbit": len(set(images)),
                                     "expected": expected,
                                     "free_and_transitive": False})
    return rep


def suite_horoball(d: NagaoDatum, radius: int, max_i: int = 3) -> SuiteReport:
    """Every root element at level i fixes the standard level-i horoball
    pointwise inside the ball."""
    rep = SuiteReport("horoball")
    t = T.ball(d, T.base_vertex(), radius)
    for i in range(1, max_i + 1):
        xi = T.ray_vertex(i)
        if xi not in t:
            continue
        hb = H.horoball(t, xi)
        grp = d.root(i).group
        for u in range(grp.order):
            if u == grp.identity:
                continue
            g = (d.ident0, W.generator(1, i, u))
            moved = [t.verts[vid] for vid in hb.vertex_ids
                     if T.act(d, g, t.verts[vid]) != t.verts[vid]]
            rep.checked += 1
            if moved:
                rep.failures.append({"i": i, "u": u, "moved": str(moved[0]),
                                     "count": len(moved)})
    rep.info["max_i"] = max_i
    return rep


def suite_transport(d: NagaoDatum, radius: int, levels=(1, 2),
                    samples: int = 0, seed: int = 0) -> SuiteReport:
    """Transporter calculation rules (see transport.verify_transport)."""
    rep = SuiteReport("transport")
    tr = TR.verify_transport(d, radius, levels=levels, samples=samples, seed=seed)
    rep.checked = len(tr.checks)
    rep.failures = [c.to_json() for c in tr.failures()]
    rep.info["levels"] = list(levels)
    return rep


def suite_li(d: NagaoDatum, radius: int, levels=(1, 2), word_len: int = 2,
             support: int = 3) -> SuiteReport:
    """Free-product words produce valid level-i membership certificates."""
    rep = SuiteReport("li")
    t = T.ball(d, T.base_vertex(), radius)
    pool = W.enumerate_words(d, word_len, list(range(1, support + 1)))
    for i in levels:
        for w in pool:
            cert = E.check_Li(t, E.TreeMap.from_element(t, (d.ident0, w)), i)
            rep.checked += 1
            if not cert.valid:
                rep.failures.append({"i": i, "word": W.word_to_json(w),
                                     "violation": cert.first_violation()})
    rep.info["words"] = len(pool)
    return rep


def suite_codist(d: NagaoDatum, radius: int) -> SuiteReport:
    """Synthesized codistance table passes the one-sided axioms and matches
    the BFS level of every vertex."""
    rep = SuiteReport("codist")
    t = T.ball(d, T.base_vertex(), radius)
    table = TC.synthesize_codistance(t)
    ver = TC.verify_codist(table, t)
    rep.checked += ver.checked
    rep.failures.extend(ver.failures)
    # levels equal distance to the nearest level-0 vertex, recomputed by BFS
    level0 = [vid for vid in range(t.n) if t.level(vid) == 0]
    dist0 = {vid: 0 for vid in level0}
    frontier = list(level0)
    while frontier:
        nxt = []
        for a in frontier:
            for b in t.adj[a]:
                if b not in dist0:
                    dist0[b] = dist0[a] + 1
                    nxt.append(b)
        frontier = nxt
    # the in-ball BFS distance to level 0 equals the level exactly when the
    # whole descending path stays inside the ball
    for vid in range(t.n):
        if t.dist[vid] + t.level(vid) > t.radius:
            continue
        rep.checked += 1
        if dist0.get(vid) != table.values[t.verts[vid]]:
            rep.failures.append({"vertex": str(t.verts[vid]),
                                 "bfs_level": dist0.get(vid),
                                 "table": table.values[t.verts[vid]]})
    return rep


def run_suites(d: NagaoDatum, radius: int, names=SUITE_NAMES, samples: int = 0,
               seed: int = 0, level: int = 2) -> list[SuiteReport]:
    levels = tuple(range(1, max(2, level) + 1))
    out = []
    for name in names:
        if name == "degrees":
            out.append(suite_degrees(d, radius))
        elif name == "transitivity":
            out.append(suite_transitivity(d, radius))
        elif name == "horoball":
            out.append(suite_horoball(d, radius, max_i=max(3, level)))
        elif name == "transport":
            out.append(suite_transport(d, min(radius, 5), levels=levels,
                                       samples=samples, seed=seed))
        elif name == "li":
            word_len = 2 if d.k <= 3 else 1
            support = 3 if d.k <= 3 else 2
            out.append(suite_li(d, radius, levels=levels,
                                word_len=word_len, support=support))
        elif name == "codist":
            out.append(suite_codist(d, radius))
        else:
            raise ValueError(f"unknown suite {name!r}")
    return out
