"""Transporter elements between same-level vertices and between components.

Three families, all exact group elements:

  delta_xy   the unique horosphere transporter supported above the level,
             conjugated into position for non-standard base points;
  gamma_xy   the cocycle gamma_y * gamma_x^-1 built from the canonical
             address words, moving x to y for any two same-level vertices;
  tau_XY     products of horosphere transporters along the unique geodesic
             in the component graph, moving component X onto component Y.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import horo as H
from . import tree as T
from . import words as W
from .datum import NagaoDatum
from .errors import LevelMismatch, NotSameHorosphere
from .horo import ComponentGraph
from .tree import TruncatedTree, Vertex
from .words import Gamma, Word


@dataclass(frozen=True)
class Transporter:
    """A transporter element together with what it moves where."""

    kind: str  # "delta" | "gamma" | "tau"
    value: Gamma
    source: object
    target: object

    @property
    def word(self) -> Word:
        return self.value[1]


def delta_transporter(d: NagaoDatum, x: Vertex, y: Vertex) -> Transporter:
    w = delta_xy(d, x, y)
    tp = Transporter(kind="delta", value=(d.ident0, w), source=x, target=y)
    assert T.act(d, tp.value, x) == y
    return tp


def gamma_transporter(d: NagaoDatum, x: Vertex, y: Vertex) -> Transporter:
    g = gamma_xy(d, x, y)
    tp = Transporter(kind="gamma", value=g, source=x, target=y)
    assert T.act(d, tp.value, x) == y
    return tp


def tau_transporter(d: NagaoDatum, g: ComponentGraph, a: Vertex,
                    b: Vertex) -> Transporter:
    w = tau_XY(d, g, a, b)
    tp = Transporter(kind="tau", value=(d.ident0, w), source=a, target=b)
    # the transporter carries the source component into the target one
    dst = set(g.components[b].vertices())
    for v in g.components[a].vertices():
        img = T.act(d, tp.value, v)
        assert img not in g.tree or img in dst
    return tp


def delta_xy(d: NagaoDatum, x: Vertex, y: Vertex) -> Word:
    """The unique transporter of x to y supported above level l(x).

    Requires y on the horosphere of x.  For x = x_{i,s} standard this is a
    single syllable at ray s supported at positions > i; in general it is the
    conjugate w * delta_std * w^-1 by the address word of x.
    """
    if x[2] != y[2] or x[2] == 0:
        raise NotSameHorosphere(
            f"levels {x[2]} and {y[2]} must agree and be positive")
    w, s, i = x
    if x == y:
        return W.EMPTY
    y2 = T.act_word(d, W.delta_inv(d, w), y)
    wy, sy, _ = y2
    valid = (sy == s and len(wy) == 1 and wy[0][0] == s
             and all(j > i for j, _ in wy[0][1]))
    if not valid:
        raise NotSameHorosphere(f"{y} is not on the horosphere of {x}")
    return W.delta_mul(d, W.delta_mul(d, w, wy), W.delta_inv(d, w))


def gamma_vertex(d: NagaoDatum, x: Vertex) -> Gamma:
    """The canonical element gamma_x = w_x * gamma_s moving x_i to x.

    The once-and-for-all choice of translating word is the canonical address
    word itself, so the assignment is reproducible.
    """
    w, s, i = x
    if i == 0:
        raise LevelMismatch("gamma_x is defined for positive level only")
    return W.word_times_gamma_s(d, w, s)


def gamma_xy(d: NagaoDatum, x: Vertex, y: Vertex) -> Gamma:
    """gamma_y * gamma_x^-1: moves x to y for any two same-level vertices.

    The value is canonical (it only depends on the fixed address words), so
    it is cached on the datum.
    """
    if x[2] != y[2] or x[2] == 0:
        raise LevelMismatch(f"levels {x[2]} and {y[2]} must agree and be positive")
    cache = d._caches.setdefault("gamma_xy", {})
    hit = cache.get((x, y))
    if hit is None:
        hit = W.gamma_mul(d, gamma_vertex(d, y),
                          W.gamma_inv(d, gamma_vertex(d, x)))
        if len(cache) < 100_000:
            cache[(x, y)] = hit
    return hit


def tau_edge(d: NagaoDatum, g: ComponentGraph, a: Vertex, b: Vertex) -> Word:
    """Transporter along one edge of the component graph."""
    x, y = g.witness(a, b)
    return delta_xy(d, x, y)


def tau_XY(d: NagaoDatum, g: ComponentGraph, a: Vertex, b: Vertex) -> Word:
    """Product of edge transporters along the unique geodesic from a to b."""
    path = g.geodesic(a, b)
    out = W.EMPTY
    for u, v in zip(path, path[1:]):
        out = W.delta_mul(d, tau_edge(d, g, u, v), out)
    return out


def tau_along(d: NagaoDatum, g: ComponentGraph, path: list[Vertex]) -> Word:
    """Product of edge transporters along an arbitrary node path."""
    out = W.EMPTY
    for u, v in zip(path, path[1:]):
        out = W.delta_mul(d, tau_edge(d, g, u, v), out)
    return out


# -- verification sweep -------------------------------------------------------

@dataclass
class RuleCheck:
    rule: str
    instance: str
    passed: bool
    witness: Optional[dict] = None

    def to_json(self) -> dict:
        out = {"rule": self.rule, "instance": self.instance, "pass": self.passed}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass
class TransportReport:
    checks: list[RuleCheck] = field(default_factory=list)
    truncation: int = 0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[RuleCheck]:
        return [c for c in self.checks if not c.passed]

    def add(self, rule: str, instance: str, ok: bool, witness: dict | None = None):
        self.checks.append(RuleCheck(rule, instance, ok,
                                     witness if not ok else None))

    def to_json(self) -> dict:
        per_rule: dict[str, dict] = {}
        for c in self.checks:
            slot = per_rule.setdefault(c.rule, {"checked": 0, "failed": 0})
            slot["checked"] += 1
            slot["failed"] += not c.passed
        return {
            "truncation": self.truncation,
            "passed": self.passed,
            "total": len(self.checks),
            "failed": len(self.failures()),
            "rules": per_rule,
            "failures": [c.to_json() for c in self.checks if not c.passed],
        }


def _same_level_pairs(t: TruncatedTree, i: int) -> list[tuple[Vertex, Vertex]]:
    vs = sorted((t.verts[v] for v in range(t.n) if t.level(v) == i),
                key=T.address_key)
    return [(a, b) for a in vs for b in vs]


def _hs_pairs(d: NagaoDatum, t: TruncatedTree, i: int):
    vs = sorted((t.verts[v] for v in range(t.n) if t.level(v) == i),
                key=T.address_key)
    return [(a, b) for a in vs for b in vs if H.in_same_horosphere(d, a, b)]


def verify_transport(d: NagaoDatum, radius: int, levels=(1, 2), samples: int = 0,
                     seed: int = 0) -> TransportReport:
    """Check the calculation rules of all three transporter families.

    With samples == 0 the sweep is exhaustive over the in-ball instances at
    the given levels; otherwise `samples` instances per family are drawn
    with the seeded generator.  Failures carry witnesses.
    """
    import random

    rng = random.Random(seed)
    t = T.ball(d, T.base_vertex(), radius)
    rep = TransportReport(truncation=radius)

    def sample(pool, n):
        if not pool:
            return []
        if samples == 0 or len(pool) <= n:
            return list(pool)
        return [pool[rng.randrange(len(pool))] for _ in range(n)]

    small_words = W.enumerate_words(d, 2, [1, 2])

    for i in levels:
        hs_pairs = _hs_pairs(d, t, i)
        lv_pairs = _same_level_pairs(t, i)

        # delta rules
        for x, y in sample(hs_pairs, samples):
            dl = delta_xy(d, x, y)
            rep.add("delta-moves", f"i={i} {x}->{y}",
                    T.act_word(d, dl, x) == y, {"x": str(x), "y": str(y)})
            rep.add("delta-inverse", f"i={i} {x},{y}",
                    delta_xy(d, y, x) == W.delta_inv(d, dl),
                    {"x": str(x), "y": str(y)})
        for x, y in sample(hs_pairs, max(1, samples // 4)):
            for _, z in sample([(x, z) for (x2, z) in hs_pairs if x2 == x],
                               max(1, samples // 4)):
                lhs = W.delta_mul(d, delta_xy(d, y, z), delta_xy(d, x, y))
                rep.add("delta-cocycle", f"i={i} {x},{y},{z}",
                        lhs == delta_xy(d, x, z),
                        {"x": str(x), "y": str(y), "z": str(z)})
        for x, y in sample(hs_pairs, max(1, samples // 4)):
            for h in sample(small_words, 8 if samples else 4):
                hx, hy = T.act_word(d, h, x), T.act_word(d, h, y)
                lhs = W.delta_mul(d, W.delta_mul(d, h, delta_xy(d, x, y)),
                                  W.delta_inv(d, h))
                rep.add("delta-equivariance", f"i={i} h on {x},{y}",
                        lhs == delta_xy(d, hx, hy),
                        {"h": str(h), "x": str(x), "y": str(y)})
        # equivariance under the finite vertex group: by uniqueness of the
        # high transporter, conjugating delta_{x,y} must give the
        # transporter of the image pair; this is the rule that requires the
        # root-group actions to be genuine automorphisms
        for x, y in sample(hs_pairs, max(1, samples // 4)):
            dl = (d.ident0, delta_xy(d, x, y))
            for g0 in range(d.gamma0.order):
                g = (g0, W.EMPTY)
                gx, gy = T.act(d, g, x), T.act(d, g, y)
                lhs = W.gamma_mul(d, W.gamma_mul(d, g, dl), W.gamma_inv(d, g))
                try:
                    rhs = (d.ident0, delta_xy(d, gx, gy))
                    ok = lhs == rhs
                except NotSameHorosphere:
                    ok = False
                rep.add("delta-equivariance-gamma0", f"i={i} g{g0} on {x},{y}",
                        ok, {"g0": g0, "x": str(x), "y": str(y)})

        # gamma rules
        for x, y in sample(lv_pairs, samples):
            g = gamma_xy(d, x, y)
            rep.add("gamma-moves", f"i={i} {x}->{y}",
                    T.act(d, g, x) == y, {"x": str(x), "y": str(y)})
            rep.add("gamma-inverse", f"i={i} {x},{y}",
                    gamma_xy(d, y, x) == W.gamma_inv(d, g),
                    {"x": str(x), "y": str(y)})
            if x[1] == y[1]:  # same Delta-orbit: the Gamma0 part must vanish
                rep.add("gamma-in-delta", f"i={i} {x},{y}",
                        g[0] == d.ident0, {"x": str(x), "y": str(y)})
        vs_i = sorted({a for a, _ in lv_pairs}, key=T.address_key)
        triples = [(x, y, z) for x in vs_i for y in vs_i for z in vs_i]
        for x, y, z in sample(triples, samples):
            lhs = W.gamma_mul(d, gamma_xy(d, y, z), gamma_xy(d, x, y))
            rep.add("gamma-cocycle", f"i={i} {x},{y},{z}",
                    lhs == gamma_xy(d, x, z),
                    {"x": str(x), "y": str(y), "z": str(z)})

        # cross-family rule: for same-horosphere pairs the two transporters
        # restrict identically to the horoball (membership condition (a)
        # for free-product elements); ties the conjugation-free delta
        # calculus to the Gamma0-sensitive gamma calculus
        for x, y in sample(hs_pairs, samples):
            dl = (d.ident0, delta_xy(d, x, y))
            gm = gamma_xy(d, x, y)
            hb = H.horoball(t, x)
            ok = all(T.act(d, dl, t.verts[v]) == T.act(d, gm, t.verts[v])
                     for v in hb.vertex_ids)
            rep.add("delta-gamma-restriction", f"i={i} {x},{y}", ok,
                    {"x": str(x), "y": str(y)})

        # restriction rule: gamma_{x,y} and gamma_{x',y'} agree on HB(x)
        for x, y in sample(lv_pairs, max(1, samples // 2)):
            g = gamma_xy(d, x, y)
            hb = H.horoball(t, x)
            for xp in sample([t.verts[v] for v in hb.horosphere_ids()], 4):
                yp = T.act(d, g, xp)
                gp = gamma_xy(d, xp, yp)
                ok = all(T.act(d, g, t.verts[v]) == T.act(d, gp, t.verts[v])
                         for v in hb.vertex_ids)
                rep.add("gamma-restriction", f"i={i} {x},{y} via {xp}", ok,
                        {"x": str(x), "y": str(y), "xp": str(xp)})

        # tau rules
        g_i = H.component_graph(t, i)
        keys = g_i.node_keys()
        rep.add("tau-identity", f"i={i}", tau_XY(d, g_i, keys[0], keys[0]) == W.EMPTY)
        pairs = [(a, b) for a in keys for b in keys if a != b]
        for a, b in sample(pairs, samples):
            tau = tau_XY(d, g_i, a, b)
            img = {T.act_word(d, tau, v) for v in g_i.components[a].vertices()}
            tgt = set(g_i.components[b].vertices())
            in_ball_img = {v for v in img if v in t}
            rep.add("tau-maps-onto", f"i={i} {a}->{b}",
                    in_ball_img <= tgt, {"a": str(a), "b": str(b)})
            rep.add("tau-inverse", f"i={i} {a},{b}",
                    tau_XY(d, g_i, b, a) == W.delta_inv(d, tau),
                    {"a": str(a), "b": str(b)})
        triples = [(a, b, c) for a in keys for b in keys for c in keys]
        for a, b, c in sample(triples, samples):
            lhs = W.delta_mul(d, tau_XY(d, g_i, b, c), tau_XY(d, g_i, a, b))
            rep.add("tau-cocycle", f"i={i} {a},{b},{c}",
                    lhs == tau_XY(d, g_i, a, c),
                    {"a": str(a), "b": str(b), "c": str(c)})
        # equivariance under Delta, evaluated where the images stay in view
        for a, b in sample(pairs, max(1, samples // 2)):
            for h in sample(small_words, 4):
                ha = T.act_word(d, h, a)
                hb_ = T.act_word(d, h, b)
                ka = g_i.comp_of_vid.get(t.index.get(ha, -1))
                kb = g_i.comp_of_vid.get(t.index.get(hb_, -1))
                if ka is None or kb is None:
                    continue
                lhs = W.delta_mul(d, W.delta_mul(d, h, tau_XY(d, g_i, a, b)),
                                  W.delta_inv(d, h))
                rep.add("tau-equivariance", f"i={i} h on {a},{b}",
                        lhs == tau_XY(d, g_i, ka, kb),
                        {"h": str(h), "a": str(a), "b": str(b)})
        # path independence: products over arbitrary paths match the geodesic
        for a, b in sample(pairs, max(1, samples // 2)):
            geo = g_i.geodesic(a, b)
            for path in _random_paths(g_i, a, b, rng, limit=3,
                                      maxlen=len(geo) + 3):
                rep.add("tau-path-independence", f"i={i} {a}->{b} len={len(path)}",
                        tau_along(d, g_i, path) == tau_XY(d, g_i, a, b),
                        {"a": str(a), "b": str(b), "path_len": len(path) - 1})
    return rep


def _random_paths(g: ComponentGraph, a: Vertex, b: Vertex, rng, limit: int,
                  maxlen: int) -> list[list[Vertex]]:
    """A few random walks from a that happen to reach b within maxlen."""
    out = []
    for _ in range(60):
        if len(out) >= limit:
            break
        path = [a]
        for _ in range(maxlen):
            nbrs = g.edges[path[-1]]
            if not nbrs:
                break
            path.append(nbrs[rng.randrange(len(nbrs))])
            if path[-1] == b:
                out.append(path)
                break
    return out
