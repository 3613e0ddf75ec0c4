"""Level-preserving extension machinery and commensurator probes.

The central construction extends a level-preserving isomorphism between two
components of the level-<=i forest to a level-preserving automorphism of the
whole truncation: horoballs hanging off the source component are moved by
the canonical vertex transporters, neighboring components by conjugated
component transporters, and the definition propagates outward along the
component graph.  The result is the unique extension satisfying the two
membership conditions that define the level-i automorphism group (horoball
restriction, transporter conjugation).

Probes (homomorphism, commensuration) evaluate group-theoretic identities
pointwise on the truncation and report exactly what was checked; they are
sample-based evidence, not certificates.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Optional

from . import horo as H
from . import transport as TR
from . import tree as T
from . import words as W
from .datum import NagaoDatum
from .errors import (CannotExtendInTruncation, CannotTransportInTruncation,
                     NotInGraph, NotIsomorphism, NotLevelPreserving,
                     TruncationExceeded, TypeMismatch)
from .tree import TruncatedTree, Vertex
from .words import Gamma, Word


class TreeMap:
    """A partial injective map between vertex sets of the tree.

    The finite graph of the map is stored explicitly; when the map is the
    restriction of a known group element, that element is kept as a backing
    so the map can be evaluated anywhere.  Domain vertices are addressed
    symbolically, so images may lie outside any particular ball.
    """

    def __init__(self, datum: NagaoDatum, pairs: dict[Vertex, Vertex],
                 backing: Optional[Gamma] = None):
        self.datum = datum
        self.pairs = pairs
        self.backing = backing
        self._inverse: Optional[dict[Vertex, Vertex]] = None

    @classmethod
    def from_element(cls, t: TruncatedTree, g: Gamma) -> "TreeMap":
        d = t.datum
        return cls(d, {v: T.act(d, g, v) for v in t.verts}, backing=g)

    @classmethod
    def identity(cls, t: TruncatedTree) -> "TreeMap":
        return cls.from_element(t, W.gamma_identity(t.datum))

    @classmethod
    def from_pairs(cls, d: NagaoDatum, pairs) -> "TreeMap":
        return cls(d, dict(pairs))

    def __len__(self) -> int:
        return len(self.pairs)

    def apply(self, v: Vertex) -> Optional[Vertex]:
        img = self.pairs.get(v)
        if img is None and self.backing is not None:
            img = T.act(self.datum, self.backing, v)
        return img

    def inverse_apply(self, v: Vertex) -> Optional[Vertex]:
        if self._inverse is None:
            self._inverse = {img: src for src, img in self.pairs.items()}
        img = self._inverse.get(v)
        if img is None and self.backing is not None:
            img = T.act(self.datum, W.gamma_inv(self.datum, self.backing), v)
        return img

    def domain(self) -> list[Vertex]:
        return sorted(self.pairs, key=T.address_key)

    def is_level_preserving(self) -> bool:
        return all(v[2] == img[2] for v, img in self.pairs.items())

    def is_type_preserving(self) -> bool:
        return all(v[2] % 2 == img[2] % 2 for v, img in self.pairs.items())

    def restricted(self, vertices) -> "TreeMap":
        return TreeMap(self.datum,
                       {v: self.pairs[v] for v in vertices if v in self.pairs},
                       backing=self.backing)

    def compose(self, inner: "TreeMap") -> "TreeMap":
        """self o inner, on the domain where the chain is defined."""
        out = {}
        for v, mid in inner.pairs.items():
            img = self.apply(mid)
            if img is not None:
                out[v] = img
        backing = None
        if self.backing is not None and inner.backing is not None:
            backing = W.gamma_mul(self.datum, self.backing, inner.backing)
        return TreeMap(self.datum, out, backing=backing)

    def inverted(self) -> "TreeMap":
        backing = None
        if self.backing is not None:
            backing = W.gamma_inv(self.datum, self.backing)
        return TreeMap(self.datum, {img: v for v, img in self.pairs.items()},
                       backing=backing)

    def agrees_with(self, other: "TreeMap", on=None) -> bool:
        vs = on if on is not None else self.pairs.keys()
        for v in vs:
            a, b = self.apply(v), other.apply(v)
            if a is None or b is None or a != b:
                return False
        return True

    def to_json(self) -> dict:
        from .serialize import vertex_to_json
        return {
            "level_preserving": self.is_level_preserving(),
            "type_preserving": self.is_type_preserving(),
            "pairs": [[vertex_to_json(v), vertex_to_json(img)]
                      for v, img in sorted(self.pairs.items(),
                                           key=lambda p: T.address_key(p[0]))],
        }


def _check_partial_iso(d: NagaoDatum, pairs: dict[Vertex, Vertex],
                       require_levels: bool) -> None:
    """Validate a map between subtrees: injective, connected domain,
    adjacency-preserving, and level-preserving when required."""
    if not pairs:
        raise NotIsomorphism("empty map")
    images = set(pairs.values())
    if len(images) != len(pairs):
        raise NotIsomorphism("map is not injective")
    if require_levels:
        for v, img in pairs.items():
            if v[2] != img[2]:
                raise NotLevelPreserving(f"{v} (level {v[2]}) -> {img} (level {img[2]})")
    dom = set(pairs)
    # connectivity and adjacency preservation in one sweep
    root = next(iter(sorted(dom, key=T.address_key)))
    seen = {root}
    stack = [root]
    while stack:
        v = stack.pop()
        img_nbrs = set(T.neighbors(d, pairs[v]))
        for u in T.neighbors(d, v):
            if u in dom:
                if pairs[u] not in img_nbrs:
                    raise NotIsomorphism(f"edge {v}~{u} not preserved")
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
    if seen != dom:
        raise NotIsomorphism("domain is not a connected subtree")


def greedy_extend(t: TruncatedTree, psi: TreeMap,
                  level_bound: Optional[int] = None) -> TreeMap:
    """Extend a level-preserving isomorphism between subtrees to the ball.

    Frontier vertices are matched level-compatibly in canonical address
    order, so the output is a function of (datum, input, ball) only.  The
    images may leave the ball: the result is the restriction to the ball of
    a level-preserving automorphism of the tree.  With a level bound, just
    the in-ball part of the level-<=bound component of the domain is covered
    and all matching stays below the bound.
    """
    d = t.datum
    _check_partial_iso(d, psi.pairs, require_levels=True)
    match: dict[Vertex, Vertex] = dict(psi.pairs)
    used = set(match.values())
    for v in match:
        if v not in t:
            raise CannotExtendInTruncation(f"domain vertex {v} outside the ball")

    def wanted(v: Vertex) -> bool:
        if level_bound is not None and v[2] > level_bound:
            return False
        return v in t

    heap = [(T.address_key(v), v) for v in match if wanted(v)]
    heapq.heapify(heap)
    queued = {v for _, v in heap}
    while heap:
        _, v = heapq.heappop(heap)
        img = match[v]
        v_nbrs = [u for u in T.neighbors(d, v)
                  if level_bound is None or u[2] <= level_bound]
        img_nbrs = [u for u in T.neighbors(d, img)
                    if level_bound is None or u[2] <= level_bound]
        by_level: dict[int, list[Vertex]] = {}
        for u in img_nbrs:
            if u not in used:
                by_level.setdefault(u[2], []).append(u)
        for us in by_level.values():
            us.sort(key=T.address_key)
        for u in sorted((u for u in v_nbrs if u not in match), key=T.address_key):
            partners = by_level.get(u[2])
            if not partners:
                raise CannotExtendInTruncation(
                    f"no level-{u[2]} partner for {u} at frontier of {v}")
            w = partners.pop(0)
            match[u] = w
            used.add(w)
            if wanted(u) and u not in queued:
                heapq.heappush(heap, (T.address_key(u), u))
                queued.add(u)
    return TreeMap(d, match)


@dataclass
class ConditionStats:
    checked: int = 0
    skipped: int = 0
    failures: list[dict] = field(default_factory=list)
    instances: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        out = {"checked": self.checked, "skipped": self.skipped,
               "failures": self.failures[:10]}
        if self.instances:
            out["instances"] = self.instances
        return out


@dataclass
class LiCertificate:
    """Evidence that a map satisfies the two level-i membership conditions
    on every instance visible inside the truncation."""

    i: int
    truncation: int
    level_preserving: bool
    condition_a: ConditionStats
    condition_b: ConditionStats

    @property
    def valid(self) -> bool:
        return (self.level_preserving and self.condition_a.ok
                and self.condition_b.ok and self.condition_a.checked > 0)

    def first_violation(self) -> Optional[dict]:
        if not self.level_preserving:
            return {"condition": "level", "witness": None}
        for name, cond in (("a", self.condition_a), ("b", self.condition_b)):
            if cond.failures:
                return {"condition": name, "witness": cond.failures[0]}
        return None

    def to_json(self) -> dict:
        return {
            "i": self.i,
            "truncation": self.truncation,
            "valid": self.valid,
            "condition_a": self.condition_a.to_json(),
            "condition_b": self.condition_b.to_json(),
        }


def check_Li(t: TruncatedTree, h: TreeMap, i: int,
             record_instances: bool = False) -> LiCertificate:
    """Evaluate the two membership conditions for the level-i group.

    (a) on the horoball of every in-ball level-i vertex x, h agrees with the
        canonical transporter moving x to h(x);
    (b) conjugating the component transporter from the base component X0 to
        any component Y by h agrees, on h(X0), with the transporter between
        the image components.

    Instances whose data leave the truncation are counted as skipped, never
    silently passed.
    """
    d = t.datum
    lp = all(v[2] == img[2] for v, img in h.pairs.items())
    ca = ConditionStats()
    cb = ConditionStats()
    cert = LiCertificate(i=i, truncation=t.radius, level_preserving=lp,
                         condition_a=ca, condition_b=cb)
    if not lp:
        return cert

    # condition (a): horoball restrictions
    level_i = [vid for vid in range(t.n) if t.level(vid) == i]
    seen = set()
    for vid in level_i:
        if vid in seen:
            continue
        hb = H.horoball(t, t.verts[vid])
        sphere = hb.horosphere_ids()
        seen.update(sphere)
        for x_vid in sphere:
            x = t.verts[x_vid]
            y = h.apply(x)
            if y is None:
                ca.skipped += 1
                continue
            g = TR.gamma_xy(d, x, y)
            mismatch = None
            checked = 0
            for u_vid in hb.vertex_ids:
                u = t.verts[u_vid]
                img = h.apply(u)
                if img is None:
                    continue
                checked += 1
                expect = T.act(d, g, u)
                if img != expect:
                    mismatch = {"x": str(x), "u": str(u), "h(u)": str(img),
                                "gamma(u)": str(expect)}
                    break
            if checked == 0:
                ca.skipped += 1
            else:
                ca.checked += 1
                if record_instances:
                    ca.instances.append({"x": str(x), "h(x)": str(y),
                                         "points": checked})
                if mismatch:
                    ca.failures.append(mismatch)
                    return cert

    # condition (b): transporter conjugation against the fixed base component
    graph = H.component_graph(t, i)
    base = T.base_vertex()
    x0_key = graph.comp_of_vid.get(t.index.get(base, -1))
    if x0_key is None:
        cb.skipped += 1
        return cert
    X0 = graph.components[x0_key]
    hX0 = h.apply(x0_key)
    hX0_key = graph.comp_of_vid.get(t.index.get(hX0, -1)) if hX0 else None
    for y_key in graph.node_keys():
        hY = h.apply(y_key)
        hY_key = graph.comp_of_vid.get(t.index.get(hY, -1)) if hY else None
        if hX0_key is None or hY_key is None:
            cb.skipped += 1
            continue
        tau = TR.tau_XY(d, graph, x0_key, y_key)
        try:
            tau_img = TR.tau_XY(d, graph, hX0_key, hY_key)
        except NotInGraph:
            # image components exist but their connecting path is invisible
            cb.skipped += 1
            continue
        checked = 0
        mismatch = None
        for v in X0.vertices():
            w = h.apply(v)
            if w is None:
                continue
            mid = T.act_word(d, tau, v)
            lhs = h.apply(mid)
            if lhs is None:
                continue
            rhs = T.act_word(d, tau_img, w)
            checked += 1
            if lhs != rhs:
                mismatch = {"Y": str(y_key), "v": str(v),
                            "h(tau(v))": str(lhs), "tau'(h(v))": str(rhs)}
                break
        if checked == 0:
            cb.skipped += 1
        else:
            cb.checked += 1
            if record_instances:
                cb.instances.append({"Y": str(y_key), "points": checked})
            if mismatch:
                cb.failures.append(mismatch)
                return cert
    return cert


def extend_E(t: TruncatedTree, h: TreeMap, i: int, reverse_bfs: bool = False,
             lenient: bool = False) -> TreeMap:
    """The unique extension of a component isomorphism to the truncation.

    h must be a level-preserving isomorphism defined on (the in-ball part
    of) a component X of the level-<=i forest.  The output agrees with h on
    X, acts on each horoball of X by the canonical vertex transporter, and
    propagates to the other components along the component graph by
    conjugated component transporters.  Deterministic: the BFS order over
    components is canonical (or its reverse, which must give the same map).
    """
    d = t.datum
    _check_partial_iso(d, h.pairs, require_levels=True)
    graph = H.component_graph(t, i)
    anchor = next(iter(sorted(h.pairs, key=T.address_key)))
    if anchor[2] > i:
        raise NotLevelPreserving(f"domain vertex {anchor} has level > {i}")
    x_key = graph.comp_of_vid[t.vid(anchor)]
    X = graph.components[x_key]

    result: dict[Vertex, Vertex] = {}
    for vid in X.vertex_ids:
        v = t.verts[vid]
        img = h.apply(v)
        if img is None:
            if not lenient:
                raise CannotExtendInTruncation(
                    f"input map not defined on component vertex {v}")
            continue
        result[v] = img

    # per-component evaluators: g_Z = post . h . pre with pre, post in Delta
    evaluators: dict[Vertex, tuple[Word, Word]] = {x_key: (W.EMPTY, W.EMPTY)}

    def evaluate(key: Vertex, v: Vertex) -> Optional[Vertex]:
        pre, post = evaluators[key]
        arg = T.act_word(d, pre, v)
        mid = h.apply(arg)
        if mid is None:
            if lenient:
                return None
            raise TruncationExceeded(
                f"propagation needs {arg}, outside the input domain")
        return T.act_word(d, post, mid)

    pending = [x_key]
    visited = {x_key}
    hb_done = set()
    while pending:
        if reverse_bfs:
            key = max(pending, key=T.address_key)
        else:
            key = min(pending, key=T.address_key)
        pending.remove(key)
        Z = graph.components[key]
        # ensure the component itself is mapped; where an image already
        # exists (the entry vertex, set from the horoball side) the two
        # definitions have to agree
        for vid in Z.vertex_ids:
            v = t.verts[vid]
            img = evaluate(key, v)
            if img is None:
                continue
            prev = result.get(v)
            if prev is None:
                result[v] = img
            elif prev != img:
                raise NotIsomorphism(
                    f"horoball and component definitions disagree at {v}")
        # horoballs at the component's level-i vertices
        for x_vid in Z.boundary_ids():
            if x_vid in hb_done:
                continue
            x = t.verts[x_vid]
            y = result.get(x)
            if y is None:
                continue
            g = TR.gamma_xy(d, x, y)
            hb = H.horoball(t, x)
            hb_done.update(hb.horosphere_ids())
            for u_vid in hb.vertex_ids:
                u = t.verts[u_vid]
                img = T.act(d, g, u)
                prev = result.get(u)
                if prev is None:
                    result[u] = img
                elif prev != img:
                    raise NotIsomorphism(
                        f"inconsistent horoball propagation at {u}")
            # neighboring components through the shared horosphere
            for z_vid in hb.horosphere_ids():
                z = t.verts[z_vid]
                z_key = graph.comp_of_vid[z_vid]
                if z_key in visited:
                    continue
                zp = result.get(z)
                if zp is None:
                    continue
                pre, post = evaluators[key]
                d_zx = TR.delta_xy(d, z, x)
                d_yzp = TR.delta_xy(d, y, zp)
                evaluators[z_key] = (W.delta_mul(d, pre, d_zx),
                                     W.delta_mul(d, d_yzp, post))
                visited.add(z_key)
                pending.append(z_key)

    uncovered = [v for v in t.verts if v not in result]
    if uncovered and not lenient:
        raise TruncationExceeded(
            f"{len(uncovered)} ball vertices not reached, e.g. {uncovered[0]}")
    return TreeMap(d, result)


@dataclass
class ProbeReport:
    name: str
    entries: list[dict] = field(default_factory=list)
    note: str = ""

    @property
    def passed(self) -> bool:
        """No failures and at least one verified entry (None = skipped)."""
        oks = [e.get("ok") for e in self.entries]
        return all(ok is not False for ok in oks) and any(ok is True for ok in oks)

    def to_json(self) -> dict:
        return {"probe": self.name, "passed": self.passed, "note": self.note,
                "entries": self.entries}


def homomorphism_probe(t: TruncatedTree, g: TreeMap, h: TreeMap,
                       i: int) -> ProbeReport:
    """Compare E(g o h) with E(g) o E(h) pointwise.

    Both sides are evaluated on the ball interior wherever the composition
    chains are defined; points with data outside the truncation are counted
    as skipped.
    """
    gh = g.compose(h)
    Eg = extend_E(t, g, i, lenient=True)
    Eh = extend_E(t, h, i, lenient=True)
    Egh = extend_E(t, gh, i, lenient=True)
    checked = skipped = 0
    failures = []
    for vid in t.interior_ids():
        v = t.verts[vid]
        lhs = Egh.apply(v)
        mid = Eh.apply(v)
        rhs = Eg.apply(mid) if mid is not None else None
        if lhs is None or rhs is None:
            skipped += 1
            continue
        checked += 1
        if lhs != rhs:
            failures.append({"v": str(v), "E(gh)": str(lhs), "E(g)E(h)": str(rhs)})
    entry = {"ok": not failures and checked > 0, "checked": checked,
             "skipped": skipped, "failures": failures[:5]}
    return ProbeReport(name="homomorphism", entries=[entry])


def _delta_i_words(d: NagaoDatum, i: int, max_len: int) -> list[Word]:
    return W.enumerate_words(d, max_len, list(range(1, i + 1)))


def commensuration_probe(t: TruncatedTree, Eg: TreeMap, samples: list[Word],
                         i: int, search_bound: int = 6,
                         fallback_len: int = 2) -> ProbeReport:
    """Per-sample commensuration evidence for the extension Eg.

    For each sampled word delta, the probe finds a coset shift delta_j in
    the level-<=i lattice such that Eg^-1 (delta_j^-1 delta) Eg agrees on
    the visible ball with the action of an explicitly produced word delta'.
    The canonical candidate for delta_j is tau * delta, where tau transports
    the component delta.Y_i back to Y_i (this mirrors the membership
    argument); a few short fallback shifts are tried after it.  Success is
    per sample; nothing here certifies finite index.
    """
    d = t.datum
    graph = H.component_graph(t, i)
    base = T.base_vertex()
    y_key = graph.comp_of_vid[t.vid(base)]
    entries = []
    fallbacks = _delta_i_words(d, i, fallback_len)
    for delta in samples:
        entry = {"sample": W.word_to_json(delta), "ok": False}
        img = T.act_word(d, delta, base)
        if img not in t:
            entry["ok"] = None
            entry["skip"] = "sample moves the base vertex out of the ball"
            entries.append(entry)
            continue
        z_key = graph.comp_of_vid[t.vid(img)]
        tau = TR.tau_XY(d, graph, z_key, y_key)
        w_pre = W.delta_mul(d, tau, delta)
        candidates = [w_pre]
        for sigma in fallbacks:
            cand = W.delta_mul(d, w_pre, W.delta_inv(d, sigma))
            if cand not in candidates:
                candidates.append(cand)
        found = None
        for delta_j in candidates:
            m = W.delta_mul(d, W.delta_inv(d, delta_j), delta)
            res = _match_conjugate_to_word(t, Eg, m, search_bound)
            if res is not None:
                found = {"delta_j": W.word_to_json(delta_j),
                         "witness": W.word_to_json(res[0]),
                         "witness_length": len(res[0]),
                         "checked": res[1], "skipped": res[2],
                         "bound": search_bound}
                break
        if found:
            entry.update(found)
            entry["ok"] = True
        entries.append(entry)
    return ProbeReport(
        name="commensuration", entries=entries,
        note=("sample-verified on the truncation only; finite-index "
              "membership is not certified"))


def _match_conjugate_to_word(t: TruncatedTree, Eg: TreeMap, m: Word,
                             bound: int):
    """Find delta' with Eg^-1 . m . Eg = act(delta') on the visible ball.

    The candidate is forced: the free product acts simply transitively on
    level-0 vertices, so delta' is the quotient of the address words of any
    level-0 vertex and its image under the conjugated map.  The first
    level-0 vertex whose evaluation chain stays visible supplies the
    candidate; the match is then verified pointwise everywhere computable.
    Returns (word, checked, skipped) or None.
    """
    d = t.datum

    def chain(v: Vertex):
        a = Eg.apply(v)
        if a is None:
            return None
        b = T.act_word(d, m, a)
        return Eg.inverse_apply(b)

    delta_prime = None
    for vid in range(t.n):
        v = t.verts[vid]
        if v[2] != 0:
            continue
        c = chain(v)
        if c is None:
            continue
        # c = delta' * v as words on the simply transitive level-0 orbit
        delta_prime = W.delta_mul(d, c[0], W.delta_inv(d, v[0]))
        break
    if delta_prime is None or len(delta_prime) > bound:
        return None
    checked = skipped = 0
    for vid in t.interior_ids():
        v = t.verts[vid]
        lhs = chain(v)
        if lhs is None:
            skipped += 1
            continue
        if lhs != T.act_word(d, delta_prime, v):
            return None
        checked += 1
    if checked == 0:
        return None
    return delta_prime, checked, skipped


def select_truncation_level(d: NagaoDatum, t: TruncatedTree,
                            vertices) -> int:
    """The level bound used by the density pipeline.

    Biregular data: any bound >= 2 makes the bounded piece non-biregular, so
    start at 2.  Otherwise take l + 3 for the first defect q_l != q_{l+2}.
    Either way the bound grows until the given vertices sit inside the
    bounded component of the base vertex (checked on the truncation).
    """
    prof = d.profile
    if prof.biregular:
        i = 2
    else:
        defect = prof.first_period_two_defect()
        i = defect + 3
    base = T.base_vertex()
    needed = 0
    for v in vertices:
        path = T.geodesic(t, base, v)
        needed = max(needed, max(u[2] for u in path))
    return max(i, needed)


@dataclass
class PipelineReport:
    selected_i: int
    truncation: int
    certificate: LiCertificate
    commensuration: ProbeReport
    note: str = ("commensuration is sample-verified on the truncation, "
                 "not certified")

    @property
    def passed(self) -> bool:
        return self.certificate.valid and self.commensuration.passed

    def to_json(self) -> dict:
        return {
            "selected_i": self.selected_i,
            "truncation": self.truncation,
            "passed": self.passed,
            "certificate": self.certificate.to_json(),
            "commensuration": self.commensuration.to_json(),
            "note": self.note,
        }


def density_pipeline(d: NagaoDatum, phi: TreeMap, radius: int,
                     n_samples: int = 8, seed: int = 0, search_bound: int = 6,
                     record_instances: bool = False) -> tuple[TreeMap, PipelineReport]:
    """Extend a level-preserving isomorphism between finite subtrees to a
    level-preserving automorphism of the truncation, with evidence.

    Steps: pick the level bound i (non-biregular bounded piece containing
    domain and image), greedily extend inside it, extend to the whole ball
    by the unique component-wise construction, then check membership and
    run the commensuration probe on seeded samples.
    """
    import random

    t = T.ball(d, T.base_vertex(), radius)
    _check_partial_iso(d, phi.pairs, require_levels=True)
    touched = list(phi.pairs) + list(phi.pairs.values())
    for v in touched:
        if v not in t:
            raise CannotExtendInTruncation(f"{v} is outside the radius-{radius} ball")
    i = select_truncation_level(d, t, touched)
    g = greedy_extend(t, phi, level_bound=i)
    Eg = extend_E(t, g, i)
    cert = check_Li(t, Eg, i, record_instances=record_instances)
    rng = random.Random(seed)
    pool = [w for w in W.enumerate_words(d, 2, list(range(1, i + 2)))
            if w and T.act_word(d, w, T.base_vertex()) in t]
    samples = [pool[rng.randrange(len(pool))] for _ in range(n_samples)] if pool else []
    comm = commensuration_probe(t, Eg, samples, i, search_bound=search_bound)
    report = PipelineReport(selected_i=i, truncation=radius, certificate=cert,
                            commensuration=comm)
    return Eg, report


# -- type-preserving extension (biregular case) -------------------------------


class _TypeGreedy:
    """Symbolic type-preserving greedy matching for biregular data.

    Grows a partial isomorphism layer by layer from seed pairs; in a
    biregular tree the per-type degrees agree, so every frontier can always
    be matched.  Purely symbolic: no ball is consulted.
    """

    def __init__(self, d: NagaoDatum, seeds: dict[Vertex, Vertex],
                 max_layers: int):
        self.d = d
        self.match = dict(seeds)
        self.used = set(self.match.values())
        self.frontier = sorted(self.match, key=T.address_key)
        self.layers_left = max_layers
        for v, img in seeds.items():
            if v[2] % 2 != img[2] % 2:
                raise TypeMismatch(f"seed {v} -> {img} changes the type")

    def _expand_layer(self) -> None:
        if self.layers_left <= 0:
            raise CannotTransportInTruncation(
                "type-preserving transport exceeded its growth budget")
        self.layers_left -= 1
        d = self.d
        new_frontier = []
        for v in self.frontier:
            img = self.match[v]
            partners = sorted((u for u in T.neighbors(d, img)
                               if u not in self.used), key=T.address_key)
            todo = sorted((u for u in T.neighbors(d, v)
                           if u not in self.match), key=T.address_key)
            if len(todo) > len(partners):
                raise CannotTransportInTruncation(
                    f"degree mismatch while matching around {v}")
            for u, w in zip(todo, partners):
                self.match[u] = w
                self.used.add(w)
                new_frontier.append(u)
        self.frontier = new_frontier

    def ensure_domain(self, vertices) -> None:
        while any(v not in self.match for v in vertices):
            self._expand_layer()

    def ensure_image(self, vertices) -> None:
        while any(v not in self.used for v in vertices):
            self._expand_layer()

    def apply(self, v: Vertex) -> Vertex:
        self.ensure_domain([v])
        return self.match[v]

    def inverse_apply(self, v: Vertex) -> Vertex:
        self.ensure_image([v])
        for src, img in self.match.items():
            if img == v:
                return src
        raise CannotTransportInTruncation(f"{v} not in the transported image")


def _ball_center(d: NagaoDatum, vertices: set[Vertex]) -> tuple[Vertex, int]:
    """Center and radius of a vertex set that should be a ball B_s(z)."""
    ecc = {}
    for v in vertices:
        # BFS inside the set
        depth = {v: 0}
        frontier = [v]
        while frontier:
            nxt = []
            for u in frontier:
                for w in T.neighbors(d, u):
                    if w in vertices and w not in depth:
                        depth[w] = depth[u] + 1
                        nxt.append(w)
            frontier = nxt
        if len(depth) != len(vertices):
            raise NotIsomorphism("vertex set is not connected")
        ecc[v] = max(depth.values())
    center = min(ecc, key=lambda v: (ecc[v], T.address_key(v)))
    s = ecc[center]
    # must be exactly the radius-s ball around the center
    expect = {center}
    frontier = [center]
    for _ in range(s):
        nxt = []
        for u in frontier:
            for w in T.neighbors(d, u):
                if w not in expect:
                    expect.add(w)
                    nxt.append(w)
        frontier = nxt
    if expect != vertices:
        raise NotIsomorphism("domain is not a full ball around its center")
    return center, s


def extend_type_preserving(t: TruncatedTree, phi: TreeMap) -> TreeMap:
    """Extend a type-preserving isomorphism between same-type balls.

    Biregular trees only (otherwise levels are forced by degrees and the
    level-preserving machinery applies: the input is delegated).  Both balls
    are transported onto a deep segment of the standard ray by type-greedy
    maps; the conjugated map fixes two adjacent ray vertices, hence
    preserves levels, and extends greedily; conjugating back extends phi.
    """
    d = t.datum
    if not T.is_biregular(d):
        return greedy_extend(t, phi)
    _check_partial_iso(d, phi.pairs, require_levels=False)
    for v, img in phi.pairs.items():
        if v[2] % 2 != img[2] % 2:
            raise TypeMismatch(f"{v} -> {img} changes the vertex type")
    z1, s1 = _ball_center(d, set(phi.pairs))
    z2, s2 = _ball_center(d, set(phi.pairs.values()))
    if s1 != s2:
        raise NotIsomorphism("domain and image balls have different radii")
    if z1[2] % 2 != z2[2] % 2:
        raise TypeMismatch(f"centers {z1} and {z2} have different types")
    s = max(s1, 1)
    if s1 == 0:
        # upgrade the single pair with one matched neighbor, canonically
        u1 = min(T.neighbors(d, z1), key=T.address_key)
        u2 = min(T.neighbors(d, z2), key=T.address_key)
        phi = TreeMap(d, {**phi.pairs, u1: u2})

    def dist_in(dom, a, b):
        depth = {a: 0}
        frontier = [a]
        while frontier:
            nxt = []
            for u in frontier:
                for w in T.neighbors(d, u):
                    if w in dom and w not in depth:
                        depth[w] = depth[u] + 1
                        nxt.append(w)
            frontier = nxt
        return depth[b]

    # terminal vertex of the domain ball, canonically chosen
    dom = set(phi.pairs)
    v1 = max(dom, key=lambda v: (dist_in(dom, z1, v), T.address_key(v)))
    u1 = next(u for u in T.neighbors(d, v1) if u in dom)
    v2 = phi.pairs[v1]
    u2 = phi.pairs[u1]
    n = 2 * s if (2 * s) % 2 == v1[2] % 2 else 2 * s + 1
    if n + 2 * s + 1 > t.radius:
        raise CannotTransportInTruncation(
            f"need radius >= {n + 2 * s + 1} to transport radius-{s} balls")
    xn = T.ray_vertex(n)
    xn1 = T.ray_vertex(n - 1)
    budget = 4 * (t.radius + 1)
    f1 = _TypeGreedy(d, {v1: xn, u1: xn1}, budget)
    f2 = _TypeGreedy(d, {v2: xn, u2: xn1}, budget)
    f1.ensure_domain(dom)
    f2.ensure_domain(set(phi.pairs.values()))
    psi_pairs = {}
    for v in dom:
        psi_pairs[f1.match[v]] = f2.match[phi.pairs[v]]
    for v, img in psi_pairs.items():
        if v[2] != img[2]:
            raise NotLevelPreserving(
                f"conjugated map fails to preserve levels at {v}")
    for v in psi_pairs:
        if v not in t:
            raise CannotTransportInTruncation(
                "transported ball leaves the truncation")
    g = greedy_extend(t, TreeMap(d, psi_pairs))
    # conjugate back on a neighborhood of the original domain
    m = t.radius - n - s
    if m < s:
        raise CannotTransportInTruncation(
            f"radius {t.radius} leaves no room to conjugate back")
    out = {}
    # BFS distances from the domain center, inside the ball
    from_z1 = {t.vid(z1): 0}
    frontier = [t.vid(z1)]
    while frontier:
        nxt = []
        for a_vid in frontier:
            for b_vid in t.adj[a_vid]:
                if b_vid not in from_z1:
                    from_z1[b_vid] = from_z1[a_vid] + 1
                    nxt.append(b_vid)
        frontier = nxt
    for vid, dz in from_z1.items():
        if dz > m:
            continue
        v = t.verts[vid]
        a = f1.apply(v)
        b = g.apply(a)
        if b is None:
            continue
        out[v] = f2.inverse_apply(b)
    result = TreeMap(d, out)
    for v, img in phi.pairs.items():
        if result.apply(v) != img:
            raise NotIsomorphism("extension does not restrict to the input")
    return result
