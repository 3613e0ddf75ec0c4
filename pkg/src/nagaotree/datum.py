"""Directly split Nagao data: the group-theoretic seed of the whole tree.

A datum consists of a finite group `gamma0`, a subgroup `h0` of index k >= 3,
and an eventually periodic schedule of root groups U_j (j >= 1), each with an
action of h0 by automorphisms.  Everything downstream (words, tree, horoballs)
is derived from this object.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import algebra
from .algebra import FiniteGroup, GroupAction, SubgroupHandle
from .errors import (BadAction, BadSchedule, IndexTooSmall, NotSubgroup,
                     RootGroupTooSmall, UnknownName)

BUILTIN_NAMES = ("D0", "D1", "D2", "D3")


@dataclass(frozen=True)
class RootData:
    """One root group U_j together with the h0-action on it."""

    group: FiniteGroup
    action: GroupAction

    @property
    def q(self) -> int:
        return self.group.order


@dataclass(frozen=True)
class LevelProfile:
    """The degree schedule q_i, with q_0 = k - 1 and q_i = |U_i| for i >= 1."""

    k: int
    q_prefix: tuple[int, ...]
    q_period: tuple[int, ...]

    def q(self, i: int) -> int:
        if i == 0:
            return self.k - 1
        j = i - 1
        if j < len(self.q_prefix):
            return self.q_prefix[j]
        return self.q_period[(j - len(self.q_prefix)) % len(self.q_period)]

    def degree(self, level: int) -> int:
        return self.k if level == 0 else self.q(level) + 1

    @property
    def biregular(self) -> bool:
        # the degree sequence is constant on each level parity class iff
        # q_i == q_{i+2} for all i; eventual periodicity bounds the check
        horizon = len(self.q_prefix) + 2 * len(self.q_period) + 3
        return all(self.q(i) == self.q(i + 2) for i in range(horizon))

    def first_period_two_defect(self) -> int | None:
        """Smallest l with q_l != q_{l+2}, or None when biregular."""
        horizon = len(self.q_prefix) + 2 * len(self.q_period) + 3
        for l in range(horizon):
            if self.q(l) != self.q(l + 2):
                return l
        return None

    def vertex_type(self, level: int) -> int:
        return level % 2


class NagaoDatum:
    """Validated directly split datum with precomputed navigation tables."""

    def __init__(self, gamma0: FiniteGroup, h0: SubgroupHandle,
                 prefix: tuple[RootData, ...], period: tuple[RootData, ...],
                 name: str = "", _validate: bool = True):
        self.gamma0 = gamma0
        self.h0 = h0
        self.prefix = prefix
        self.period = period
        self.name = name

        if _validate:
            _check_datum(gamma0, h0, prefix, period)

        self.reps = algebra.coset_reps(gamma0, h0)
        self.k = len(self.reps)
        if _validate and self.k < 3:
            raise IndexTooSmall(f"index [Gamma0:H0] = {self.k} < 3 (need q_0 >= 2)")
        self.profile = LevelProfile(
            k=self.k,
            q_prefix=tuple(r.q for r in prefix),
            q_period=tuple(r.q for r in period),
        )
        # decomp[g] = (s, h) with g = reps[s] * h, h in h0; s is 0-based
        self.decomp = algebra.coset_decomposition(gamma0, h0, self.reps)
        # nav[g][s-1] = (s', h) with g * reps[s-1] = reps[s'-1] * h; 1-based rays
        self.nav = tuple(
            tuple(self.decomp[gamma0.mul(g, r)] for r in self.reps)
            for g in range(gamma0.order)
        )
        self.ident0 = gamma0.identity
        self._caches: dict = {}

    # -- root group schedule -------------------------------------------------

    def root(self, j: int) -> RootData:
        if j < 1:
            raise BadSchedule(f"root groups are indexed from 1, got {j}")
        idx = j - 1
        if idx < len(self.prefix):
            return self.prefix[idx]
        return self.period[(idx - len(self.prefix)) % len(self.period)]

    def q(self, i: int) -> int:
        return self.profile.q(i)

    def theta(self, j: int, h: int, u: int) -> int:
        """Image of u in U_j under the action of h in h0 (parent index)."""
        return self.root(j).action.rows[h][u]

    def ray_shift(self, g0: int, s: int) -> tuple[int, int]:
        """For g0 in Gamma0 and ray index s (1-based): the (s', h) with
        g0 * gamma_s = gamma_{s'} * h."""
        sp, h = self.nav[g0][s - 1]
        return sp + 1, h

    def __repr__(self) -> str:
        return f"NagaoDatum({self.name or 'custom'}, k={self.k})"


def _check_datum(gamma0, h0, prefix, period):
    if h0.parent is not gamma0 and h0.parent != gamma0:
        raise NotSubgroup("h0 must be a subgroup handle of gamma0")
    if not period and not prefix:
        raise BadSchedule("root group schedule is empty")
    if not period:
        raise BadSchedule("schedule must be eventually periodic: empty period")
    for j, rd in enumerate(list(prefix) + list(period), start=1):
        if rd.group.order < 2:
            raise RootGroupTooSmall(f"|U| = {rd.group.order} < 2 in schedule slot {j}")
        if rd.action.target is not rd.group and rd.action.target != rd.group:
            raise BadAction(f"schedule slot {j}: action target is not the root group")
        rep = algebra.validate_action(rd.action)
        if not rep.valid:
            raise BadAction(f"schedule slot {j}: {rep.violations[:3]}")


def validate_datum(gamma0: FiniteGroup, h0: SubgroupHandle,
                   prefix: tuple[RootData, ...], period: tuple[RootData, ...],
                   name: str = "") -> NagaoDatum:
    """Validate all datum invariants and attach the derived level profile."""
    return NagaoDatum(gamma0, h0, prefix, period, name=name)


def _const_schedule(h0: SubgroupHandle, group: FiniteGroup) -> tuple[RootData, ...]:
    return (RootData(group=group, action=algebra.trivial_action(h0, group)),)


def builtin(name: str) -> NagaoDatum:
    """The four stock data used throughout the test suites.

    D0: Gamma0 = C3, H0 = 1, U_j = C2            (3-regular tree)
    D1: Gamma0 = S3, H0 = C2, U_j = C2           (3-regular, Nagao numerics q=2)
    D2: Gamma0 = AGL(1,7), H0 = C6, U_j = C6     (7-regular)
    D3: Gamma0 = C3, H0 = 1, U_j = C2/C3 alternating (non-biregular)
    """
    if name == "D0":
        g0 = algebra.cyclic_group(3)
        h0 = algebra.trivial_subgroup(g0)
        return NagaoDatum(g0, h0, (), _const_schedule(h0, algebra.cyclic_group(2)),
                          name="D0")
    if name == "D1":
        g0 = algebra.symmetric_group(3)
        # the transposition fixing 0 (lexicographic index 1) generates H0
        h0 = algebra.generated_subgroup(g0, [1])
        return NagaoDatum(g0, h0, (), _const_schedule(h0, algebra.cyclic_group(2)),
                          name="D1")
    if name == "D2":
        g0 = algebra.affine_group(7)
        # point stabilizer of 0 in the affine line: the maps x -> a*x
        h0 = algebra.subgroup(g0, [(a - 1) * 7 for a in range(1, 7)])
        return NagaoDatum(g0, h0, (), _const_schedule(h0, algebra.cyclic_group(6)),
                          name="D2")
    if name == "D3":
        g0 = algebra.cyclic_group(3)
        h0 = algebra.trivial_subgroup(g0)
        c2 = RootData(group=algebra.cyclic_group(2),
                      action=algebra.trivial_action(h0, algebra.cyclic_group(2)))
        c3 = RootData(group=algebra.cyclic_group(3),
                      action=algebra.trivial_action(h0, algebra.cyclic_group(3)))
        # odd slots C2, even slots C3
        return NagaoDatum(g0, h0, (), (c2, c3), name="D3")
    raise UnknownName(f"unknown builtin datum {name!r}; expected one of {BUILTIN_NAMES}")


@dataclass(frozen=True)
class VertexGroup:
    """The semidirect product H0 x| (U_1 x ... x U_i) with its embeddings.

    Elements are mixed-radix encodings of (h, u_1, ..., u_i): the local h0
    position is the least significant digit.
    """

    group: FiniteGroup
    h0_embed: dict[int, int]
    root_embeds: tuple[tuple[int, ...], ...]

    def embed_root(self, j: int, u: int) -> int:
        return self.root_embeds[j - 1][u]


def gamma_i(d: NagaoDatum, i: int) -> VertexGroup:
    """Full multiplication table of the level-i vertex group.

    The product convention matches h*u notation:
    (h, u) (h', u') = (h h', theta_{h'^-1}(u) u') componentwise.
    """
    if i < 1:
        raise BadSchedule("gamma_i requires i >= 1")
    cached = d._caches.get(("gamma_i", i))
    if cached is not None:
        return cached
    h_members = d.h0.members
    nh = len(h_members)
    h_pos = {h: p for p, h in enumerate(h_members)}
    roots = [d.root(j) for j in range(1, i + 1)]
    radices = [nh] + [r.q for r in roots]
    order = 1
    for r in radices:
        order *= r

    def decode(x: int) -> list[int]:
        digits = []
        for r in radices:
            digits.append(x % r)
            x //= r
        return digits

    def encode(digits: list[int]) -> int:
        x = 0
        for r, digit in zip(reversed(radices), reversed(digits)):
            x = x * r + digit
        return x

    g0 = d.gamma0
    all_digits = [decode(x) for x in range(order)]
    table_rows = []
    for a in range(order):
        da = all_digits[a]
        ha = h_members[da[0]]
        row = []
        for b in range(order):
            db = all_digits[b]
            hb = h_members[db[0]]
            hb_inv = g0.inv(hb)
            digits = [h_pos[g0.mul(ha, hb)]]
            for j, rd in enumerate(roots, start=1):
                twisted = rd.action.rows[hb_inv][da[j]]
                digits.append(rd.group.mul(twisted, db[j]))
            row.append(encode(digits))
        table_rows.append(tuple(row))
    ident = encode([h_pos[g0.identity]] + [rd.group.identity for rd in roots])
    group = algebra.trusted_group(tuple(table_rows), ident,
                                  name=f"Gamma_{i}({d.name or 'custom'})")

    h0_embed = {}
    for h in h_members:
        digits = [h_pos[h]] + [rd.group.identity for rd in roots]
        h0_embed[h] = encode(digits)
    root_embeds = []
    for j, rd in enumerate(roots, start=1):
        col = []
        for u in range(rd.q):
            digits = [h_pos[g0.identity]] + [r.group.identity for r in roots]
            digits[j] = u
            col.append(encode(digits))
        root_embeds.append(tuple(col))
    out = VertexGroup(group=group, h0_embed=h0_embed,
                      root_embeds=tuple(root_embeds))
    d._caches[("gamma_i", i)] = out
    return out


def datum_from_json(obj: dict, name: str = "") -> NagaoDatum:
    """Parse and validate the datum file format.

    {"gamma0": {"order": n, "table": [[..]]},
     "h0": [member indices],
     "roots": {"prefix": [{"group": .., "action": {..}} ..], "period": [..]}}

    Actions default to trivial when omitted.
    """
    g0 = algebra.group_from_json(obj["gamma0"], name="gamma0")
    h0 = algebra.subgroup(g0, obj["h0"])

    def parse_root(slot) -> RootData:
        grp = algebra.group_from_json(slot["group"])
        if "action" in slot and slot["action"] is not None:
            act = algebra.action_from_json(slot["action"], h0, grp)
        else:
            act = algebra.trivial_action(h0, grp)
        return RootData(group=grp, action=act)

    roots = obj.get("roots", {})
    prefix = tuple(parse_root(s) for s in roots.get("prefix", []))
    period = tuple(parse_root(s) for s in roots.get("period", []))
    return NagaoDatum(g0, h0, prefix, period, name=name or obj.get("name", ""))


def datum_to_json(d: NagaoDatum) -> dict:
    return {
        "name": d.name,
        "gamma0": d.gamma0.to_json(),
        "h0": list(d.h0.members),
        "roots": {
            "prefix": [{"group": r.group.to_json(), "action": r.action.to_json()}
                       for r in d.prefix],
            "period": [{"group": r.group.to_json(), "action": r.action.to_json()}
                       for r in d.period],
        },
    }
