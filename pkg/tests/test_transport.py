import random

import pytest

from nagaotree import algebra as A
from nagaotree import datum as D
from nagaotree import horo as H
from nagaotree import transport as TR
from nagaotree import tree as T
from nagaotree import words as W
from nagaotree.errors import LevelMismatch, NotSameHorosphere


def test_delta_xy_trivial(d0):
    x = T.ray_vertex(2)
    assert TR.delta_xy(d0, x, x) == W.EMPTY


def test_delta_xy_is_the_unique_high_transporter(d0):
    # for x1 and u.x1 (u at level 2), the transporter is the u-syllable,
    # and brute force over all high-supported words finds exactly one
    x1 = T.ray_vertex(1)
    y = T.act_word(d0, W.generator(1, 2, 1), x1)
    dl = TR.delta_xy(d0, x1, y)
    assert dl == W.generator(1, 2, 1)
    hits = []
    for pay in W.enumerate_payloads(d0, [2, 3, 4, 5, 6, 7]):
        if T.act_word(d0, W.syllable_word(1, pay), x1) == y:
            hits.append(pay)
    assert len(hits) == 1 and W.syllable_word(1, hits[0]) == dl


def test_delta_xy_requires_same_horosphere(d0):
    with pytest.raises(NotSameHorosphere):
        TR.delta_xy(d0, T.ray_vertex(1), T.ray_vertex(2))
    with pytest.raises(NotSameHorosphere):
        TR.delta_xy(d0, T.ray_vertex(1), T.ray_vertex(1, 2))


def test_delta_inverse_rule_sampled(d0):
    t = T.ball(d0, T.base_vertex(), 5)
    rng = random.Random(1)
    lvl = [t.verts[v] for v in range(t.n) if t.level(v) in (1, 2)]
    pairs = [(x, y) for x in lvl for y in lvl
             if x[2] == y[2] and H.in_same_horosphere(d0, x, y)]
    for _ in range(50):
        x, y = pairs[rng.randrange(len(pairs))]
        assert TR.delta_xy(d0, y, x) == W.delta_inv(d0, TR.delta_xy(d0, x, y))


def test_delta_xy_well_defined_under_translate_choice(d0):
    # every translate carrying x into the standard rays is sigma * w^-1 for
    # a stabilizer element sigma; all of them give the same transporter
    x = T.act_word(d0, W.generator(2, 1, 1), T.ray_vertex(2))
    y = T.act_word(d0, W.delta_mul(d0, x[0], W.generator(1, 3, 1)),
                   T.ray_vertex(2))
    base = TR.delta_xy(d0, x, y)
    w, s, i = x
    w_inv = W.delta_inv(d0, w)
    for pay in W.enumerate_payloads(d0, [1, 2]):
        sigma = W.syllable_word(s, pay)  # in the stabilizer of x_{i,s}
        dd = W.delta_mul(d0, sigma, w_inv)
        xf = T.act_word(d0, dd, x)
        assert xf == (W.EMPTY, s, i)
        inner = TR.delta_xy(d0, xf, T.act_word(d0, dd, y))
        again = W.delta_mul(
            d0, W.delta_inv(d0, dd), W.delta_mul(d0, inner, dd))
        assert again == base


def test_gamma_xy_moves_and_inverts(d0):
    t = T.ball(d0, T.base_vertex(), 5)
    lvl2 = [t.verts[v] for v in range(t.n) if t.level(v) == 2]
    rng = random.Random(2)
    for _ in range(40):
        x, y = rng.sample(lvl2, 2)
        g = TR.gamma_xy(d0, x, y)
        assert T.act(d0, g, x) == y
        assert TR.gamma_xy(d0, y, x) == W.gamma_inv(d0, g)
    x = lvl2[0]
    assert TR.gamma_xy(d0, x, x) == W.gamma_identity(d0)
    with pytest.raises(LevelMismatch):
        TR.gamma_xy(d0, T.ray_vertex(1), T.ray_vertex(2))


def test_gamma_cocycle_sampled(d1):
    t = T.ball(d1, T.base_vertex(), 5)
    lvl1 = [t.verts[v] for v in range(t.n) if t.level(v) == 1]
    rng = random.Random(3)
    for _ in range(50):
        x, y, z = (lvl1[rng.randrange(len(lvl1))] for _ in range(3))
        lhs = W.gamma_mul(d1, TR.gamma_xy(d1, y, z), TR.gamma_xy(d1, x, y))
        assert lhs == TR.gamma_xy(d1, x, z)


def test_gamma_in_delta_for_same_orbit(d0):
    # vertices on the same translated ray index lie in one free-product
    # orbit and their transporter has no Gamma0 part
    t = T.ball(d0, T.base_vertex(), 5)
    lvl1 = [t.verts[v] for v in range(t.n) if t.level(v) == 1]
    for x in lvl1:
        for y in lvl1:
            if x[1] == y[1]:
                assert TR.gamma_xy(d0, x, y)[0] == d0.ident0


def test_tau_identity_and_adjacent(d0):
    t = T.ball(d0, T.base_vertex(), 5)
    g = H.component_graph(t, 1)
    keys = g.node_keys()
    assert TR.tau_XY(d0, g, keys[0], keys[0]) == W.EMPTY
    a = keys[0]
    b = g.edges[a][0]
    x, y = g.witness(a, b)
    assert TR.tau_XY(d0, g, a, b) == TR.delta_xy(d0, x, y)


def test_tau_path_independence(d0):
    t = T.ball(d0, T.base_vertex(), 5)
    g = H.component_graph(t, 1)
    keys = g.node_keys()
    rng = random.Random(4)
    done = 0
    while done < 50:
        a, b = rng.sample(keys, 2)
        # random walk that reaches b
        path = [a]
        for _ in range(9):
            path.append(g.edges[path[-1]][rng.randrange(len(g.edges[path[-1]]))])
            if path[-1] == b:
                break
        if path[-1] != b:
            continue
        done += 1
        assert TR.tau_along(d0, g, path) == TR.tau_XY(d0, g, a, b)


def test_verify_transport_exhaustive_d0():
    d0 = D.builtin("D0")
    rep = TR.verify_transport(d0, 5, levels=(1, 2), samples=0)
    assert rep.passed
    assert len(rep.checks) > 1000


def test_verify_transport_sampled_d2(d2):
    rep = TR.verify_transport(d2, 4, levels=(1, 2), samples=24, seed=9)
    assert rep.passed
    assert len(rep.checks) >= 200


def _twisted_datum(corrupt: bool):
    # Gamma0 = S3, H0 = C2 acting on U_2 = C3 by inversion; the corrupt
    # variant damages one table entry of that action
    g0 = A.symmetric_group(3)
    h0 = A.generated_subgroup(g0, [1])
    c2 = A.cyclic_group(2)
    c3 = A.cyclic_group(3)
    theta = A.inversion_action(h0, c3)
    if corrupt:
        rows = dict(theta.rows)
        rows[1] = (0, 1, 1)  # one entry damaged: no longer a bijection
        theta = A.GroupAction(acting=h0, target=c3, rows=rows)
    prefix = (D.RootData(group=c2, action=A.trivial_action(h0, c2)),
              D.RootData(group=c3, action=theta))
    period = (D.RootData(group=c2, action=A.trivial_action(h0, c2)),)
    return D.NagaoDatum(g0, h0, prefix, period,
                        name="twisted" + ("-corrupt" if corrupt else ""),
                        _validate=not corrupt)


def test_fault_injection_is_detected():
    good = _twisted_datum(corrupt=False)
    rep = TR.verify_transport(good, 4, levels=(1, 2), samples=60, seed=13)
    assert rep.passed
    bad = _twisted_datum(corrupt=True)
    # the corruption is a non-action, caught by the algebra validator
    assert not A.validate_action(bad.root(2).action).valid
    # and it surfaces as transporter-rule counterexamples
    tr = TR.verify_transport(bad, 4, levels=(1, 2), samples=60, seed=13)
    assert not tr.passed
    assert tr.failures()
    assert tr.failures()[0].witness is not None


def test_restriction_rule_instance(d0):
    # gamma_{x,y} and gamma_{x',y'} agree on the horoball of x when x' is
    # on the horosphere of x and y' is the gamma-image of x'
    t = T.ball(d0, T.base_vertex(), 6)
    x = T.ray_vertex(1)
    y = T.ray_vertex(1, 2)
    g = TR.gamma_xy(d0, x, y)
    hb = H.horoball(t, x)
    for xp_vid in hb.horosphere_ids():
        xp = t.verts[xp_vid]
        yp = T.act(d0, g, xp)
        gp = TR.gamma_xy(d0, xp, yp)
        for vid in hb.vertex_ids:
            v = t.verts[vid]
            assert T.act(d0, g, v) == T.act(d0, gp, v)


def test_transporter_records(d0):
    t = T.ball(d0, T.base_vertex(), 5)
    x1 = T.ray_vertex(1)
    y = T.act_word(d0, W.generator(1, 2, 1), x1)
    tp = TR.delta_transporter(d0, x1, y)
    assert tp.kind == "delta" and tp.word == W.generator(1, 2, 1)
    tp2 = TR.gamma_transporter(d0, x1, T.ray_vertex(1, 2))
    assert tp2.kind == "gamma" and T.act(d0, tp2.value, x1) == T.ray_vertex(1, 2)
    import nagaotree.horo as H2
    g = H2.component_graph(t, 1)
    keys = g.node_keys()
    tp3 = TR.tau_transporter(d0, g, keys[0], g.edges[keys[0]][0])
    assert tp3.kind == "tau"
