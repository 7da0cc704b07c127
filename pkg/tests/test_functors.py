import random

import pytest

from atilde.exactlin import Mat, PrimeField, Rationals
from atilde.functors import (
    FunctorImage,
    InternalConsistencyError,
    component_image,
    d_matrix,
    f0_vertex,
    fi_vertex,
    finf_vertex,
    fp_arrow,
    fp_vertex,
    locate,
    phi_m,
)
from atilde.quivers import (
    I,
    P,
    R0,
    RINF,
    Rlambda,
    Vertex,
    assemble_qm,
    build_component,
    build_k,
    classify_walk,
    reflect_s,
    tube_size,
)
from atilde.reps import BandSpec, bar_rep, band_rep, hom_dim, phi_band, walk_rep
from oracles import fp_closed_form, walk_dims

K = build_k(3, 2)
F = PrimeField(101)


@pytest.fixture(scope="module")
def img1():
    return phi_m(assemble_qm(1, [1, 2, 3], K), F)


@pytest.mark.parametrize("v,m,w", [((6, 0), 1, (3, 33)), ((0, 1), 1, (1, 3)), ((0, 3), 1, (3, 3)), ((1, 1), 1, (3, 9))])
def test_fp_vertex_examples(v, m, w):
    assert fp_vertex(v, m, K) == w


def test_fp_vertex_outside_truncation():
    with pytest.raises(ValueError):
        fp_vertex((7, 0), 1, K)


@pytest.mark.parametrize("g,h,m", [(3, 2, 1), (2, 3, 1), (2, 1, 2)])
def test_fp_closed_form_on_bottom_row(g, h, m):
    k = build_k(g, h)
    for r in range(g * h * m + 1):
        assert tuple(fp_vertex((r, 0), m, k)) == fp_closed_form(r, g, h)


def _arrow(cq, src, tgt):
    (a,) = [a for a in cq.arrows if (a.src.r, a.src.s) == src and (a.tgt.r, a.tgt.s) == tgt]
    return a


def test_fp_arrow_plain():
    cq = build_component(P, 1, K)
    mu = fp_arrow(_arrow(cq, (0, 1), (1, 2)), 1, K, F)
    assert mu.source == walk_rep((1, 3), K, F) and mu.target == walk_rep((1, 4), K, F)
    for x in (1, 2, 3):
        assert mu.comps[x] == Mat.identity(F, 1)
    assert not mu.intertwining_failures()


def test_fp_arrow_wrap_shift():
    cq = build_component(P, 1, K)
    mu = fp_arrow(_arrow(cq, (1, 2), (1, 1)), 1, K, F)
    assert mu.source == walk_rep((1, 4), K, F) and mu.target == walk_rep((3, 9), K, F)
    # e_1 -> e_6 at vertex 1, e_4 -> e_9 at vertex 4
    assert mu.comps[1].tolist() == [[1]] and mu.comps[4].tolist() == [[0], [1]]
    assert not mu.intertwining_failures()


@pytest.mark.parametrize("v,w", [((1, 2), (1, 2)), ((2, 2), (3, 7)), ((2, 3), (1, 5))])
def test_f0_examples(v, w):
    assert f0_vertex(v, K) == w


@pytest.mark.parametrize("v,w", [((1, 1), (4, 8)), ((1, 0), (0, 4)), ((2, 1), (4, 9))])
def test_finf_examples(v, w):
    assert finf_vertex(v, K) == w


def test_flambda():
    img = component_image(Rlambda(F(2)), 0, K, F)
    lv1 = Vertex("L", 1, 0, F(2))
    assert img.objects[lv1] == band_rep(BandSpec(F(2), 1), K, F)
    pi = img.morphisms["L:λ=2:pi(1)"]
    assert all(c.tolist() == [[1, 0]] for c in pi.comps)
    assert not img.morphisms["L:λ=2:rho(1)"].intertwining_failures()


def test_fi_examples():
    assert fi_vertex((0, 1), 1, K) == (0, 2)
    w = fi_vertex((6, 0), 1, K)
    assert w.p == 0 and w.q - w.p == 30
    for v in build_component(I, 1, K).vertices:
        assert classify_walk(fi_vertex(v, 1, K), K) == I


def test_component_images_are_classified():
    for spec, M in ((P, 1), (R0, 10), (RINF, 10)):
        img = component_image(spec, M, K, F)
        for lab in img.labels.values():
            assert classify_walk(lab, K) == spec


def test_d_matrix():
    assert d_matrix(3, 4, F(2), F).tolist() == [[1, 2, 4], [0, 1, 4], [0, 0, 1], [0, 0, 0]]
    assert d_matrix(2, 3, F(0), F).tolist() == [[1, 0], [0, 1], [0, 0]]
    assert d_matrix(1, 3, F(7), F).tolist() == [[1], [0], [0]]
    with pytest.raises(ValueError):
        d_matrix(3, 2, F(1), F)


def test_phi_band_matrix():
    ph = phi_band(F(2), 2, K, F)
    assert ph.inverse().comps[1].tolist() == [[1, 2], [2, 0]]
    assert ph.inverse().comps[0].tolist() == [[0, 1], [1, 0]]


def test_phi_at_simple_walk(img1):
    v = Vertex("P", 0, 1)
    ph = img1.phi(v)
    assert ph.source == bar_rep(walk_rep((1, 3), K, F))
    assert ph.target == walk_rep((0, 2), K, F) == img1.objects[reflect_s(v, K)]


def test_phi_is_iso_everywhere(img1):
    for v in img1.quiver.vertices:
        ph = img1.phi(v)
        assert ph.is_invertible() and not ph.inverse().intertwining_failures()


def test_apex_object_dims(img1):
    apex = Vertex("P", 6, 0)
    assert img1.labels[apex] == (3, 33)
    assert img1.objects[apex].dims == (6, 6, 6, 7, 6) == walk_dims(3, 33, 4)


def test_connecting_arrows(img1):
    q = img1.quiver
    il = img1.morphisms["iota_lambda(1)"]
    assert il.comps[3].shape == (12, 7)
    assert il.comps[3] == d_matrix(7, 12, F(1), F)
    assert il.comps[0].shape == (12, 6)
    i0 = img1.morphisms["iota_0(0)"]
    assert img1.labels[q.arrow("iota_0(0)").src] == (3, 33)
    assert not i0.intertwining_failures()
    kl = q.arrow("kappa_lambda(1)")
    il_a = q.arrow("iota_lambda(1)")
    assert kl.src == reflect_s(il_a.tgt, K) and kl.tgt == reflect_s(il_a.src, K)


def test_every_arrow_intertwines(img1):
    for a in img1.quiver.arrows:
        mu = img1.morphisms[a.name]
        assert mu.source is img1.objects[a.src] and mu.target is img1.objects[a.tgt]
        assert not mu.intertwining_failures()


@pytest.mark.parametrize("g,h,m", [(3, 2, 0), (2, 1, 1), (1, 2, 1), (2, 3, 0)])
def test_phi_m_builds_over_configs(g, h, m):
    k = build_k(g, h)
    img = phi_m(assemble_qm(m, [1], k), F)
    assert set(img.morphisms) == {a.name for a in img.quiver.arrows}


def test_phi_m_over_rationals():
    q = Rationals()
    img = phi_m(assemble_qm(0, [q(1), q(2)], K), q)
    assert img.labels[Vertex("L", 1, 0, q(2))] == BandSpec(q(2), 1)


def test_phi_m_is_cached():
    q = assemble_qm(1, [1, 2, 3], K)
    assert phi_m(q, F) is phi_m(assemble_qm(1, [1, 2, 3], K), F)


def test_set_morphism_rejects_non_morphism():
    cq = build_component(P, 1, K)
    img = FunctorImage(cq, K, F)
    for v in cq.vertices:
        img._set_object(v, fp_vertex(v, 1, K))
    a = _arrow(cq, (0, 1), (1, 2))
    comps = list(fp_arrow(a, 1, K, F).comps)
    img._set_morphism(a, comps)
    comps[1] = comps[1].scale(2)
    with pytest.raises(InternalConsistencyError):
        img._set_morphism(a, comps)
    with pytest.raises(InternalConsistencyError):
        img._set_morphism(a, [Mat.zeros(F, 2, 2)] * 5)


def test_hom_transfer(img1):
    rng = random.Random(7)
    verts = list(img1.quiver.vertices)
    for _ in range(30):
        x, y = rng.choice(verts), rng.choice(verts)
        vx, vy = img1.objects[x], img1.objects[y]
        assert hom_dim(vx, vy) == hom_dim(bar_rep(vy), bar_rep(vx))


@pytest.mark.parametrize("x,comp,vertex,m", [
    ((3, 3), P, Vertex("P", 0, 3), 0),
    ((1, 5), R0, Vertex("T0", 2, 3), 0),
])
def test_locate_walks(x, comp, vertex, m):
    loc = locate(x, K, F)
    assert (loc.component, loc.vertex, loc.m) == (comp, vertex, m)


def test_locate_band_and_checks_image():
    loc = locate(BandSpec(F(2), 1), K, F)
    assert loc.component == Rlambda(F(2)) and loc.m == 0
    for x in [(0, 9), (4, 10), (2, 6), (1, 5), (0, 4)]:
        loc = locate(x, K, F)
        M = loc.m if loc.component in (P, I) else tube_size(loc.m, K)
        img = component_image(loc.component, M, K, F)
        assert img.labels[loc.vertex] == x
