import pytest
from hypothesis import given, strategies as st

from atilde.quivers import (
    I,
    P,
    R0,
    RINF,
    UnsupportedSizeError,
    Vertex,
    assemble_qm,
    build_component,
    build_k,
    classify_walk,
    enumerate_diamonds,
    int_moddiv,
    normalize_walk,
    reflect_arrow,
    reflect_s,
    Rlambda,
)


def test_k32_arrows(k32):
    assert list(k32.vertices) == [0, 1, 2, 3, 4]
    assert (k32.arrow("beta_2").src, k32.arrow("beta_2").tgt) == (2, 3)
    assert (k32.arrow("alpha_4").src, k32.arrow("alpha_4").tgt) == (0, 4)


def test_k12_arrows():
    k = build_k(1, 2)
    got = {a.name: (a.src, a.tgt) for a in k.arrows}
    assert got == {"beta_0": (0, 1), "alpha_1": (2, 1), "alpha_2": (0, 2)}


def test_k11_unsupported():
    with pytest.raises(UnsupportedSizeError):
        build_k(1, 1)


@pytest.mark.parametrize("g,h", [(3, 2), (2, 1), (1, 2), (2, 3), (4, 4)])
def test_source_and_sink(g, h):
    k = build_k(g, h)
    sources = [x for x in k.vertices if not k.in_arrows(x)]
    sinks = [x for x in k.vertices if not k.out_arrows(x)]
    assert sources == [0] and sinks == [g]


@pytest.mark.parametrize("a,q,expected", [(7, 5, (1, 2)), (-3, 5, (-1, 2)), (10, 5, (2, 0))])
def test_int_moddiv(a, q, expected):
    assert int_moddiv(a, q) == expected


@pytest.mark.parametrize("w,expected", [((-3, 2), (2, 7)), ((4, 10), (4, 10)), ((6, 8), (1, 3))])
def test_normalize_walk(w, expected):
    assert normalize_walk(w, 4) == expected


def test_normalize_rejects_bad_walk():
    with pytest.raises(ValueError):
        normalize_walk((5, 4), 4)


@pytest.mark.parametrize("w,tag", [((1, 3), P), ((4, 10), I), ((0, 4), RINF), ((1, 2), R0)])
def test_classify_examples(k32, w, tag):
    assert classify_walk(w, k32) == tag


def test_classification_hits_all_tags(k32):
    tags = {classify_walk((p, q), k32) for p in range(5) for q in range(p, p + 16)}
    assert tags == {P, I, R0, RINF}


def test_component_sizes(k32):
    assert len(build_component(P, 1, k32).vertices) == 35
    lam = build_component(Rlambda(2), 0, k32)
    assert len(lam.vertices) == 2
    assert sorted(a.name for a in lam.arrows) == ["L:λ=2:pi(1)", "L:λ=2:rho(1)"]
    tinf = build_component(RINF, 2, k32)
    assert {(v.r, v.s) for v in tinf.vertices} == {(r, s) for s in (0, 1) for r in range(2 * 3 - s + 1)}
    t0 = build_component(R0, 2, k32)
    assert {(v.r, v.s) for v in t0.vertices} == {(r, s) for s in (1, 2, 3) for r in range(3 * 2 + s + 1)}


def test_i_component_is_opposite(k32):
    p, i = build_component(P, 1, k32), build_component(I, 1, k32)
    assert len(p.arrows) == len(i.arrows)
    rev = {(a.tgt.r, a.tgt.s, a.src.r, a.src.s) for a in p.arrows}
    assert {(a.src.r, a.src.s, a.tgt.r, a.tgt.s) for a in i.arrows} == rev


@pytest.mark.parametrize("spec", [R0, RINF])
def test_tube_degrees(k32, spec):
    cq = build_component(spec, 4, k32)
    for v in cq.vertices:
        outs = cq.out_arrows(v)
        kinds = sorted(a.name.split(":")[-1].split("(")[0] for a in outs)
        assert len(outs) <= 2 and len(set(kinds)) == len(kinds)
        assert len(cq.in_arrows(v)) <= 2
    assert all(len(cq.in_arrows(v)) > 0 for v in cq.vertices if v.r > 0)


def test_assembled_connecting_arrows(k32):
    q = assemble_qm(1, [2], k32)
    a = q.arrow("iota_lambda(2)")
    assert a.src == Vertex("P", 6, 0) and a.tgt == Vertex("L", 12, 0, 2)
    assert len([x for x in q.connecting if x.name.startswith("iota_inf")]) == 3
    q0 = assemble_qm(0, [1], k32)
    assert len([x for x in q0.connecting if x.name.startswith("iota_0")]) == 4
    for x in q.connecting:
        if x.name.startswith("iota"):
            assert x.src.kind == "P" and x.tgt.kind in ("T0", "Tinf", "L")
        else:
            assert x.tgt.kind == "I" and x.src.kind in ("T0", "Tinf", "L")


def test_assemble_rejects_bad_lambdas(k32):
    with pytest.raises(ValueError):
        assemble_qm(1, [0], k32)
    with pytest.raises(ValueError):
        assemble_qm(1, [2, 2], k32)


def test_reflect_examples(k32):
    assert reflect_s(Vertex("P", 6, 0), k32) == Vertex("I", 6, 0)
    assert reflect_s(Vertex("T0", 2, 3), k32) == Vertex("T0", 2, 2)
    assert reflect_s(Vertex("L", 5, 0, 2), k32) == Vertex("L", 5, 0, 2)


@pytest.mark.parametrize("g,h,m", [(3, 2, 1), (2, 1, 1), (1, 2, 0), (2, 3, 1)])
def test_reflection_is_involution_and_maps_arrows(g, h, m):
    k = build_k(g, h)
    q = assemble_qm(m, [1], k)
    for v in q.vertices:
        assert q.has_vertex(reflect_s(v, k))
        assert reflect_s(reflect_s(v, k), k) == v
    for a in q.arrows:
        b = reflect_arrow(a, q, k)
        assert reflect_arrow(b, q, k) == a
    for x in range(g + 1):
        assert reflect_arrow(q.arrow(f"iota_0({x})"), q, k).name == f"kappa_0({x})"


def test_lambda_tube_has_no_diamonds_at_m0(k32):
    keep, _ = enumerate_diamonds(build_component(Rlambda(2), 0, k32), exclude=[])
    assert keep == []


def test_interior_p_vertex_has_one_diamond(k32):
    cq = build_component(P, 1, k32)
    keep, _ = enumerate_diamonds(cq, exclude=[])
    starts = [d for d in keep if d.x == Vertex("P", 2, 3)]
    assert len(starts) == 1


def test_apex_diamonds_are_excluded(k32):
    q = assemble_qm(1, [1, 2], k32)
    keep, excluded = enumerate_diamonds(q)
    assert excluded and all(d.x == q.apex for d in excluded)
    assert all(d.x != q.apex for d in keep)


@given(st.integers(-50, 50), st.integers(0, 40))
def test_normalize_keeps_length_and_class(p, length):
    k = build_k(3, 2)
    w = normalize_walk((p, p + length), 4)
    assert 0 <= w.p <= 4 and w.q - w.p == length
    assert classify_walk(w, k) == classify_walk((p, p + length), k)


def test_vertex_order_is_deterministic(k32):
    q1 = assemble_qm(1, [3, 1], k32)
    q2 = assemble_qm(1, [3, 1], k32)
    assert [v.label for v in q1.vertices] == [v.label for v in q2.vertices]
    kinds = [v.kind for v in q1.vertices]
    assert kinds.index("P") < kinds.index("T0") < kinds.index("Tinf") < kinds.index("L") < kinds.index("I")
