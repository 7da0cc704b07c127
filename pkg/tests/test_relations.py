import pytest
from hypothesis import given, strategies as st

from atilde.exactlin import Mat, PrimeField
from atilde.functors import d_matrix, phi_m
from atilde.quivers import Vertex, assemble_qm, build_k
from atilde.reps import Morphism
from atilde.relations import (
    PathExpr,
    RelationReport,
    check_hauptsatz,
    check_hom_proposition,
    check_remarks,
    check_tube_propositions,
    eval_path,
    grid_hom_dim,
    mutate,
    mutation_suite,
    named_path,
)
from oracles import grid_path_exists

K = build_k(3, 2)
F = PrimeField(101)


@pytest.fixture(scope="module")
def img1():
    return phi_m(assemble_qm(1, [1, 2, 3], K), F)


@pytest.fixture(scope="module")
def img0():
    return phi_m(assemble_qm(0, [1], K), F)


def test_eval_single_arrow(img1):
    a = img1.quiver.arrows[0]
    assert eval_path(PathExpr.path(img1.quiver, a.src, [a.name]), img1) == img1.morphisms[a.name]


def test_eval_identity(img0):
    v = Vertex("L", 1, 0, F(1))
    assert eval_path(PathExpr.path(img0.quiver, v, []), img0) == img0.objects[v].identity()


def test_eps_at_m0(img0):
    e = eval_path(named_path("eps", img0.quiver, F(1)), img0)
    for c in e.comps:
        assert c.tolist() == [[0, 0], [1, 0]]


def test_non_composable_path(img1):
    q = img1.quiver
    with pytest.raises(ValueError):
        PathExpr.path(q, Vertex("P", 0, 1), ["iota_0(0)"])
    with pytest.raises(ValueError):
        PathExpr.path(q, Vertex("P", 0, 1), []) + PathExpr.path(q, Vertex("P", 0, 2), [])


def test_linear_combination(img1):
    q = img1.quiver
    v = Vertex("P", 0, 1)
    e = PathExpr.path(q, v, [], 3) + PathExpr.path(q, v, [], -3)
    assert eval_path(e, img1).is_zero()


def test_named_path_lengths(img1):
    q = img1.quiver
    assert len(named_path("betaP", q).terms[0][1]) == 3
    assert len(named_path("alphaP", q).terms[0][1]) == 2
    assert named_path("betaP", q).source == Vertex("P", 6, 3)
    assert named_path("betaP", q).target == Vertex("P", 6, 0)
    assert named_path("betaI", q).target == Vertex("I", 6, 3)
    loop = named_path("loop0", q)
    assert loop.source == loop.target and len(loop.terms[0][1]) == 6
    with pytest.raises(ValueError):
        named_path("gamma", q)


def test_hauptsatz_running_example(img1):
    reports = check_hauptsatz(img1)
    assert [r.relation for r in reports] == ["a", "b", "c1", "c2", "d", "e", "f", "g"]
    for r in reports:
        assert r.ok, (r.relation, r.failures[:2])
        assert r.instances > 0
    byid = {r.relation: r for r in reports}
    assert byid["f"].instances == 12 and byid["g"].instances == 36


def test_hauptsatz_m0_notes(img0):
    reports = {r.relation: r for r in check_hauptsatz(img0)}
    assert all(r.ok for r in reports.values())
    assert reports["f"].instances == 2
    assert any("empty loop power" in n for n in reports["f"].notes)


def test_lambda_plus_one_mutation_is_caught(img1):
    q = img1.quiver
    il = img1.morphisms["iota_lambda(2)"]
    comps = [d_matrix(d, q.M + 2, F(3), F) for d in il.source.dims]
    bad = mutate(img1, {"iota_lambda(2)": Morphism(il.source, il.target, comps)})
    reports = {r.relation: r for r in check_hauptsatz(bad)}
    assert not reports["d"].ok or not reports["g"].ok


def test_every_mutation_family_is_caught(img1):
    for rid, (desc, bad) in mutation_suite(img1).items():
        reports = {r.relation: r for r in check_hauptsatz(bad)}
        assert not reports[rid].ok, desc


def test_mutate_does_not_touch_original(img1):
    before = img1.morphisms["iota_0(0)"]
    mutation_suite(img1)
    assert img1.morphisms["iota_0(0)"] is before


def test_remarks(img1):
    zero, nonzero = check_remarks(img1)
    assert zero.ok and zero.instances == 2
    assert nonzero.ok and nonzero.instances == 4


def test_grid_hom_examples():
    assert grid_hom_dim((2, 3), (2, 3), K) == 1
    assert grid_hom_dim((0, 1), (1, 2), K) == 1
    assert grid_hom_dim((1, 2), (0, 1), K) == 0


@given(st.integers(0, 3), st.integers(-6, 10), st.integers(0, 3), st.integers(-6, 10))
def test_grid_hom_matches_forward_search(r1, s1, r2, s2):
    assert grid_hom_dim((r1, s1), (r2, s2), K) == int(grid_path_exists((r1, s1), (r2, s2), 3, 2))


@pytest.mark.parametrize("g,h", [(2, 1), (1, 2)])
def test_hom_proposition_small(g, h):
    for r in check_hom_proposition(1, build_k(g, h), F):
        assert r.ok and r.instances > 0


def test_tube_propositions_small():
    for r in check_tube_propositions(4, K, PrimeField(7), lam=3):
        assert r.ok and r.instances > 0


def test_report_rendering():
    r = RelationReport("x", instances=3)
    assert r.ok and "ok" in r.summary()
    r.failures.append(("j=1", [[1]], "0"))
    assert not r.ok and "1 FAILED" in r.summary()
    assert r.to_json()["failures"][0]["instance"] == "j=1"


def test_zero_expression_digest(img1):
    mu = img1.morphisms["iota_0(0)"]
    z = mu.scale(0)
    assert z.is_zero() and isinstance(z.comps[0], Mat)
