"""Path expressions over Q_m and exact checks of its defining relations.

Every relation is evaluated as an identity between explicit morphisms of
representations; a report lists the instances that failed together with
the entry lists of both sides.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field as dc_field
from typing import Sequence

from .exactlin import Field, Mat
from .functors import FunctorImage, component_image, d_matrix, phi_m
from .quivers import (
    P,
    R0,
    RINF,
    AssembledQuiver,
    CyclicQuiver,
    Rlambda,
    Vertex,
    enumerate_diamonds,
    p_in_data,
    t0_attach,
    tinf_attach,
)
from .reps import Morphism, hom_dim

__all__ = [
    "PathExpr",
    "RelationReport",
    "eval_path",
    "named_path",
    "check_hauptsatz",
    "check_remarks",
    "check_hom_proposition",
    "check_tube_propositions",
    "grid_ancestors",
    "grid_hom_dim",
    "mutate",
    "mutation_suite",
]


@dataclass(frozen=True)
class PathExpr:
    """Linear combination of paths from ``source`` to ``target``.

    Paths list arrow names in traversal order (first arrow first).
    """

    source: object
    target: object
    terms: tuple  # of (coefficient, tuple of arrow names)

    @classmethod
    def path(cls, q, source, names: Sequence[str], coeff=1) -> "PathExpr":
        v = source
        for name in names:
            a = q.arrow(name)
            if a.src != v:
                raise ValueError(f"{name} does not start at {v}")
            v = a.tgt
        return cls(source, v, ((coeff, tuple(names)),))

    def __add__(self, other: "PathExpr") -> "PathExpr":
        if (self.source, self.target) != (other.source, other.target):
            raise ValueError("terms must share source and target")
        return PathExpr(self.source, self.target, self.terms + other.terms)

    def scale(self, c) -> "PathExpr":
        return PathExpr(self.source, self.target, tuple((c * a, p) for a, p in self.terms))

    def then(self, names: Sequence[str], q) -> "PathExpr":
        """Append arrows to every term (the expression must be a single path)."""
        out = None
        for c, p in self.terms:
            e = PathExpr.path(q, self.source, list(p) + list(names), c)
            out = e if out is None else out + e
        return out

    def __str__(self):
        parts = []
        for c, p in self.terms:
            body = " ∘ ".join(reversed(p)) if p else f"id[{self.source}]"
            parts.append(body if c == 1 else f"{c}·({body})")
        return " + ".join(parts)


def _cache(img: FunctorImage) -> dict:
    c = getattr(img, "_path_cache", None)
    if c is None:
        c = img._path_cache = {}
    return c


def _eval_single(img: FunctorImage, source, names: tuple) -> Morphism:
    if not names:
        return img.identity(source)
    cache = _cache(img)
    hit = cache.get(names)
    if hit is not None:
        return hit
    head = _eval_single(img, source, names[:-1])
    out = img.morphisms[names[-1]] @ head
    cache[names] = out
    return out


def eval_path(expr: PathExpr, img: FunctorImage) -> Morphism:
    """The morphism Φ(expr) as a linear combination of composites."""
    f = img.field
    out = None
    for c, p in expr.terms:
        mu = _eval_single(img, expr.source, tuple(p))
        c = f(c)
        if c != 1:
            mu = mu.scale(c)
        out = mu if out is None else out + mu
    if out is None:
        return img.objects[expr.source].zero_to(img.objects[expr.target])
    return out


# ---------------------------------------------------------------- named paths


def _tube_walk(q, start: Vertex, kind: str, steps: int) -> list[str]:
    names, v = [], start
    for _ in range(steps):
        (a,) = [a for a in q.out_arrows(v) if f":{kind}(" in a.name]
        names.append(a.name)
        v = a.tgt
    return names


def named_path(pid: str, q: AssembledQuiver, lam=None) -> PathExpr:
    """βP, αP, βI, αI, loop0, loopInf or eps (needs ``lam``) as a path."""
    k, top, M = q.k, q.top, q.M
    g, h, n = k.g, k.h, k.n
    if pid == "betaP":
        return PathExpr.path(q, Vertex("P", top, g), [f"P:({top},beta_{x})" for x in range(g - 1, -1, -1)])
    if pid == "alphaP":
        return PathExpr.path(q, Vertex("P", top, g), [f"P:({top},alpha_{x})" for x in range(g, n + 1)])
    if pid == "betaI":
        return PathExpr.path(q, Vertex("I", top, 0), [f"I:({top},beta_{x})" for x in range(g)])
    if pid == "alphaI":
        return PathExpr.path(q, Vertex("I", top, 0), [f"I:({top},alpha_{x})" for x in range(n, g - 1, -1)])
    if pid == "loop0":
        start = t0_attach(0, M, k)
        down = _tube_walk(q, start, "pi", g)
        up = _tube_walk(q, q.arrow(down[-1]).tgt, "rho", g)
        return PathExpr.path(q, start, down + up)
    if pid == "loopInf":
        start = tinf_attach(0, M, k)
        down = _tube_walk(q, start, "pi", h)
        up = _tube_walk(q, q.arrow(down[-1]).tgt, "rho", h)
        return PathExpr.path(q, start, down + up)
    if pid == "eps":
        if lam is None:
            raise ValueError("eps needs a λ")
        start = Vertex("L", M + 2, 0, lam)
        return PathExpr.path(q, start, [f"L:λ={lam}:pi({M + 1})", f"L:λ={lam}:rho({M + 1})"])
    raise ValueError(f"unknown path id {pid!r}")


def _names(expr: PathExpr) -> list[str]:
    ((_, p),) = expr.terms
    return list(p)


# ---------------------------------------------------------------- reports


@dataclass
class RelationReport:
    relation: str
    instances: int = 0
    failures: list = dc_field(default_factory=list)
    notes: list = dc_field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "relation": self.relation,
            "instances": self.instances,
            "failures": [{"instance": d, "left": l, "right": r} for d, l, r in self.failures],
            "notes": list(self.notes),
        }

    def summary(self) -> str:
        status = "ok" if self.ok else f"{len(self.failures)} FAILED"
        return f"{self.relation:<14} {self.instances:>6} instances  {status}"


def _compare(rep: RelationReport, label: str, left: PathExpr, right: PathExpr | None, img: FunctorImage):
    rep.instances += 1
    lv = eval_path(left, img)
    if right is None:
        if not lv.is_zero():
            rep.failures.append((label, lv.digest(), "0"))
        return
    rv = eval_path(right, img)
    if lv != rv:
        rep.failures.append((label, lv.digest(), rv.digest()))


def _expect_nonzero(rep: RelationReport, label: str, expr: PathExpr, img: FunctorImage):
    rep.instances += 1
    v = eval_path(expr, img)
    if v.is_zero():
        rep.failures.append((label, v.digest(), "nonzero"))


def _mouth(part) -> list[Vertex]:
    return sorted(part.mouth, key=Vertex.sort_key)


def _mouth_triangles(q, parts) -> list[PathExpr]:
    out = []
    for part in parts:
        mouth = part.mouth
        for v in _mouth(part):
            for a in q.out_arrows(v):
                if ":rho(" not in a.name:
                    continue
                for b in q.out_arrows(a.tgt):
                    if ":pi(" in b.name and b.tgt in mouth:
                        out.append(PathExpr.path(q, v, [a.name, b.name]))
    return out


def _diamond_pairs(q, diamonds):
    for d in diamonds:
        yield (str(d), PathExpr.path(q, d.x, [d.gamma, d.gammaP]), PathExpr.path(q, d.x, [d.delta, d.deltaP]))


def check_hauptsatz(img: FunctorImage) -> list[RelationReport]:
    """Relations (a)-(g) on an assembled image, one report per family."""
    q: AssembledQuiver = img.quiver
    k, top, M = q.k, q.top, q.M
    g, h, n = k.g, k.h, k.n
    f = img.field
    reports = {rid: RelationReport(rid) for rid in ("a", "b", "c1", "c2", "d", "e", "f", "g")}

    keep, excluded = enumerate_diamonds(q)
    for label, l, r in _diamond_pairs(q, keep):
        _compare(reports["a"], label, l, r, img)
    reports["a"].notes.append(f"{len(excluded)} diamonds at {q.apex} excluded")

    tubes = [p for key, p in q.parts.items() if key not in ("P", "I")]
    for t in _mouth_triangles(q, tubes):
        _compare(reports["b"], str(t), t, None, img)

    # The superscripts fix the lengths: X^g runs along the g beta-typed
    # top-row arrows, X^h along the h alpha-typed ones.
    pathP_g, pathP_h = _names(named_path("betaP", q)), _names(named_path("alphaP", q))
    pathI_g, pathI_h = _names(named_path("betaI", q)), _names(named_path("alphaI", q))
    loop0, loopInf = _names(named_path("loop0", q)), _names(named_path("loopInf", q))
    pi0, rho0 = loop0[:g], loop0[g:]
    piInf, rhoInf = loopInf[:h], loopInf[h:]
    pg, p0 = Vertex("P", top, g), Vertex("P", top, 0)
    a0, ainf = t0_attach(g, M, k), tinf_attach(g, M, k)

    rep = reports["c1"]
    _compare(rep, "iota_0(g)", PathExpr.path(q, pg, ["iota_0(%d)" % g]),
             PathExpr.path(q, pg, pathP_h + ["iota_0(0)"] + pi0), img)
    _compare(rep, "iota_inf(g)", PathExpr.path(q, pg, ["iota_inf(%d)" % g]),
             PathExpr.path(q, pg, pathP_g + ["iota_inf(0)"] + piInf), img)
    rep.notes.append("top-row paths are matched by length (superscript): "
                     "beta_P^h has h arrows, alpha_P^g has g arrows")

    rep = reports["c2"]
    _compare(rep, "kappa_0(g)", PathExpr.path(q, a0, ["kappa_0(%d)" % g]),
             PathExpr.path(q, a0, rho0 + ["kappa_0(0)"] + pathI_h), img)
    _compare(rep, "kappa_inf(g)", PathExpr.path(q, ainf, ["kappa_inf(%d)" % g]),
             PathExpr.path(q, ainf, rhoInf + ["kappa_inf(0)"] + pathI_g), img)
    rep.notes.append("kappa_0(g) is read as beta_I^h kappa_0(0) rho_0^g (the reverse order does not compose)")

    rep = reports["d"]
    for lam in q.lambdas:
        il, kl = f"iota_lambda({lam})", f"kappa_lambda({lam})"
        eps = _names(named_path("eps", q, lam))
        left = PathExpr.path(q, pg, pathP_g + [il])
        right = PathExpr.path(q, pg, pathP_h + [il], lam) + PathExpr.path(q, pg, pathP_h + [il] + eps)
        _compare(rep, f"iota side λ={lam}", left, right, img)
        lv = Vertex("L", M + 2, 0, lam)
        left = PathExpr.path(q, lv, [kl] + pathI_g)
        right = PathExpr.path(q, lv, [kl] + pathI_h, lam) + PathExpr.path(q, lv, eps + [kl] + pathI_h)
        _compare(rep, f"kappa side λ={lam}", left, right, img)

    rep = reports["e"]
    pn = Vertex("P", top, n)
    _compare(rep, "kappa_0(0) iota_0(0) (ghm,alpha_n)_P",
             PathExpr.path(q, pn, [f"P:({top},alpha_{n})", "iota_0(0)", "kappa_0(0)"]), None, img)
    _compare(rep, "(ghm,alpha_n)_I kappa_0(0) iota_0(0)",
             PathExpr.path(q, p0, ["iota_0(0)", "kappa_0(0)", f"I:({top},alpha_{n})"]), None, img)

    top_j = M + 1
    rep = reports["f"]
    for j in range(top_j + 1):
        left = PathExpr.path(q, p0, ["iota_inf(0)"] + loopInf * j + ["kappa_inf(0)"])
        right = PathExpr.path(q, p0, ["iota_0(0)"] + loop0 * (top_j - j) + ["kappa_0(0)"])
        _compare(rep, f"j={j}", left, right, img)
    rep.notes.append(f"j ranges over 0..{top_j}; j=0 and j={top_j} have an empty loop power on one side")

    rep = reports["g"]
    for lam in q.lambdas:
        eps = _names(named_path("eps", q, lam))
        for j in range(top_j + 1):
            left = PathExpr.path(q, p0, [f"iota_lambda({lam})"] + eps * j + [f"kappa_lambda({lam})"])
            right = None
            for i in range(j + 1):
                c = f(math.comb(top_j - j + i, top_j - j)) * f(lam) ** i
                t = PathExpr.path(q, p0, ["iota_0(0)"] + loop0 * (j - i) + ["kappa_0(0)"], c)
                right = t if right is None else right + t
            _compare(rep, f"λ={lam} j={j}", left, right, img)
    return [reports[r] for r in ("a", "b", "c1", "c2", "d", "e", "f", "g")]


def check_remarks(img: FunctorImage) -> list[RelationReport]:
    """The two extra zero composites and the four nonzero ones."""
    q: AssembledQuiver = img.quiver
    top, n = q.top, q.k.n
    p0, p1, pn = Vertex("P", top, 0), Vertex("P", top, 1), Vertex("P", top, n)
    zero, nonzero = RelationReport("remark-zero"), RelationReport("remark-nonzero")
    b0P, b0I = f"P:({top},beta_0)", f"I:({top},beta_0)"
    anP, anI = f"P:({top},alpha_{n})", f"I:({top},alpha_{n})"
    _compare(zero, "kappa_inf(0) iota_inf(0) (ghm,beta_0)_P",
             PathExpr.path(q, p1, [b0P, "iota_inf(0)", "kappa_inf(0)"]), None, img)
    _compare(zero, "(ghm,beta_0)_I kappa_inf(0) iota_inf(0)",
             PathExpr.path(q, p0, ["iota_inf(0)", "kappa_inf(0)", b0I]), None, img)
    _expect_nonzero(nonzero, "kappa_0(0) iota_0(0) (ghm,beta_0)_P",
                    PathExpr.path(q, p1, [b0P, "iota_0(0)", "kappa_0(0)"]), img)
    _expect_nonzero(nonzero, "(ghm,beta_0)_I kappa_0(0) iota_0(0)",
                    PathExpr.path(q, p0, ["iota_0(0)", "kappa_0(0)", b0I]), img)
    _expect_nonzero(nonzero, "kappa_inf(0) iota_inf(0) (ghm,alpha_n)_P",
                    PathExpr.path(q, pn, [anP, "iota_inf(0)", "kappa_inf(0)"]), img)
    _expect_nonzero(nonzero, "(ghm,alpha_n)_I kappa_inf(0) iota_inf(0)",
                    PathExpr.path(q, p0, ["iota_inf(0)", "kappa_inf(0)", anI]), img)
    return [zero, nonzero]


# ---------------------------------------------------------------- grid Hom counts


def grid_ancestors(y: tuple[int, int], k: CyclicQuiver) -> set[tuple[int, int]]:
    """All lifted vertices of ℕK̃ with a path to ``y`` (including ``y``)."""
    seen = {y}
    todo = deque([y])
    while todo:
        r, s = todo.popleft()
        for u in p_in_data(r, s, k):
            if u not in seen:
                seen.add(u)
                todo.append(u)
    return seen


def grid_hom_dim(x: tuple[int, int], y: tuple[int, int], k: CyclicQuiver) -> int:
    """1 if ℕK̃ has a path x -> y, else 0."""
    return int(x in grid_ancestors(y, k))


def check_hom_proposition(m: int, k: CyclicQuiver, field: Field) -> list[RelationReport]:
    """dim Hom(F X, F Y) against lift counts on both sides, plus φ on every walk image."""
    p_img = component_image(P, m, k, field)
    from .quivers import I as I_ID

    i_img = component_image(I_ID, m, k, field)
    N = k.n + 1
    verts = list(p_img.quiver.vertices)
    hom_p, hom_i, phi_rep = RelationReport("hom-P"), RelationReport("hom-I"), RelationReport("phi")
    for y in verts:
        anc = grid_ancestors((y.r, y.s), k)
        for x in verts:
            count = sum(1 for (r, s) in anc if r == x.r and (s - x.s) % N == 0)
            hom_p.instances += 1
            d = hom_dim(p_img.objects[x], p_img.objects[y])
            if d != count:
                hom_p.failures.append((f"X={x} Y={y}", [str(d)], [str(count)]))
            sx, sy = Vertex("I", x.r, x.s), Vertex("I", y.r, y.s)
            hom_i.instances += 1
            d = hom_dim(i_img.objects[sy], i_img.objects[sx])
            if d != count:
                hom_i.failures.append((f"X={sx} Y={sy}", [str(d)], [str(count)]))
    for img in (p_img, i_img):
        for v in img.quiver.vertices:
            phi_rep.instances += 1
            ph = img.phi(v)
            if ph.intertwining_failures() or not ph.is_invertible():
                phi_rep.failures.append((f"φ at {v}", ph.digest(), "iso"))
                continue
            back = ph.inverse()
            if back.intertwining_failures():
                phi_rep.failures.append((f"φ^-1 at {v}", back.digest(), "morphism"))
    return [hom_p, hom_i, phi_rep]


def check_tube_propositions(M: int, k: CyclicQuiver, field: Field, lam=2) -> list[RelationReport]:
    """Mouth zero relations and in-tube diamonds on standalone tubes of truncation M."""
    out = []
    for rid, spec in (("tube-0", R0), ("tube-∞", RINF), ("tube-λ", Rlambda(field(lam)))):
        img = component_image(spec, M, k, field)
        q = img.quiver
        rep = RelationReport(rid)
        for t in _mouth_triangles(q, [q]):
            _compare(rep, str(t), t, None, img)
        keep, _ = enumerate_diamonds(q, exclude=[])
        for label, l, r in _diamond_pairs(q, keep):
            _compare(rep, label, l, r, img)
        out.append(rep)
    return out


# ---------------------------------------------------------------- mutations


def mutate(img: FunctorImage, replacements: dict[str, Morphism]) -> FunctorImage:
    """A copy of ``img`` with some arrow images replaced (no intertwining check)."""
    new = FunctorImage(img.quiver, img.k, img.field)
    new.labels, new.objects = img.labels, img.objects
    new._phi, new._phi_inv = img._phi, img._phi_inv
    new.morphisms = dict(img.morphisms)
    new.morphisms.update(replacements)
    return new


def _all_ones(mu: Morphism) -> Morphism:
    f = mu.field
    comps = [Mat(f, [[1] * c.cols for _ in range(c.rows)], c.shape) for c in mu.comps]
    return Morphism(mu.source, mu.target, comps)


def mutation_suite(img: FunctorImage) -> dict[str, tuple[str, FunctorImage]]:
    """One deliberately broken image per relation family (a)-(g)."""
    q: AssembledQuiver = img.quiver
    k, top = q.k, q.top
    lam = q.lambdas[0]
    il = f"iota_lambda({lam})"
    f = img.field
    keep, _ = enumerate_diamonds(q)
    d0 = next(d for d in keep if d.x.kind == "P" and not eval_path(
        PathExpr.path(q, d.x, [d.gamma, d.gammaP]), img).is_zero())
    bent_lambda = [d_matrix(d, q.M + 2, f(lam) + 1, f) for d in img.objects[q.arrow(il).src].dims]
    mouth_rho = f"L:λ={lam}:rho(1)"
    rho = img.morphisms[mouth_rho]
    # e ↦ e_1 instead of e ↦ e_2, so that π_λ(1) no longer kills the image
    bent_rho = Morphism(rho.source, rho.target, [Mat.identity(f, 1).vstack(Mat.zeros(f, 1, 1))] * len(rho.comps))
    return {
        "a": (f"{d0.gamma} scaled by 2", mutate(img, {d0.gamma: img.morphisms[d0.gamma].scale(2)})),
        "b": (f"{mouth_rho} replaced by the first-coordinate inclusion", mutate(img, {mouth_rho: bent_rho})),
        "c1": ("iota_0(g) scaled by 2", mutate(img, {f"iota_0({k.g})": img.morphisms[f"iota_0({k.g})"].scale(2)})),
        "c2": ("kappa_0(g) scaled by 2", mutate(img, {f"kappa_0({k.g})": img.morphisms[f"kappa_0({k.g})"].scale(2)})),
        "d": (f"{il} built with λ+1", mutate(img, {il: Morphism(img.morphisms[il].source, img.morphisms[il].target, bent_lambda)})),
        "e": ("iota_0(0) replaced by all-ones", mutate(img, {"iota_0(0)": _all_ones(img.morphisms["iota_0(0)"])})),
        "f": ("kappa_inf(0) scaled by 2", mutate(img, {"kappa_inf(0)": img.morphisms["kappa_inf(0)"].scale(2)})),
        "g": (f"kappa_lambda({lam}) scaled by 2", mutate(img, {f"kappa_lambda({lam})": img.morphisms[f"kappa_lambda({lam})"].scale(2)})),
    }
