"""The functors F_P, F_I, F_0, F_∞, F_λ and the assembled functor Φ_m.

Post-projective objects are found by walking backwards in the grid ℕK̃.
Everything on the pre-injective side (F_I and the κ arrows) is obtained
by conjugating the post-projective data with the duality ``bar`` and the
isomorphisms φ, never by hand.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .exactlin import Field, Mat
from .quivers import (
    I,
    P,
    R0,
    RINF,
    Arrow,
    AssembledQuiver,
    ComponentId,
    ComponentQuiver,
    CyclicQuiver,
    Rlambda,
    Vertex,
    Walk,
    assemble_qm,
    build_component,
    build_k,
    classify_walk,
    normalize_walk,
    p_arrow_data,
    reflect_arrow,
    reflect_s,
    t0_attach,
    tinf_attach,
    tube_size,
)
from .reps import (
    BandSpec,
    Morphism,
    Representation,
    band_rep,
    bar_morphism,
    bar_walk,
    phi_band,
    phi_walk,
    walk_rep,
)

__all__ = [
    "InternalConsistencyError",
    "LocateBoundError",
    "FunctorImage",
    "Location",
    "fp_lifted",
    "fp_vertex",
    "fp_arrow",
    "f0_vertex",
    "finf_vertex",
    "fi_vertex",
    "walk_morphism",
    "d_matrix",
    "phi_m",
    "component_image",
    "locate",
]


class InternalConsistencyError(RuntimeError):
    """A constructed functor value is not a morphism."""


class LocateBoundError(LookupError):
    """The catalog object was not found within the search bound."""


# ---------------------------------------------------------------- F_P


def fp_lifted(r: int, s: int, k: CyclicQuiver) -> tuple[int, int]:
    """Lifted walk (p, q) of F_P(r, s) for any integer s.

    p is the start of the maximal chain of +1 arrows ending at (r, s),
    q the start of the maximal chain of -1 arrows.
    """
    g, N = k.g, k.n + 1
    if r < 0:
        raise ValueError("level must be nonnegative")
    rr, ss = r, s
    while True:
        if (ss - 1) % N >= g:
            ss -= 1
        elif rr >= 1:
            rr, ss = rr - 1, ss - 1
        else:
            break
    p = ss
    rr, ss = r, s
    while True:
        if ss % N < g:
            ss += 1
        elif rr >= 1:
            rr, ss = rr - 1, ss + 1
        else:
            break
    return p, ss


def _check_p_vertex(r: int, s: int, m: int | None, k: CyclicQuiver):
    if not 0 <= s <= k.n or r < 0 or (m is not None and r > k.g * k.h * m):
        raise ValueError(f"({r},{s})_P is outside the truncation")


def fp_vertex(v, m: int | None, k: CyclicQuiver) -> Walk:
    """F_P(r, s) as a normalized walk."""
    r, s = (v.r, v.s) if isinstance(v, Vertex) else v
    _check_p_vertex(r, s, m, k)
    return normalize_walk(fp_lifted(r, s, k), k.n)


def fi_vertex(v, m: int | None, k: CyclicQuiver) -> Walk:
    """F_I(r, s): the walk of bar F_P(r, s)."""
    return bar_walk(fp_vertex(v, m, k), k)


def walk_morphism(src: Representation, tgt: Representation, shift: int) -> Morphism:
    """e_l ↦ e_{l+shift} where that label exists in the target, else 0."""
    f = src.field
    comps = []
    for x in range(len(src.dims)):
        m = Mat.zeros(f, tgt.dims[x], src.dims[x]).array.copy()
        tindex = {l: i for i, l in enumerate(tgt.labels[x])}
        for j, l in enumerate(src.labels[x]):
            i = tindex.get(l + shift)
            if i is not None:
                m[i, j] = f.one
        comps.append(Mat(f, m))
    return Morphism(src, tgt, comps)


def _p_shift(r: int, s: int, r2: int, s2: int, k: CyclicQuiver) -> int:
    """Label shift of the grid arrow (r, s) -> (r2, s2) in normalized coordinates."""
    N = k.n + 1
    p1, _ = fp_lifted(r, s, k)
    p2, _ = fp_lifted(r2, s2, k)
    return (p2 % N - p2) - (p1 % N - p1)


def _p_arrow_lift(a: Arrow, k: CyclicQuiver) -> tuple[int, int, int, int]:
    r, s = a.src.r, a.src.s
    for _, r2, s2 in p_arrow_data(r, s, k):
        if r2 == a.tgt.r and s2 % (k.n + 1) == a.tgt.s:
            return r, s, r2, s2
    raise ValueError(f"{a.name} is not a grid arrow")


def fp_arrow(a: Arrow, m: int | None, k: CyclicQuiver, field: Field) -> Morphism:
    """F_P on an arrow: e_t ↦ e_t in lifted coordinates."""
    r, s, r2, s2 = _p_arrow_lift(a, k)
    _check_p_vertex(r, s, m, k)
    _check_p_vertex(r2, s2 % (k.n + 1), m, k)
    src = walk_rep(fp_vertex((r, s), m, k), k, field)
    tgt = walk_rep(fp_vertex((r2, s2 % (k.n + 1)), m, k), k, field)
    return walk_morphism(src, tgt, _p_shift(r, s, r2, s2, k))


# ---------------------------------------------------------------- tubes


def f0_vertex(v, k: CyclicQuiver) -> Walk:
    r, s = (v.r, v.s) if isinstance(v, Vertex) else v
    g, N = k.g, k.n + 1
    if not 1 <= s <= g or r < 0:
        raise ValueError(f"({r},{s})_0 is not a vertex of the tube")
    p = (s - r - 1) % g + 1
    q0 = s % g
    t = math.floor(s / g) - math.floor((s - r - 1) / g)
    return Walk(p, q0 + t * N)


def finf_vertex(v, k: CyclicQuiver) -> Walk:
    r, s = (v.r, v.s) if isinstance(v, Vertex) else v
    g, h, N = k.g, k.h, k.n + 1
    if not 0 <= s < h or r < 0:
        raise ValueError(f"({r},{s})_inf is not a vertex of the tube")
    p = 0 if s == 0 else g + s
    d, md = divmod(r + s, h)
    return Walk(p, g + md + N * d)


def _tube_shift(a: Arrow, src_walk: Walk, k: CyclicQuiver) -> int:
    N = k.n + 1
    kind = a.src.kind
    is_rho = ":rho(" in a.name
    if kind == "T0":
        return N if is_rho and src_walk.p == 1 else 0
    if kind == "Tinf":
        return -N if (not is_rho and a.tgt.s == 0) else 0
    raise ValueError(a.name)


def d_matrix(d: int, rows: int, lam, field: Field) -> Mat:
    """rows × d, entry (i, j) = binom(j-1, i-1) λ^(j-i) for i <= j (1-based)."""
    if d < 1 or rows < d:
        raise ValueError("need 1 <= d <= rows")
    lam = field(lam)
    m = Mat.zeros(field, rows, d).array.copy()
    for j in range(1, d + 1):
        for i in range(1, j + 1):
            m[i - 1, j - 1] = field(math.comb(j - 1, i - 1) * lam ** (j - i))
    return Mat(field, m)


def _lambda_matrix(field: Field, r: int, pi: bool) -> Mat:
    """π: (1_r 0), ρ: (0 over 1_r)."""
    if pi:
        return Mat.identity(field, r).hstack(Mat.zeros(field, r, 1))
    return Mat.zeros(field, 1, r).vstack(Mat.identity(field, r))


# ---------------------------------------------------------------- images


class FunctorImage:
    """Objects and morphisms of Φ on a (component or assembled) quiver."""

    def __init__(self, quiver, k: CyclicQuiver, field: Field):
        self.quiver = quiver
        self.k = k
        self.field = field
        self.labels: dict[Vertex, Walk | BandSpec] = {}
        self.objects: dict[Vertex, Representation] = {}
        self.morphisms: dict[str, Morphism] = {}
        self._phi: dict[Vertex, Morphism] = {}
        self._phi_inv: dict[Vertex, Morphism] = {}

    def obj(self, v: Vertex) -> Representation:
        return self.objects[v]

    def mor(self, name: str) -> Morphism:
        return self.morphisms[name]

    def identity(self, v: Vertex) -> Morphism:
        return self.objects[v].identity()

    def phi(self, v: Vertex) -> Morphism:
        """φ_v : bar Φ(v) -> Φ(S v)."""
        if v not in self._phi:
            lab = self.labels[v]
            if isinstance(lab, BandSpec):
                ph = phi_band(lab.lam, lab.d, self.k, self.field)
            else:
                ph = phi_walk(lab, self.k, self.field)
                if bar_walk(lab, self.k) != self.labels.get(reflect_s(v, self.k), bar_walk(lab, self.k)):
                    raise InternalConsistencyError(f"Φ(S {v}) is not the bar of Φ({v})")
            self._phi[v] = ph
        return self._phi[v]

    def phi_inv(self, v: Vertex) -> Morphism:
        if v not in self._phi_inv:
            self._phi_inv[v] = self.phi(v).inverse()
        return self._phi_inv[v]

    def _set_object(self, v: Vertex, label):
        self.labels[v] = label
        if isinstance(label, BandSpec):
            self.objects[v] = band_rep(label, self.k, self.field)
        else:
            self.objects[v] = walk_rep(label, self.k, self.field)

    def _set_morphism(self, a: Arrow, comps: Sequence[Mat]):
        try:
            mu = Morphism(self.objects[a.src], self.objects[a.tgt], comps)
        except ValueError as exc:
            raise InternalConsistencyError(f"{a.name}: {exc}") from exc
        bad = mu.intertwining_failures()
        if bad:
            raise InternalConsistencyError(f"{a.name} does not intertwine at {', '.join(bad)}")
        self.morphisms[a.name] = mu

    def conjugate(self, a: Arrow, image_of_reflection: Morphism) -> list[Mat]:
        """Components of φ_{S tgt} ∘ bar(Φ S a) ∘ φ_{S src}^{-1}."""
        sa, sb = reflect_s(a.src, self.k), reflect_s(a.tgt, self.k)
        mu = self.phi(sb) @ bar_morphism(image_of_reflection) @ self.phi_inv(sa)
        return list(mu.comps)

    def __repr__(self):
        return f"FunctorImage({self.quiver!r}, {len(self.objects)} objects, {len(self.morphisms)} morphisms)"


def _fill_p(img: FunctorImage, cq: ComponentQuiver, m: int):
    k = img.k
    for v in cq.vertices:
        img._set_object(v, fp_vertex(v, m, k))
    for a in cq.arrows:
        r, s, r2, s2 = _p_arrow_lift(a, k)
        mu = walk_morphism(img.objects[a.src], img.objects[a.tgt], _p_shift(r, s, r2, s2, k))
        img._set_morphism(a, mu.comps)


def _fill_tube(img: FunctorImage, cq: ComponentQuiver):
    k, f = img.k, img.field
    for v in cq.vertices:
        if v.kind == "T0":
            img._set_object(v, f0_vertex(v, k))
        elif v.kind == "Tinf":
            img._set_object(v, finf_vertex(v, k))
        else:
            img._set_object(v, BandSpec(f(v.lam), v.r))
    for a in cq.arrows:
        if a.src.kind == "L":
            pi = ":pi(" in a.name
            r = a.tgt.r if pi else a.src.r
            m = _lambda_matrix(f, r, pi)
            img._set_morphism(a, [m] * (k.n + 1))
        else:
            shift = _tube_shift(a, img.labels[a.src], k)
            img._set_morphism(a, walk_morphism(img.objects[a.src], img.objects[a.tgt], shift).comps)


def _fill_i(img: FunctorImage, cq: ComponentQuiver, p_img: FunctorImage, m: int):
    k = img.k
    for v in cq.vertices:
        img._set_object(v, fi_vertex((v.r, v.s), m, k))
    for v in p_img.objects:
        if v not in img.labels:
            img.labels[v] = p_img.labels[v]
            img.objects[v] = p_img.objects[v]
    for a in cq.arrows:
        sa = reflect_arrow(a, p_img.quiver, k)
        img._set_morphism(a, img.conjugate(a, p_img.morphisms[sa.name]))


def _iota_comps(img: FunctorImage, a: Arrow, M: int) -> list[Mat]:
    f, k = img.field, img.k
    src, tgt = img.objects[a.src], img.objects[a.tgt]
    if a.name.startswith("iota_0"):
        return list(walk_morphism(src, tgt, 0).comps)
    if a.name.startswith("iota_inf"):
        shift = img.labels[a.tgt].q - img.labels[a.src].q
        return list(walk_morphism(src, tgt, shift).comps)
    lam = img.labels[a.tgt].lam
    return [d_matrix(d, M + 2, lam, f) for d in src.dims]


def phi_m(q: AssembledQuiver, field: Field) -> FunctorImage:
    """The functor Φ_m on every vertex and arrow of Q_m, intertwining-checked."""
    return _phi_m_cached(q.m, q.k.g, q.k.h, tuple(q.lambdas), field)


@lru_cache(maxsize=16)
def _phi_m_cached(m: int, g: int, h: int, lambdas: tuple, field: Field) -> FunctorImage:
    k = build_k(g, h)
    q = assemble_qm(m, [field(l) for l in lambdas], k)
    img = FunctorImage(q, k, field)
    _fill_p(img, q.parts["P"], m)
    for key, part in q.parts.items():
        if key not in ("P", "I"):
            _fill_tube(img, part)
    for v in q.parts["I"].vertices:
        img._set_object(v, fi_vertex((v.r, v.s), m, k))
    for a in q.parts["I"].arrows:
        sa = reflect_arrow(a, q, k)
        img._set_morphism(a, img.conjugate(a, img.morphisms[sa.name]))
    iotas = [a for a in q.connecting if a.name.startswith("iota")]
    for a in iotas:
        img._set_morphism(a, _iota_comps(img, a, q.M))
    for a in q.connecting:
        if a.name.startswith("kappa"):
            sa = reflect_arrow(a, q, k)
            img._set_morphism(a, img.conjugate(a, img.morphisms[sa.name]))
    # φ must exist and be invertible everywhere
    for v in q.vertices:
        ph = img.phi(v)
        if ph.intertwining_failures() or not ph.is_invertible():
            raise InternalConsistencyError(f"φ at {v} is not an isomorphism")
    return img


def component_image(spec: ComponentId, truncation: int, k: CyclicQuiver, field: Field) -> FunctorImage:
    """Φ restricted to a single component quiver (truncation m for P/I, M for tubes)."""
    cq = build_component(spec, truncation, k)
    img = FunctorImage(cq, k, field)
    if spec == P:
        _fill_p(img, cq, truncation)
    elif spec == I:
        pq = build_component(P, truncation, k)
        p_img = FunctorImage(pq, k, field)
        _fill_p(p_img, pq, truncation)
        _fill_i(img, cq, p_img, truncation)
    else:
        _fill_tube(img, cq)
    return img


# ---------------------------------------------------------------- locate


@dataclass(frozen=True)
class Location:
    component: ComponentId
    vertex: Vertex
    m: int

    def __str__(self):
        return f"{self.component.tag}{'' if self.component.lam is None else f'({self.component.lam})'} {self.vertex.label} m={self.m}"


def _min_m_for_tube(needed_M: int, k: CyclicQuiver) -> int:
    step = 2 * (k.n + 1)
    return max(0, -(-needed_M // step))


def locate(x, k: CyclicQuiver, field: Field | None = None) -> Location:
    """Component, vertex and least m with Φ_m(vertex) ≅ x for a catalog label x."""
    g, h, n = k.g, k.h, k.n
    N = n + 1
    if isinstance(x, BandSpec):
        lam = field(x.lam) if field is not None else x.lam
        if lam == 0:
            raise ValueError("λ = 0 is not a band parameter of the catalog")
        return Location(Rlambda(lam), Vertex("L", x.d, 0, lam), _min_m_for_tube(max(0, x.d - 2), k))
    w = normalize_walk(x, n)
    length = w.q - w.p + 1
    bound = length + 1
    cls = classify_walk(w, k)
    if cls in (P, I):
        target = w if cls == P else bar_walk(w, k)
        kind = "P" if cls == P else "I"
        for r in range(0, g * h * bound + 1):
            for s in range(N):
                if fp_vertex((r, s), None, k) == target:
                    return Location(cls, Vertex(kind, r, s), -(-r // (g * h)))
    elif cls == R0:
        for r in range(0, g * bound + 1):
            for s in range(1, g + 1):
                if f0_vertex((r, s), k) == w:
                    return Location(R0, Vertex("T0", r, s), _min_m_for_tube(max(0, -(-(r - s) // g)), k))
    else:
        for r in range(0, h * bound + 1):
            for s in range(h):
                if finf_vertex((r, s), k) == w:
                    return Location(RINF, Vertex("Tinf", r, s), _min_m_for_tube(max(0, -(-(r + s) // h) - 1), k))
    raise LocateBoundError(f"{x} not found within the search bound")
