"""Representations of K(g, h) and their morphisms.

Walk (string) representations V_(p,q) carry basis labels e_p..e_q; band
representations V_d^λ live on k^d at every vertex.  Hom spaces are
computed as the nullspace of the assembled intertwining system.
"""
from __future__ import annotations

import itertools
import random
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .exactlin import (
    Field,
    Mat,
    PrimeField,
    Rationals,
    SingularMatrixError,
    block_diag,
    inverse,
    is_invertible,
    nullspace_basis,
    rank,
    solve_left,
    sparse_nullspace,
)
from .quivers import CyclicQuiver, Quiver, Walk, normalize_walk, transpose_quiver

__all__ = [
    "Representation",
    "Morphism",
    "BandSpec",
    "DecompositionError",
    "walk_rep",
    "band_rep",
    "walk_labels",
    "walk_dims",
    "direct_sum",
    "hom_basis",
    "hom_dim",
    "is_iso",
    "decompose",
    "decompose_with_witness",
    "is_indecomposable",
    "transpose_rep",
    "transpose_morphism",
    "g_perm",
    "g_arrow",
    "bar_rep",
    "bar_morphism",
    "bar_walk",
    "phi_walk",
    "phi_band",
    "theta",
    "jordan_nilpotent",
    "change_basis",
    "random_invertible",
    "residue_scalar",
]


class DecompositionError(ValueError):
    """No catalog summand was found (band parameter outside the candidates)."""


@dataclass(frozen=True)
class BandSpec:
    lam: object
    d: int

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("band dimension d must be >= 1")

    def __str__(self):
        return f"band(λ={self.lam},d={self.d})"


class Representation:
    """Vertex dimensions plus one exact matrix per arrow."""

    def __init__(self, quiver: Quiver, field: Field, dims: Sequence[int],
                 maps: Mapping[str, Mat], labels: Sequence[Sequence[int]] | None = None):
        self.quiver = quiver
        self.field = field
        self.dims = tuple(int(d) for d in dims)
        if len(self.dims) != len(quiver.vertices):
            raise ValueError("one dimension per vertex required")
        self.maps = {}
        for a in quiver.arrows:
            m = maps.get(a.name)
            shape = (self.dims[a.tgt], self.dims[a.src])
            if m is None:
                m = Mat.zeros(field, *shape)
            if m.shape != shape:
                raise ValueError(f"map {a.name} has shape {m.shape}, expected {shape}")
            self.maps[a.name] = m
        self.labels = tuple(tuple(l) for l in labels) if labels is not None else None

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    def __eq__(self, other):
        if not isinstance(other, Representation):
            return NotImplemented
        return (self.quiver == other.quiver and self.field == other.field
                and self.dims == other.dims
                and all(self.maps[a] == other.maps[a] for a in self.maps))

    __hash__ = None

    def __repr__(self):
        return f"Representation(dims={list(self.dims)})"

    def identity(self) -> "Morphism":
        return Morphism(self, self, [Mat.identity(self.field, d) for d in self.dims])

    def zero_to(self, other: "Representation") -> "Morphism":
        return Morphism(self, other, [Mat.zeros(self.field, e, d) for d, e in zip(self.dims, other.dims)])


class Morphism:
    """Per-vertex matrices ``comps[x] : source(x) -> target(x)``."""

    __slots__ = ("source", "target", "comps")

    def __init__(self, source: Representation, target: Representation, comps: Sequence[Mat]):
        self.source = source
        self.target = target
        self.comps = tuple(comps)
        for x, c in enumerate(self.comps):
            if c.shape != (target.dims[x], source.dims[x]):
                raise ValueError(f"component {x} has shape {c.shape}, expected "
                                 f"{(target.dims[x], source.dims[x])}")

    @property
    def field(self) -> Field:
        return self.source.field

    def intertwining_failures(self) -> list[str]:
        bad = []
        for a in self.source.quiver.arrows:
            lhs = self.target.maps[a.name] @ self.comps[a.src]
            rhs = self.comps[a.tgt] @ self.source.maps[a.name]
            if lhs != rhs:
                bad.append(a.name)
        return bad

    def is_morphism(self) -> bool:
        return not self.intertwining_failures()

    def __matmul__(self, other: "Morphism") -> "Morphism":
        """Composition ``self ∘ other``."""
        if other.target.dims != self.source.dims:
            raise ValueError("morphisms are not composable")
        return Morphism(other.source, self.target, [a @ b for a, b in zip(self.comps, other.comps)])

    def __add__(self, other: "Morphism") -> "Morphism":
        return Morphism(self.source, self.target, [a + b for a, b in zip(self.comps, other.comps)])

    def __sub__(self, other: "Morphism") -> "Morphism":
        return Morphism(self.source, self.target, [a - b for a, b in zip(self.comps, other.comps)])

    def scale(self, c) -> "Morphism":
        return Morphism(self.source, self.target, [a.scale(c) for a in self.comps])

    def __eq__(self, other):
        if not isinstance(other, Morphism):
            return NotImplemented
        return len(self.comps) == len(other.comps) and all(
            a == b for a, b in zip(self.comps, other.comps))

    __hash__ = None

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.comps)

    def is_invertible(self) -> bool:
        return all(is_invertible(c) for c in self.comps)

    def inverse(self) -> "Morphism":
        return Morphism(self.target, self.source, [inverse(c) for c in self.comps])

    def digest(self) -> list:
        return [[str(e) for e in c.entries()] for c in self.comps]

    def __repr__(self):
        return f"Morphism({list(self.source.dims)} -> {list(self.target.dims)})"


def walk_labels(w: Walk | tuple[int, int], n: int) -> list[list[int]]:
    p, q = normalize_walk(w, n)
    N = n + 1
    return [[i for i in range(p + ((x - p) % N), q + 1, N)] for x in range(N)]


def walk_dims(w, n: int) -> tuple[int, ...]:
    return tuple(len(l) for l in walk_labels(w, n))


def walk_rep(w: Walk | tuple[int, int], k: CyclicQuiver, field: Field) -> Representation:
    """V_(p,q): β maps e_i -> e_{i+1} (killing e_q), α maps e_i -> e_{i-1} (killing e_p)."""
    p0, q0 = w
    if p0 > q0:
        raise ValueError("p <= q required")
    p, q = normalize_walk(w, k.n)
    labels = walk_labels((p, q), k.n)
    index = [{l: i for i, l in enumerate(ls)} for ls in labels]
    dims = [len(l) for l in labels]
    maps = {}
    for a in k.arrows:
        m = Mat.zeros(field, dims[a.tgt], dims[a.src]).array.copy()
        step = 1 if a.name.startswith("beta") else -1
        for j, i in enumerate(labels[a.src]):
            t = i + step
            if p <= t <= q:
                m[index[a.tgt][t], j] = field.one
        maps[a.name] = Mat(field, m)
    return Representation(k, field, dims, maps, labels)


def jordan_nilpotent(field: Field, d: int) -> Mat:
    """J_d: ones on the subdiagonal."""
    m = Mat.zeros(field, d, d).array.copy()
    for i in range(1, d):
        m[i, i - 1] = field.one
    return Mat(field, m)


def theta(field: Field, r: int) -> Mat:
    """θ_r: ones on the anti-diagonal."""
    m = Mat.zeros(field, r, r).array.copy()
    for i in range(r):
        m[i, r - 1 - i] = field.one
    return Mat(field, m)


def band_rep(b: BandSpec | tuple, k: CyclicQuiver, field: Field) -> Representation:
    """V_d^λ: identity everywhere except β_{g-1} = λ·id + J_d."""
    if not isinstance(b, BandSpec):
        b = BandSpec(*b)
    lam, d = field(b.lam), b.d
    maps = {a.name: Mat.identity(field, d) for a in k.arrows}
    maps[f"beta_{k.g - 1}"] = Mat.identity(field, d).scale(lam) + jordan_nilpotent(field, d)
    return Representation(k, field, [d] * (k.n + 1), maps)


def direct_sum(reps: Sequence[Representation]) -> Representation:
    if not reps:
        raise ValueError("empty direct sum")
    k, f = reps[0].quiver, reps[0].field
    dims = [sum(r.dims[x] for r in reps) for x in range(len(k.vertices))]
    maps = {a.name: block_diag(f, [r.maps[a.name] for r in reps]) for a in k.arrows}
    return Representation(k, f, dims, maps)


def _same_quiver(v: Representation, w: Representation):
    if v.quiver != w.quiver or v.field != w.field:
        raise ValueError("representations live over different quivers or fields")


def hom_basis(v: Representation, w: Representation) -> list[Morphism]:
    """Basis of Hom(v, w), in canonical (reduced echelon) order."""
    _same_quiver(v, w)
    f = v.field
    nv = len(v.dims)
    offs, tot = [], 0
    for x in range(nv):
        offs.append(tot)
        tot += v.dims[x] * w.dims[x]
    rows: dict[tuple, dict[int, object]] = {}
    for a in v.quiver.arrows:
        x, y = a.src, a.tgt
        dvx, dwy = v.dims[x], w.dims[y]
        if dvx == 0 or dwy == 0:
            continue
        W = w.maps[a.name].array
        V = v.maps[a.name].array
        # W(a) mu_x - mu_y V(a) = 0, entry (i, j)
        for i, kk in zip(*W.nonzero()):
            c = W[i, kk]
            for j in range(dvx):
                row = rows.setdefault((a.name, int(i), j), {})
                var = offs[x] + int(kk) * dvx + j
                row[var] = row.get(var, 0) + c
        dvy = v.dims[y]
        for l, j in zip(*V.nonzero()):
            c = V[l, j]
            for i in range(dwy):
                row = rows.setdefault((a.name, i, int(j)), {})
                var = offs[y] + i * dvy + int(l)
                row[var] = row.get(var, 0) - c
    basis = sparse_nullspace(f, rows.values(), tot)
    out = []
    for vec in basis:
        comps = []
        for x in range(nv):
            seg = vec[offs[x]: offs[x] + v.dims[x] * w.dims[x]]
            comps.append(Mat(f, seg, (w.dims[x], v.dims[x])))
        out.append(Morphism(v, w, comps))
    return out


def hom_dim(v: Representation, w: Representation) -> int:
    return len(hom_basis(v, w))


def random_invertible(field: Field, n: int, rng: random.Random) -> Mat:
    while True:
        m = Mat(field, [[_random_element(field, rng) for _ in range(n)] for _ in range(n)], (n, n))
        if is_invertible(m):
            return m


def _random_element(field: Field, rng: random.Random):
    if isinstance(field, PrimeField):
        return rng.randrange(field.p)
    return field(rng.randint(-5, 5))


def _combine(basis: Sequence[Morphism], coeffs) -> Morphism:
    out = None
    for c, b in zip(coeffs, basis):
        if c == 0:
            continue
        t = b.scale(c)
        out = t if out is None else out + t
    return out


def is_iso(v: Representation, w: Representation, seed: int = 0) -> tuple[bool, Morphism | None]:
    """Decide whether ``v ≅ w``; returns ``(True, witness)`` or ``(False, None)``."""
    _same_quiver(v, w)
    if v.dims != w.dims:
        return False, None
    if v.total_dim == 0:
        return True, v.zero_to(w)
    basis = hom_basis(v, w)
    if not basis:
        return False, None
    for b in basis:
        if b.is_invertible():
            return True, b
    for a, b in itertools.combinations(basis, 2):
        s = a + b
        if s.is_invertible():
            return True, s
    f = v.field
    rng = random.Random(seed)
    for _ in range(64):
        s = _combine(basis, [_random_element(f, rng) for _ in basis])
        if s is not None and s.is_invertible():
            return True, s
    if isinstance(f, PrimeField) and len(basis) <= 4:
        for coeffs in itertools.product(range(f.p), repeat=len(basis)):
            s = _combine(basis, coeffs)
            if s is not None and s.is_invertible():
                return True, s
    return False, None


def residue_scalar(phi: Morphism):
    """The scalar c with ``phi - c·id`` nilpotent, or None if there is none."""
    f = phi.field
    dims = phi.source.dims
    char = f.characteristic
    c = None
    for x, d in enumerate(dims):
        if d and (char == 0 or d % char):
            c = f(phi.comps[x].trace() * f.inv(f(d)))
            break
    candidates = [c] if c is not None else list(f.elements())
    for c in candidates:
        if all((phi.comps[x] - Mat.identity(f, d).scale(c)).power(d).is_zero()
               for x, d in enumerate(dims) if d):
            return c
    return None


def _restrict_to_kernel(v: Representation, g: Morphism) -> tuple[Representation, Morphism]:
    """The subrepresentation ker(g) and its inclusion into v."""
    f = v.field
    bases = []
    for x, d in enumerate(v.dims):
        vecs = nullspace_basis(g.comps[x]) if d else []
        if vecs:
            b = vecs[0]
            for u in vecs[1:]:
                b = b.hstack(u)
        else:
            b = Mat.zeros(f, d, 0)
        bases.append(b)
    dims = [b.cols for b in bases]
    maps = {}
    for a in v.quiver.arrows:
        img = v.maps[a.name] @ bases[a.src]
        if dims[a.tgt] == 0 or dims[a.src] == 0:
            maps[a.name] = Mat.zeros(f, dims[a.tgt], dims[a.src])
        else:
            maps[a.name] = solve_left(bases[a.tgt], img)
    sub = Representation(v.quiver, f, dims, maps)
    return sub, Morphism(sub, v, bases)


def _pencil(v: Representation) -> tuple[Mat, Mat]:
    k = v.quiver
    g, n = k.g, k.n
    f = v.field
    cb = Mat.identity(f, v.dims[0])
    for x in range(g):
        cb = v.maps[f"beta_{x}"] @ cb
    ca = Mat.identity(f, v.dims[0])
    for x in list(range(n, g - 1, -1)):
        ca = v.maps[f"alpha_{x}"] @ ca
    return cb, ca


def _band_parameters(v: Representation, lambda_candidates) -> list:
    """Candidate λ at which the monodromy pencil drops rank."""
    f = v.field
    cb, ca = _pencil(v)
    cands = [f(c) for c in lambda_candidates if f(c) != 0]
    d0 = v.dims[0]
    if isinstance(f, PrimeField) and f.p - 1 <= d0:
        return cands
    extra = []
    if isinstance(f, Rationals):
        extra = [f(1000 + i) for i in range(d0 + 1)]
    ranks = {c: rank(cb - ca.scale(c)) for c in list(dict.fromkeys(cands + extra))}
    generic = max(ranks.values())
    return [c for c in cands if ranks[c] < generic]


def _default_lambda_candidates(f: Field):
    if isinstance(f, PrimeField):
        return list(range(1, f.p))
    return [c for c in range(-10, 11) if c != 0]


def _candidates(v: Representation, lambda_candidates):
    k = v.quiver
    n = k.n
    total = v.total_dim
    for length in range(1, total + 1):
        for p in range(n + 1):
            w = Walk(p, p + length - 1)
            dims = walk_dims(w, n)
            if all(a <= b for a, b in zip(dims, v.dims)):
                yield w
    dmax = min(v.dims)
    if dmax >= 1:
        for lam in _band_parameters(v, lambda_candidates):
            for d in range(1, dmax + 1):
                yield BandSpec(lam, d)


def _catalog_rep(label, k: CyclicQuiver, field: Field) -> Representation:
    if isinstance(label, BandSpec):
        return band_rep(label, k, field)
    return walk_rep(label, k, field)


def _split_off(x: Representation, v: Representation):
    """If x is isomorphic to a summand of v return (f, g') with g' f = id."""
    fs = hom_basis(x, v)
    if not fs:
        return None
    gs = hom_basis(v, x)
    for fi in fs:
        for gj in gs:
            u = gj @ fi
            c = residue_scalar(u)
            if c is None:
                raise DecompositionError("endomorphism ring of a catalog object is not local")
            if c != 0:
                return fi, u.inverse() @ gj
    return None


def decompose_with_witness(v: Representation, lambda_candidates: Iterable | None = None):
    """Return ``(labels, iso)`` where ``iso : ⊕ catalog(labels) -> v`` is an isomorphism."""
    k, f = v.quiver, v.field
    if lambda_candidates is None:
        lambda_candidates = _default_lambda_candidates(f)
    lambda_candidates = list(lambda_candidates)
    labels: list = []
    embeds: list[Morphism] = []
    current, incl = v, v.identity()
    while current.total_dim:
        for label in _candidates(current, lambda_candidates):
            x = _catalog_rep(label, k, f)
            split = _split_off(x, current)
            if split is None:
                continue
            fi, gp = split
            labels.append(label)
            embeds.append(incl @ fi)
            comp, cincl = _restrict_to_kernel(current, gp)
            current, incl = comp, incl @ cincl
            break
        else:
            raise DecompositionError("no catalog summand found")
    if not labels:
        return [], v.zero_to(v)
    src = direct_sum([_catalog_rep(l, k, f) for l in labels])
    comps = []
    for x in range(len(v.dims)):
        blocks = [e.comps[x] for e in embeds]
        m = blocks[0]
        for b in blocks[1:]:
            m = m.hstack(b)
        comps.append(m)
    iso = Morphism(src, v, comps)
    if not iso.is_morphism() or not iso.is_invertible():
        raise DecompositionError("internal error: assembled summands are not an isomorphism")
    return labels, iso


def decompose(v: Representation, lambda_candidates: Iterable | None = None) -> Counter:
    """Multiset of catalog labels (Walk or BandSpec) whose sum is isomorphic to v."""
    labels, _ = decompose_with_witness(v, lambda_candidates)
    return Counter(labels)


def is_indecomposable(v: Representation, lambda_candidates: Iterable | None = None) -> bool:
    c = decompose(v, lambda_candidates)
    return sum(c.values()) == 1


def transpose_rep(v: Representation) -> Representation:
    kt = transpose_quiver(v.quiver)
    maps = {}
    for a in v.quiver.arrows:
        name = a.name[:-2] if a.name.endswith("^T") else a.name + "^T"
        maps[name] = v.maps[a.name].T
    return Representation(kt, v.field, v.dims, maps)


def transpose_morphism(mu: Morphism) -> Morphism:
    return Morphism(transpose_rep(mu.target), transpose_rep(mu.source), [c.T for c in mu.comps])


def g_perm(k: CyclicQuiver) -> list[int]:
    """G(x) = g - x on 0..g and n+g+1-x on g+1..n (i.e. g - x mod n+1)."""
    g, n = k.g, k.n
    return [g - x if x <= g else n + g + 1 - x for x in range(n + 1)]


def g_arrow(k: CyclicQuiver) -> dict[str, str]:
    """Arrow bijection γ ↦ Gγ, where Gγ : G(tgt γ) -> G(src γ)."""
    G = g_perm(k)
    out = {}
    for a in k.arrows:
        (b,) = k.arrows_between(G[a.tgt], G[a.src])
        out[a.name] = b.name
    return out


def bar_rep(v: Representation) -> Representation:
    """The tilted dual: vertex x carries v(Gx)^T, arrow Gγ carries v(γ)^T."""
    k = v.quiver
    G = g_perm(k)
    ga = g_arrow(k)
    dims = [v.dims[G[x]] for x in range(k.n + 1)]
    maps = {ga[a.name]: v.maps[a.name].T for a in k.arrows}
    return Representation(k, v.field, dims, maps)


def bar_morphism(mu: Morphism) -> Morphism:
    """Contravariant: μ : V -> W gives bar μ : bar W -> bar V."""
    G = g_perm(mu.source.quiver)
    return Morphism(bar_rep(mu.target), bar_rep(mu.source), [mu.comps[G[x]].T for x in range(len(G))])


def bar_walk(w, k: CyclicQuiver) -> Walk:
    """The walk (p', q') with bar V_(p,q) ≅ V_(p',q')."""
    p, q = normalize_walk(w, k.n)
    return normalize_walk((k.g - q, k.g - p), k.n)


def phi_walk(w, k: CyclicQuiver, field: Field) -> Morphism:
    """φ : bar V_(p,q) -> V_(p',q') with ě_{p+t} ↦ e_{q'-t}."""
    p, q = normalize_walk(w, k.n)
    src = bar_rep(walk_rep((p, q), k, field))
    w2 = bar_walk((p, q), k)
    tgt = walk_rep(w2, k, field)
    G = g_perm(k)
    labels = walk_labels((p, q), k.n)
    tindex = [{l: i for i, l in enumerate(ls)} for ls in tgt.labels]
    comps = []
    for x in range(k.n + 1):
        m = Mat.zeros(field, tgt.dims[x], src.dims[x]).array.copy()
        for a, i in enumerate(labels[G[x]]):
            m[tindex[x][w2.q - (i - p)], a] = field.one
        comps.append(Mat(field, m))
    return Morphism(src, tgt, comps)


def phi_band(lam, d: int, k: CyclicQuiver, field: Field) -> Morphism:
    """φ : bar V_d^λ -> V_d^λ, the inverse of θ_d (resp. λθ_d + θ_d J_d on 1..g-1)."""
    v = band_rep(BandSpec(lam, d), k, field)
    th = theta(field, d)
    alt = th.scale(lam) + th @ jordan_nilpotent(field, d)
    comps = [alt if 1 <= x <= k.g - 1 else th for x in range(k.n + 1)]
    psi = Morphism(v, bar_rep(v), comps)
    return psi.inverse()


def change_basis(v: Representation, mats: Sequence[Mat]) -> Representation:
    """The isomorphic representation with maps P_y v(a) P_x^{-1}."""
    invs = [inverse(m) for m in mats]
    maps = {a.name: mats[a.tgt] @ v.maps[a.name] @ invs[a.src] for a in v.quiver.arrows}
    return Representation(v.quiver, v.field, v.dims, maps)
