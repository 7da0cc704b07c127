"""The cyclic quiver K(g, h), walks, and the finite component quivers.

Vertices of the component quivers are :class:`Vertex` values whose
``label`` is a stable text form such as ``P:r=6,s=0``, ``T0:r=2,s=3``,
``Tinf:r=1,s=0``, ``L:λ=2,r=5`` or ``I:r=6,s=0``.  Iteration order is
deterministic: component order P, T0, Tinf, L (λ ascending), I, and
row-major by ``(r, s)`` inside a component.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

__all__ = [
    "Arrow",
    "Quiver",
    "CyclicQuiver",
    "UnsupportedSizeError",
    "Walk",
    "ComponentId",
    "P",
    "I",
    "R0",
    "RINF",
    "Rlambda",
    "Vertex",
    "ComponentQuiver",
    "AssembledQuiver",
    "Diamond",
    "build_k",
    "transpose_quiver",
    "int_moddiv",
    "normalize_walk",
    "classify_walk",
    "build_component",
    "assemble_qm",
    "reflect_s",
    "reflect_arrow",
    "enumerate_diamonds",
    "tube_size",
]


class UnsupportedSizeError(ValueError):
    """K(g, h) with n = g + h - 1 < 2 is outside the supported range."""


@dataclass(frozen=True)
class Arrow:
    name: str
    src: object
    tgt: object


class Quiver:
    """A finite quiver with named arrows and a fixed vertex order."""

    def __init__(self, vertices: Sequence, arrows: Sequence[Arrow]):
        self.vertices = tuple(vertices)
        self.arrows = tuple(arrows)
        self._arrow = {a.name: a for a in self.arrows}
        if len(self._arrow) != len(self.arrows):
            raise ValueError("arrow names must be unique")
        self._index = {v: i for i, v in enumerate(self.vertices)}
        self._out: dict = defaultdict(list)
        self._in: dict = defaultdict(list)
        for a in self.arrows:
            self._out[a.src].append(a)
            self._in[a.tgt].append(a)

    def arrow(self, name: str) -> Arrow:
        return self._arrow[name]

    def has_arrow(self, name: str) -> bool:
        return name in self._arrow

    def has_vertex(self, v) -> bool:
        return v in self._index

    def index(self, v) -> int:
        return self._index[v]

    def out_arrows(self, v) -> list[Arrow]:
        return self._out.get(v, [])

    def in_arrows(self, v) -> list[Arrow]:
        return self._in.get(v, [])

    def arrows_between(self, x, y) -> list[Arrow]:
        return [a for a in self.out_arrows(x) if a.tgt == y]


class CyclicQuiver(Quiver):
    """K(g, h): vertices 0..n, arrows beta_x: x -> x+1 (0 <= x < g) and
    alpha_x: x+1 -> x (g <= x <= n, indices mod n+1)."""

    def __init__(self, g: int, h: int):
        if g < 1 or h < 1:
            raise ValueError("g and h must be positive")
        n = g + h - 1
        if n < 2:
            raise UnsupportedSizeError(f"n = {n} < 2 is not supported")
        self.g, self.h, self.n = g, h, n
        arrows = [Arrow(f"beta_{x}", x, x + 1) for x in range(g)]
        arrows += [Arrow(f"alpha_{x}", (x + 1) % (n + 1), x) for x in range(g, n + 1)]
        super().__init__(range(n + 1), arrows)

    def __eq__(self, other):
        return isinstance(other, CyclicQuiver) and (self.g, self.h) == (other.g, other.h)

    def __hash__(self):
        return hash(("K", self.g, self.h))

    def __repr__(self):
        return f"CyclicQuiver(g={self.g}, h={self.h})"


class TransposedQuiver(Quiver):
    """K^T: same vertices, every arrow reversed and renamed ``name^T``."""

    def __init__(self, base: Quiver):
        self.base = base
        super().__init__(base.vertices, [Arrow(a.name + "^T", a.tgt, a.src) for a in base.arrows])

    def __eq__(self, other):
        return isinstance(other, TransposedQuiver) and self.base == other.base

    def __hash__(self):
        return hash(("T", self.base))


def build_k(g: int, h: int) -> CyclicQuiver:
    return CyclicQuiver(g, h)


def transpose_quiver(k: Quiver) -> Quiver:
    if isinstance(k, TransposedQuiver):
        return k.base
    return TransposedQuiver(k)


def int_moddiv(a: int, q: int) -> tuple[int, int]:
    """Floored ``(DIV(a, q), MOD(a, q))`` with ``0 <= MOD < q``."""
    if q <= 0:
        raise ValueError("modulus must be positive")
    return divmod(a, q)


class Walk(NamedTuple):
    p: int
    q: int

    def __str__(self):
        return f"({self.p},{self.q})"


def normalize_walk(w: Walk | tuple[int, int], n: int) -> Walk:
    p, q = w
    if p > q:
        raise ValueError("p <= q required")
    p2 = p % (n + 1)
    return Walk(p2, q + p2 - p)


@dataclass(frozen=True)
class ComponentId:
    tag: str
    lam: object = None

    def __post_init__(self):
        if self.tag not in ("P", "I", "R0", "Rinf", "Rlambda"):
            raise ValueError(f"unknown component tag {self.tag}")
        if self.tag == "Rlambda" and (self.lam is None or self.lam == 0):
            raise ValueError("Rlambda requires a nonzero λ")

    def __str__(self):
        return f"Rlambda({self.lam})" if self.tag == "Rlambda" else self.tag


P = ComponentId("P")
I = ComponentId("I")
R0 = ComponentId("R0")
RINF = ComponentId("Rinf")


def Rlambda(lam) -> ComponentId:
    return ComponentId("Rlambda", lam)


def classify_walk(w: Walk | tuple[int, int], k: CyclicQuiver) -> ComponentId:
    g, n = k.g, k.n
    p, q = w
    pr, qr = p % (n + 1), q % (n + 1)
    p_low = 1 <= pr <= g  # p ≡ 1..g
    q_low = qr <= g - 1  # q ≡ 0..g-1
    if p_low and not q_low:
        return P
    if not p_low and q_low:
        return I
    if p_low and q_low:
        return R0
    return RINF


_KIND_ORDER = {"P": 0, "T0": 1, "Tinf": 2, "L": 3, "I": 4}


@dataclass(frozen=True)
class Vertex:
    """A vertex of a component quiver.

    ``kind`` is one of P, I, T0, Tinf, L.  For L the position is ``r`` and
    ``lam`` the tube parameter; ``s`` is unused.
    """

    kind: str
    r: int
    s: int = 0
    lam: object = None

    @property
    def label(self) -> str:
        if self.kind == "L":
            return f"L:λ={self.lam},r={self.r}"
        return f"{self.kind}:r={self.r},s={self.s}"

    def sort_key(self):
        lam = self.lam if self.lam is not None else 0
        return (_KIND_ORDER[self.kind], lam, self.r, self.s)

    def __str__(self):
        return self.label

    def __repr__(self):
        return f"Vertex({self.label})"


def p_arrow_data(r: int, s: int, k: CyclicQuiver) -> list[tuple[str, int, int]]:
    """Arrows of the grid quiver NK~ leaving the lifted vertex ``(r, s)``.

    Returns ``(name, r', s')`` with ``s'`` = s+1 or s-1 (not reduced).  Names
    follow the K~ arrow they come from: ``(r,alpha_i)`` for the same-level
    copy and ``(r,alpha_i')`` for the level-raising one.
    """
    g, n = k.g, k.n
    N = n + 1
    out = []
    i = s % N
    if i >= g:  # alpha_i : i -> i+1 in K~
        out.append((f"({r},alpha_{i})", r, s + 1))
    else:  # beta_i : i+1 -> i in K~, raising copy
        out.append((f"({r},beta_{i}')", r + 1, s + 1))
    j = (s - 1) % N
    if j < g:  # beta_j : j+1 -> j
        out.append((f"({r},beta_{j})", r, s - 1))
    else:  # alpha_j : j -> j+1, raising copy
        out.append((f"({r},alpha_{j}')", r + 1, s - 1))
    return out


def p_in_data(r: int, s: int, k: CyclicQuiver) -> list[tuple[int, int]]:
    """Lifted predecessors of ``(r, s)`` in NK~ (levels stay >= 0)."""
    g, n = k.g, k.n
    N = n + 1
    out = []
    i = (s - 1) % N
    if i >= g:
        out.append((r, s - 1))
    elif r >= 1:
        out.append((r - 1, s - 1))
    j = s % N
    if j < g:
        out.append((r, s + 1))
    elif r >= 1:
        out.append((r - 1, s + 1))
    return out


class ComponentQuiver(Quiver):
    def __init__(self, component: ComponentId, truncation: int, k: CyclicQuiver,
                 vertices, arrows, mouth=()):
        self.component = component
        self.truncation = truncation
        self.k = k
        self.mouth = frozenset(mouth)
        super().__init__(sorted(vertices, key=Vertex.sort_key), arrows)

    def __repr__(self):
        return (f"ComponentQuiver({self.component}, truncation={self.truncation}, "
                f"{len(self.vertices)} vertices, {len(self.arrows)} arrows)")


def tube_size(m: int, k: CyclicQuiver) -> int:
    """Truncation index 2m(n+1) used for every tube of Q_m."""
    return 2 * m * (k.n + 1)


def _build_p(m: int, k: CyclicQuiver, kind: str = "P") -> ComponentQuiver:
    g, h, n = k.g, k.h, k.n
    top = g * h * m
    verts = {(r, s) for r in range(top + 1) for s in range(n + 1)}
    arrows = []
    for r, s in sorted(verts):
        for name, r2, s2 in p_arrow_data(r, s, k):
            t = (r2, s2 % (n + 1))
            if t in verts:
                arrows.append(Arrow(f"P:{name}", Vertex("P", r, s), Vertex("P", *t)))
    vs = [Vertex("P", r, s) for r, s in verts]
    cq = ComponentQuiver(P, m, k, vs, arrows)
    if kind == "I":
        return _opposite(cq)
    return cq


def _opposite(cq: ComponentQuiver) -> ComponentQuiver:
    def sv(v):
        return Vertex("I", v.r, v.s)

    arrows = [Arrow("I:" + a.name[2:], sv(a.tgt), sv(a.src)) for a in cq.arrows]
    return ComponentQuiver(I, cq.truncation, cq.k, [sv(v) for v in cq.vertices], arrows)


def _build_t0(M: int, k: CyclicQuiver) -> ComponentQuiver:
    g = k.g
    verts = {(r, s) for s in range(1, g + 1) for r in range(g * M + s + 1)}

    def red(s):
        return (s - 1) % g + 1

    arrows = []
    for r, s in sorted(verts):
        if (r + 1, s) in verts:
            arrows.append(Arrow(f"T0:rho({r},{s})", Vertex("T0", r, s), Vertex("T0", r + 1, s)))
        src = (r + 1, red(s + 1))
        if src in verts:
            arrows.append(Arrow(f"T0:pi({r},{s})", Vertex("T0", *src), Vertex("T0", r, s)))
    vs = [Vertex("T0", r, s) for r, s in verts]
    return ComponentQuiver(R0, M, k, vs, arrows, [Vertex("T0", 0, s) for s in range(1, g + 1)])


def _build_tinf(M: int, k: CyclicQuiver) -> ComponentQuiver:
    h = k.h
    verts = {(r, s) for s in range(h) for r in range(h * (M + 1) - s + 1)}
    arrows = []
    for r, s in sorted(verts):
        if (r + 1, s) in verts:
            arrows.append(Arrow(f"Tinf:rho({r},{s})", Vertex("Tinf", r, s), Vertex("Tinf", r + 1, s)))
        src = (r + 1, (s - 1) % h)
        if src in verts:
            arrows.append(Arrow(f"Tinf:pi({r},{s})", Vertex("Tinf", *src), Vertex("Tinf", r, s)))
    vs = [Vertex("Tinf", r, s) for r, s in verts]
    return ComponentQuiver(RINF, M, k, vs, arrows, [Vertex("Tinf", 0, s) for s in range(h)])


def _build_lambda(lam, M: int, k: CyclicQuiver) -> ComponentQuiver:
    vs = [Vertex("L", r, 0, lam) for r in range(1, M + 3)]
    arrows = []
    for r in range(1, M + 2):
        arrows.append(Arrow(f"L:λ={lam}:pi({r})", vs[r], vs[r - 1]))
        arrows.append(Arrow(f"L:λ={lam}:rho({r})", vs[r - 1], vs[r]))
    return ComponentQuiver(Rlambda(lam), M, k, vs, arrows, [vs[0]])


def build_component(spec: ComponentId, truncation: int, k: CyclicQuiver) -> ComponentQuiver:
    """Q_m^P, Q_m^I (``truncation`` = m) or a tube Q_M^σ (``truncation`` = M)."""
    if truncation < 0:
        raise ValueError("truncation must be nonnegative")
    if spec == P:
        return _build_p(truncation, k)
    if spec == I:
        return _build_p(truncation, k, "I")
    if spec == R0:
        return _build_t0(truncation, k)
    if spec == RINF:
        return _build_tinf(truncation, k)
    return _build_lambda(spec.lam, truncation, k)


def t0_attach(x: int, M: int, k: CyclicQuiver) -> Vertex:
    """Target of iota_0(x): the ρ-chain below the top vertex (gM+g, g)_0."""
    g = k.g
    return Vertex("T0", g * M + g - x, g)


def tinf_attach(y: int, M: int, k: CyclicQuiver) -> Vertex:
    """Target of iota_inf(y) for y in {0, g, ..., n}."""
    h, n = k.h, k.n
    j = 0 if y == 0 else n + 1 - y
    return Vertex("Tinf", h * (M + 1) - j, 0)


def reflect_s(v: Vertex, k: CyclicQuiver) -> Vertex:
    """The reflection S of Q_m (an involution)."""
    if v.kind == "P":
        return Vertex("I", v.r, v.s)
    if v.kind == "I":
        return Vertex("P", v.r, v.s)
    if v.kind == "T0":
        return Vertex("T0", v.r, (v.r - v.s - 1) % k.g + 1)
    if v.kind == "Tinf":
        return Vertex("Tinf", v.r, (-v.r - v.s) % k.h)
    return v


class AssembledQuiver(Quiver):
    """Q_m: Q_m^P, Q_m^I and the tubes Q_{2m(n+1)}^σ plus connecting arrows."""

    def __init__(self, m: int, lambdas: Sequence, k: CyclicQuiver):
        self.m = m
        self.k = k
        self.lambdas = tuple(lambdas)
        self.M = tube_size(m, k)
        g, h, n = k.g, k.h, k.n
        M = self.M
        parts = {"P": build_component(P, m, k), "T0": build_component(R0, M, k),
                 "Tinf": build_component(RINF, M, k)}
        for lam in self.lambdas:
            parts[("L", lam)] = build_component(Rlambda(lam), M, k)
        parts["I"] = build_component(I, m, k)
        self.parts = parts
        top = g * h * m
        self.top = top
        conn = []
        for x in range(g + 1):
            t = t0_attach(x, M, k)
            conn.append(Arrow(f"iota_0({x})", Vertex("P", top, x), t))
            conn.append(Arrow(f"kappa_0({x})", reflect_s(t, k), Vertex("I", top, x)))
        for y in [0] + list(range(g, n + 1)):
            t = tinf_attach(y, M, k)
            conn.append(Arrow(f"iota_inf({y})", Vertex("P", top, y), t))
            conn.append(Arrow(f"kappa_inf({y})", reflect_s(t, k), Vertex("I", top, y)))
        for lam in self.lambdas:
            t = Vertex("L", M + 2, 0, lam)
            conn.append(Arrow(f"iota_lambda({lam})", Vertex("P", top, 0), t))
            conn.append(Arrow(f"kappa_lambda({lam})", t, Vertex("I", top, 0)))
        self.connecting = tuple(conn)
        verts = [v for part in parts.values() for v in part.vertices]
        arrows = [a for part in parts.values() for a in part.arrows] + conn
        super().__init__(sorted(verts, key=Vertex.sort_key), arrows)

    @property
    def apex(self) -> Vertex:
        """(ghm, 0)_P, the vertex excluded from the diamond relations."""
        return Vertex("P", self.top, 0)

    def part_of(self, v: Vertex):
        return ("L", v.lam) if v.kind == "L" else v.kind

    def __repr__(self):
        return (f"AssembledQuiver(m={self.m}, g={self.k.g}, h={self.k.h}, "
                f"lambdas={list(self.lambdas)}, {len(self.vertices)} vertices, "
                f"{len(self.arrows)} arrows)")


def assemble_qm(m: int, lambdas: Sequence, k: CyclicQuiver) -> AssembledQuiver:
    if m < 0:
        raise ValueError("m must be nonnegative")
    lambdas = list(lambdas)
    if not lambdas:
        raise ValueError("at least one λ is required")
    if any(lam == 0 for lam in lambdas):
        raise ValueError("λ = 0 is not a homogeneous tube parameter")
    if len(set(lambdas)) != len(lambdas):
        raise ValueError("duplicate λ values")
    return AssembledQuiver(m, lambdas, k)


def reflect_arrow(a: Arrow, q: Quiver, k: CyclicQuiver) -> Arrow:
    """The arrow S(a) : S(tgt) -> S(src)."""
    cands = q.arrows_between(reflect_s(a.tgt, k), reflect_s(a.src, k))
    if len(cands) != 1:
        raise ValueError(f"no unique reflected arrow for {a.name}")
    return cands[0]


@dataclass(frozen=True)
class Diamond:
    """Two length-2 paths X -> Y1 -> Z and X -> Y2 -> Z with Y1 != Y2."""

    x: object
    y1: object
    y2: object
    z: object
    gamma: str
    gammaP: str
    delta: str
    deltaP: str

    def __str__(self):
        return f"{self.gammaP}∘{self.gamma} = {self.deltaP}∘{self.delta}"


def enumerate_diamonds(q: Quiver, exclude: Iterable = None) -> tuple[list[Diamond], list[Diamond]]:
    """All pairs of parallel 2-paths with distinct middle vertices.

    X = Z is allowed.  Diamonds starting at a vertex in ``exclude`` (by
    default the apex (ghm, 0)_P of an assembled quiver) go into the second
    list.
    """
    if exclude is None:
        exclude = [q.apex] if isinstance(q, AssembledQuiver) else []
    exclude = set(exclude)
    keep, excluded = [], []
    for x in q.vertices:
        by_end = defaultdict(list)
        for a in q.out_arrows(x):
            for b in q.out_arrows(a.tgt):
                by_end[b.tgt].append((a, b))
        for z in sorted(by_end, key=lambda v: v.sort_key() if isinstance(v, Vertex) else v):
            paths = by_end[z]
            for i in range(len(paths)):
                for j in range(i + 1, len(paths)):
                    (a1, b1), (a2, b2) = paths[i], paths[j]
                    if a1.tgt == a2.tgt:
                        continue
                    d = Diamond(x, a1.tgt, a2.tgt, z, a1.name, b1.name, a2.name, b2.name)
                    (excluded if x in exclude else keep).append(d)
    return keep, excluded
