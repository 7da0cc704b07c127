"""Command line interface and the JSON / DOT formats.

Exit codes: 0 success, 1 verification failures, 2 usage or argument
errors, 3 decomposition incomplete.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path
from typing import Sequence

from .exactlin import Field, Mat, PrimeField, Rationals, parse_field
from .functors import InternalConsistencyError, component_image, locate, phi_m
from .quivers import (
    I,
    P,
    R0,
    RINF,
    UnsupportedSizeError,
    assemble_qm,
    build_component,
    build_k,
    classify_walk,
    tube_size,
)
from .relations import (
    RelationReport,
    check_hauptsatz,
    check_hom_proposition,
    check_remarks,
)
from .reps import (
    BandSpec,
    DecompositionError,
    Representation,
    band_rep,
    decompose,
    g_perm,
    hom_basis,
    walk_rep,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_DECOMP = 0, 1, 2, 3


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- serialization


def field_from_json(obj: dict) -> Field:
    kind = obj.get("kind")
    if kind == "fp":
        return PrimeField(int(obj["p"]))
    if kind == "q":
        return Rationals()
    raise ValueError(f"unknown field kind {kind!r}")


def rep_to_json(v: Representation) -> dict:
    k, f = v.quiver, v.field
    return {
        "g": k.g,
        "h": k.h,
        "field": f.to_json(),
        "dims": list(v.dims),
        "maps": {
            a.name: {
                "rows": v.maps[a.name].rows,
                "cols": v.maps[a.name].cols,
                "entries": [f.format(e) for e in v.maps[a.name].entries()],
            }
            for a in k.arrows
        },
    }


def rep_from_json(obj: dict) -> Representation:
    k = build_k(int(obj["g"]), int(obj["h"]))
    f = field_from_json(obj["field"])
    dims = [int(d) for d in obj["dims"]]
    maps = {}
    for name, m in obj.get("maps", {}).items():
        if not k.has_arrow(name):
            raise ValueError(f"unknown arrow {name!r}")
        maps[name] = Mat.from_entries(f, int(m["rows"]), int(m["cols"]), [f.parse(e) for e in m["entries"]])
    return Representation(k, f, dims, maps)


def dumps_rep(v: Representation) -> str:
    return json.dumps(rep_to_json(v), indent=2, ensure_ascii=False) + "\n"


def loads_rep(text: str) -> Representation:
    return rep_from_json(json.loads(text))


def format_label(x) -> str:
    if isinstance(x, BandSpec):
        return str(x)
    return f"({x[0]},{x[1]})"


# ---------------------------------------------------------------- export


def _dot_id(v) -> str:
    return json.dumps(v.label, ensure_ascii=False)


def quiver_to_dot(q, name: str = "Q") -> str:
    lines = [f"digraph {json.dumps(name)} {{", "  rankdir=LR;", "  node [shape=box, fontsize=10];"]
    groups: dict = {}
    for v in q.vertices:
        key = f"{v.kind}" + (f"_{v.lam}" if v.lam is not None else "")
        groups.setdefault(key, []).append(v)
    for i, (key, vs) in enumerate(groups.items()):
        lines.append(f"  subgraph \"cluster_{key}\" {{")
        lines.append(f"    label={json.dumps(key, ensure_ascii=False)};")
        for v in vs:
            lines.append(f"    {_dot_id(v)};")
        lines.append("  }")
    conn = {a.name for a in getattr(q, "connecting", ())}
    for a in q.arrows:
        style = ", style=dashed, color=red" if a.name in conn else ""
        lines.append(f"  {_dot_id(a.src)} -> {_dot_id(a.tgt)} [label={json.dumps(a.name, ensure_ascii=False)}{style}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def quiver_to_json(q, img=None) -> dict:
    verts = []
    for v in q.vertices:
        entry = {"id": v.label}
        if img is not None:
            entry["object"] = format_label(img.labels[v])
            entry["dims"] = list(img.objects[v].dims)
        verts.append(entry)
    conn = {a.name for a in getattr(q, "connecting", ())}
    arrows = [{"name": a.name, "source": a.src.label, "target": a.tgt.label,
               "connecting": a.name in conn} for a in q.arrows]
    return {"vertices": verts, "arrows": arrows}


# ---------------------------------------------------------------- commands


def _config(args) -> tuple:
    try:
        k = build_k(args.g, args.h)
    except UnsupportedSizeError as exc:
        raise UsageError(f"unsupported: {exc}") from exc
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    f = parse_field(args.field)
    return k, f


def _lambdas(text: str, f: Field) -> list:
    lams = [f.parse(t) for t in text.split(",") if t.strip()]
    if any(l == 0 for l in lams):
        raise UsageError("λ values must be nonzero")
    if len(set(lams)) != len(lams):
        raise UsageError("λ values must be pairwise distinct")
    return lams


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_build(args) -> int:
    k, f = _config(args)
    if args.kind == "walk":
        if args.p is None or args.q is None:
            raise UsageError("walk needs --p and --q")
        if args.p > args.q:
            raise UsageError("p ≤ q required")
        v = walk_rep((args.p, args.q), k, f)
    else:
        if args.lam is None or args.d is None:
            raise UsageError("band needs --lambda and --d")
        if args.d < 1:
            raise UsageError("d ≥ 1 required")
        v = band_rep(BandSpec(f.parse(args.lam), args.d), k, f)
    _emit(dumps_rep(v), args.out)
    return EXIT_OK


def _read_rep(path: str) -> Representation:
    try:
        return loads_rep(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def cmd_hom(args) -> int:
    v, w = _read_rep(args.v), _read_rep(args.w)
    if v.quiver != w.quiver or v.field != w.field:
        raise UsageError("representations live over different quivers or fields")
    basis = hom_basis(v, w)
    print(len(basis))
    if args.basis:
        f = v.field
        for i, b in enumerate(basis):
            comps = [[[f.format(e) for e in row] for row in c.tolist()] for c in b.comps]
            print(json.dumps({"index": i, "components": comps}, ensure_ascii=False))
    return EXIT_OK


def _reports_for(k, f, m: int, lams, with_hom: bool) -> list[RelationReport]:
    q = assemble_qm(m, lams, k)
    master = RelationReport("intertwining")
    try:
        img = phi_m(q, f)
        master.instances = len(img.morphisms)
    except InternalConsistencyError as exc:
        master.failures.append((str(exc), [], []))
        return [master]
    reports = [master] + check_hauptsatz(img) + check_remarks(img)
    if with_hom:
        reports += check_hom_proposition(m, k, f)
    return reports


def cmd_verify(args) -> int:
    k, f = _config(args)
    lams = _lambdas(args.lambdas, f)
    passes = [args.m] + ([0] if args.degenerate and args.m != 0 else [])
    out = {"g": k.g, "h": k.h, "field": str(f), "lambdas": [f.format(l) for l in lams],
           "G": g_perm(k), "passes": []}
    failed = False
    for m in passes:
        t0 = time.time()
        reports = _reports_for(k, f, m, lams, not args.skip_hom)
        dt = time.time() - t0
        print(f"# g={k.g} h={k.h} m={m} field={f} λ={','.join(f.format(l) for l in lams)}  ({dt:.1f}s)")
        print(f"# G table: {g_perm(k)}")
        for r in reports:
            print(r.summary())
            for d, _, _ in r.failures[:20]:
                print(f"    failed: {d}")
            for note in r.notes:
                print(f"    note: {note}")
        failed |= any(not r.ok for r in reports)
        out["passes"].append({"m": m, "seconds": round(dt, 3), "reports": [r.to_json() for r in reports]})
    if args.json:
        Path(args.json).write_text(json.dumps(out, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    print("RESULT:", "FAIL" if failed else "OK")
    return EXIT_FAIL if failed else EXIT_OK


_COMPONENTS = {"P": P, "I": I, "T0": R0, "Tinf": RINF}


def cmd_export(args) -> int:
    k, f = _config(args)
    if args.what == "assembled":
        lams = _lambdas(args.lambdas, f)
        q = assemble_qm(args.m, lams, k)
        img = phi_m(q, f) if args.with_objects else None
        name = f"Q_{args.m}"
    else:
        comp = args.component
        if comp.startswith("L:"):
            from .quivers import Rlambda

            spec = Rlambda(f.parse(comp[2:]))
        elif comp in _COMPONENTS:
            spec = _COMPONENTS[comp]
        else:
            raise UsageError(f"unknown component {comp!r}")
        trunc = args.truncation
        if trunc is None:
            trunc = args.m if spec in (P, I) else tube_size(args.m, k)
        q = build_component(spec, trunc, k)
        img = component_image(spec, trunc, k, f) if args.with_objects else None
        name = f"Q_{trunc}^{comp}"
    if args.format == "dot":
        text = quiver_to_dot(q, name)
    else:
        text = json.dumps(quiver_to_json(q, img), indent=2, ensure_ascii=False) + "\n"
    _emit(text, args.out)
    return EXIT_OK


def _label_key(x):
    return (1, str(x.lam), x.d) if isinstance(x, BandSpec) else (0, x[0], x[1])


def cmd_decompose(args) -> int:
    v = _read_rep(args.file)
    cands = None
    if args.lambdas:
        cands = [v.field.parse(t) for t in args.lambdas.split(",") if t.strip()]
    try:
        summands = decompose(v, cands)
    except DecompositionError as exc:
        print(f"decomposition incomplete: {exc}", file=sys.stderr)
        return EXIT_DECOMP
    items = sorted(summands.items(), key=lambda kv: _label_key(kv[0]))
    print(", ".join(f"{format_label(x)} ×{c}" for x, c in items))
    k = v.quiver
    for x, _ in items:
        kind = "band" if isinstance(x, BandSpec) else classify_walk(x, k).tag
        loc = locate(x, k, v.field)
        print(f"  {format_label(x)}: {kind}; {loc.vertex.label}; minimal m = {loc.m}")
    return EXIT_OK


# ---------------------------------------------------------------- parser


def _add_config(p, with_m=True):
    p.add_argument("--g", type=int, default=3)
    p.add_argument("--h", type=int, default=2)
    p.add_argument("--field", default="fp:101", help="fp:<prime> or q")
    if with_m:
        p.add_argument("--m", type=int, default=1)
        p.add_argument("--lambdas", default="1,2,3", help="comma separated nonzero field elements")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="atilde", description="Representations of the canonical Ã quivers K(g, h).")
    sub = ap.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="serialize a walk or band representation")
    b.add_argument("kind", choices=["walk", "band"])
    _add_config(b, with_m=False)
    b.add_argument("--p", type=int)
    b.add_argument("--q", type=int)
    b.add_argument("--lambda", dest="lam")
    b.add_argument("--d", type=int)
    b.add_argument("--out")
    b.set_defaults(func=cmd_build)

    h = sub.add_parser("hom", help="dimension (and basis) of Hom(V, W)")
    h.add_argument("v")
    h.add_argument("w")
    h.add_argument("--basis", action="store_true")
    h.set_defaults(func=cmd_hom)

    v = sub.add_parser("verify", help="check the functor and every relation of Q_m")
    _add_config(v)
    v.add_argument("--json", help="write the machine-readable report here")
    v.add_argument("--skip-hom", action="store_true", help="skip the Hom-count sweep")
    v.add_argument("--no-degenerate", dest="degenerate", action="store_false",
                   help="do not add the m = 0 pass")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("export", help="DOT or JSON description of a quiver")
    e.add_argument("what", choices=["component", "assembled"])
    _add_config(e)
    e.add_argument("--component", default="P", help="P, I, T0, Tinf or L:<λ>")
    e.add_argument("--truncation", type=int)
    e.add_argument("--format", choices=["dot", "json"], default="dot")
    e.add_argument("--with-objects", action="store_true")
    e.add_argument("--out")
    e.set_defaults(func=cmd_export)

    d = sub.add_parser("decompose", help="Krull-Schmidt decomposition of a serialized representation")
    d.add_argument("file")
    d.add_argument("--lambdas", help="band parameter candidates (default: all of F_p, or -10..10 over Q)")
    d.set_defaults(func=cmd_decompose)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
