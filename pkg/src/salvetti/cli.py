"""Command line interface.

Exit status: 0 on success, 1 when a verification fails, 2 on input errors.
The worker count for per-k page blocks comes from ``SALVETTI_WORKERS``.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from pathlib import Path

from . import __version__
from .arrangement import (
    Arrangement,
    ArrangementError,
    avoids_all_hyperplanes,
    braid_arrangement,
    circuits,
    cocircuits,
    covectors,
    embed_vertex,
    face_records,
    representative_map,
)
from .braid import (
    BraidError,
    GradedModule,
    all_symbols,
    build_pages,
    d1_squared_zero,
    equivariant_complex,
    pages_json,
    render_symbol,
)
from .complexes import (
    Coefficients,
    ComplexError,
    betti_csv,
    chain_complex,
    order_complex,
    salvetti_cw,
    skeletal_filtration,
    smith_homology,
)
from .matroid import (
    MAX_FACES_FROM_CIRCUITS,
    FaceOrder,
    build_L_ell,
    check_circuit_axioms,
    check_covector_axioms,
    check_symmetric_ell_axioms,
    faces_from_circuits,
    tensor_by_chains,
)
from .signs import SignError

MAX_HYPERPLANES = 15
MAX_K = 6
MAX_ELL = 3
SIMPLICIAL_LIMIT = 400  # cells above which the simplicial oracle is skipped


class InputError(ValueError):
    pass


CONVENTIONS = {
    "braid_normals": "e_i - e_j for i < j; the identity chamber has covector all minus",
    "encoding": "chamber at level 1, deeper faces at higher levels",
    "sign_text": "sign then level, e.g. +2 0 -1",
    "cell_dimension": "sum of codimensions of the chain faces",
}


def _meta(args, **extra) -> dict:
    config = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out")}
    conv = dict(CONVENTIONS)
    conv.update(extra)
    return {"tool": "salvetti", "version": __version__, "command": args.command, "config": config, "conventions": conv}


def ingest_arrangement(spec: str) -> Arrangement:
    """A builtin ``braid:k`` or a JSON file."""
    if spec.startswith("braid:"):
        try:
            k = int(spec.split(":", 1)[1])
        except ValueError as exc:
            raise InputError(f"bad builtin {spec!r}") from exc
        if not 2 <= k <= MAX_K:
            raise InputError(f"braid:k needs 2 <= k <= {MAX_K}")
        return braid_arrangement(k)
    path = Path(spec)
    if not path.exists():
        raise InputError(f"no such file: {spec}")
    a = Arrangement.loads(path.read_text())
    if a.n > MAX_HYPERPLANES:
        raise InputError(f"{a.n} hyperplanes exceed the cap of {MAX_HYPERPLANES}")
    return a


def _coefficients(text: str) -> Coefficients:
    try:
        return Coefficients.parse(text)
    except ComplexError as exc:
        raise InputError(str(exc)) from exc


def _check_ell(ell: int, low: int = 0):
    if not low <= ell <= MAX_ELL:
        raise InputError(f"ell={ell} outside {low}..{MAX_ELL}")


def _emit(args, text: str):
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=1) + "\n"


def _point(p) -> list[str]:
    return [str(x) for x in p]


# -- commands -------------------------------------------------------------------

def cmd_faces(args) -> int:
    a = ingest_arrangement(args.input)
    l = covectors(a, verify=a.n <= MAX_FACES_FROM_CIRCUITS)
    recs = face_records(a)
    out = {
        "meta": _meta(args),
        "arrangement": a.to_json(),
        "duplicate_normals": a.duplicates,
        "cocircuits": [c.tokens() for c in cocircuits(a)],
        "covectors": l.to_json(),
        "faces": [{"covector": r.covector.tokens(), "codim": r.codim, "point": _point(r.representative)} for r in recs],
    }
    if a.n <= 14:
        out["circuits"] = circuits(a).to_json()
    _emit(args, _dump(out))
    return 0


def _build(a: Arrangement, ell: int):
    l = covectors(a)
    order = FaceOrder.build(l)
    hf = build_L_ell(l, ell, order)
    return l, hf


def cmd_salvetti(args) -> int:
    _check_ell(args.ell)
    a = ingest_arrangement(args.input)
    _, hf = _build(a, args.ell)
    cw = salvetti_cw(hf)
    reps = representative_map(a)
    vertices = []
    avoid = True
    for i in range(len(hf)):
        comps = embed_vertex(hf.chain_vectors(i), reps)
        ok = avoids_all_hyperplanes(a, comps)
        avoid &= ok
        vertices.append({"id": i, "components": [_point(c) for c in comps], "avoids": ok})
    out = {
        "meta": _meta(args),
        "n_cells": len(cw),
        "f_vector": list(cw.f_vector()),
        "euler_characteristic": cw.euler_characteristic(),
        "boundary_squared_zero": cw.check_boundary_squared(),
        "embedding_avoids_hyperplanes": avoid,
        "cells": cw.to_json()["cells"],
        "vertices": vertices,
    }
    _emit(args, _dump(out))
    return 0


def cmd_homology(args) -> int:
    _check_ell(args.ell)
    a = ingest_arrangement(args.input)
    coeff = _coefficients(args.coeff)
    _, hf = _build(a, args.ell)
    cw = salvetti_cw(hf)
    lines = ["# " + json.dumps(_meta(args), sort_keys=True)]
    cell = smith_homology(chain_complex(cw, coeff))
    lines.append("# cellular")
    lines.append(betti_csv(cell).rstrip("\n"))
    if args.simplicial or (args.simplicial is None and len(hf) <= SIMPLICIAL_LIMIT):
        simp = smith_homology(chain_complex(order_complex(hf.poset()), coeff))
        lines.append("# simplicial")
        lines.append(betti_csv(simp).rstrip("\n"))
        if _trim(g.betti for g in simp) != _trim(g.betti for g in cell):
            lines.append("# MISMATCH between cellular and simplicial Betti numbers")
            _emit(args, "\n".join(lines) + "\n")
            return 1
    _emit(args, "\n".join(lines) + "\n")
    return 0


def _trim(b):
    b = list(b)
    while b and b[-1] == 0:
        b.pop()
    return b


def cmd_filtration(args) -> int:
    a = ingest_arrangement(args.input)
    if a.braid_k is None:
        raise InputError("filtration needs a braid:k input")
    k = a.braid_k
    _, hf = _build(a, 1)
    cw = salvetti_cw(hf)
    stages = skeletal_filtration(cw, k)
    out = {
        "meta": _meta(args),
        "k": k,
        "stages": [{"s": st.s, "cells": len(st.cells), "skeleton_dim": k - st.s} for st in stages],
    }
    _emit(args, _dump(out))
    return 0


def _parse_degrees(text: str) -> tuple[int, ...]:
    try:
        degs = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise InputError(f"bad generator degrees {text!r}") from exc
    if not degs or any(d < 0 for d in degs):
        raise InputError("generator degrees must be a nonempty list of integers >= 0")
    return degs


def cmd_pages(args) -> int:
    _check_ell(args.ell, 1)
    coeff = _coefficients(args.coeff)
    if not coeff.is_field:
        raise InputError("E2 needs field coefficients (Q or Fp:p)")
    if not 1 <= args.k_max <= MAX_K:
        raise InputError(f"k-max must be in 1..{MAX_K}")
    gm = GradedModule(_parse_degrees(args.coeffs), coeff)
    workers = int(os.environ.get("SALVETTI_WORKERS", "1") or 1)
    blocks = build_pages(gm, args.k_max, args.ell, args.normalization, args.koszul, workers)
    out = {
        "meta": _meta(args, koszul=args.koszul, normalization=args.normalization,
                      d1_sign="(-1)^(i-1) for a split of the i-th block, times the shuffle sign"),
        "blocks": pages_json(blocks),
    }
    _emit(args, _dump(out))
    return 0


def cmd_symbols(args) -> int:
    if not 2 <= args.k <= 4:
        raise InputError("symbols are rendered for 2 <= k <= 4")
    chunks = []
    for lam, sigma in all_symbols(args.k):
        chunks.append(f"{lam} {sigma}\n{render_symbol(lam, sigma)}")
    _emit(args, "\n\n".join(chunks) + "\n")
    return 0


def cmd_verify(args) -> int:
    _check_ell(args.ell)
    a = ingest_arrangement(args.input)
    rng = random.Random(args.seed)
    report: list[tuple[str, bool]] = []
    notes: list[str] = []

    l = covectors(a)
    report.append(("covector axioms", check_covector_axioms(l).passed))
    if a.n <= 14:
        report.append(("circuit axioms", check_circuit_axioms(circuits(a)).passed))
    if a.n <= MAX_FACES_FROM_CIRCUITS:
        report.append(("covectors = faces from circuits", faces_from_circuits(circuits(a)).vectors == l.vectors))
    order = FaceOrder.build(l)
    for lev in range(1, args.ell + 2):
        t = tensor_by_chains(order, lev)
        rep = check_symmetric_ell_axioms(t)
        others = rep.axioms_violated() - {"L2-level-permutation"}
        report.append((f"l-matroid axioms (zero, negation, composition, elimination) for L(x)R^{lev}", not others))
        if "L2-level-permutation" in rep.axioms_violated():
            notes.append(f"L(x)R^{lev} is not closed under level permutations "
                         f"(e.g. {rep.violations[0][1][0]}); recorded as a known finding")
    hf = build_L_ell(l, args.ell, order)
    cw = salvetti_cw(hf)
    report.append(("boundary squares to zero", cw.check_boundary_squared()))
    if len(hf) <= SIMPLICIAL_LIMIT:
        cell = _trim(g.betti for g in smith_homology(chain_complex(cw)))
        simp = _trim(g.betti for g in smith_homology(chain_complex(order_complex(hf.poset()))))
        report.append((f"cellular Betti {cell} = simplicial Betti {simp}", cell == simp))
    reps = representative_map(a)
    report.append(("embedding avoids every hyperplane",
                   all(avoids_all_hyperplanes(a, embed_vertex(hf.chain_vectors(i), reps)) for i in range(len(hf)))))
    if a.braid_k is not None:
        k = a.braid_k
        if args.ell == 1:
            try:
                skeletal_filtration(cw, k)
                report.append(("skeletal filtration = skeleta", True))
            except ComplexError:
                report.append(("skeletal filtration = skeleta", False))
        if k <= 5:
            eq = equivariant_complex(k, args.ell, hf)
            report.append(("equivariant boundary expands to the cellular one", eq.matches(cw)))
        if k <= 5:
            degrees = tuple(rng.randint(0, 3) for _ in range(2))
            ok = True
            for koszul in (True, False):
                ok &= d1_squared_zero(k, degrees, koszul)
            report.append((f"d1 o d1 = 0 (generator degrees {degrees})", ok))
    lines = ["# " + json.dumps(_meta(args), sort_keys=True)]
    for name, ok in report:
        lines.append(f"{'PASS' if ok else 'FAIL'}  {name}")
    for n in notes:
        lines.append(f"NOTE  {n}")
    passed = all(ok for _, ok in report)
    lines.append("verification " + ("passed" if passed else "FAILED"))
    _emit(args, "\n".join(lines) + "\n")
    return 0 if passed else 1


# -- parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="salvetti", description="Higher order Salvetti complexes of real arrangements.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, ell_default=1):
        sp.add_argument("--input", default="braid:3", help="JSON arrangement file or braid:k (default braid:3)")
        sp.add_argument("--ell", type=int, default=ell_default, help="order of the Salvetti complex")
        sp.add_argument("--out", help="write output here instead of stdout")

    sp = sub.add_parser("faces", help="covectors, circuits and cocircuits")
    common(sp)
    sp.set_defaults(func=cmd_faces)

    sp = sub.add_parser("salvetti", help="build the complex and export cells and vertex coordinates")
    common(sp)
    sp.set_defaults(func=cmd_salvetti)

    sp = sub.add_parser("homology", help="Betti numbers and torsion (CSV)")
    common(sp)
    sp.add_argument("--coeff", default="Z", help="Z, Q or Fp:p")
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--simplicial", dest="simplicial", action="store_true", default=None,
                   help="always run the order complex oracle")
    g.add_argument("--no-simplicial", dest="simplicial", action="store_false")
    sp.set_defaults(func=cmd_homology)

    sp = sub.add_parser("filtration", help="cell counts of the skeletal filtration")
    common(sp)
    sp.set_defaults(func=cmd_filtration)

    sp = sub.add_parser("pages", help="E1 and E2 pages of the loop space spectral sequence")
    sp.add_argument("--ell", type=int, default=2, help="loop order (uses the order l - 1 complex)")
    sp.add_argument("--coeffs", default="0", help="comma separated degrees of reduced homology generators of X")
    sp.add_argument("--coeff", default="Q", help="Q or Fp:p")
    sp.add_argument("--k-max", dest="k_max", type=int, default=3)
    sp.add_argument("--normalization", choices=("unshifted", "shifted"), default="unshifted")
    sp.add_argument("--koszul", action=argparse.BooleanOptionalAction, default=True)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_pages)

    sp = sub.add_parser("symbols", help="render cube symbols of the vertices")
    sp.add_argument("--k", type=int, default=3)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_symbols)

    sp = sub.add_parser("verify", help="axioms, oracles and invariants")
    common(sp)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return args.func(args)
    except (InputError, ArrangementError, SignError, BraidError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ComplexError as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
