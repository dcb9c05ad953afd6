"""Command line: ``linfty check|transfer|decompose|deform|trees|correspond``.

Exit codes: 0 when every requested identity holds, 1 on a mathematical
failure, 2 on usage or parse errors.
"""

import argparse
import json
import os
import sys
from pathlib import Path

from . import io
from .algebra import (DGL, LInftyAlgebra, LInftyMorphism, PreconditionError, check_linfty,
                      check_lmorphism)
from .coalgebra import (check_equivariance, check_square_zero, compose_formal,
                        identity_morphism)
from .deformation import (DEFAULT_ARITY, DEFAULT_POLY, Deformation, FormalDGManifold,
                          check_window_morphism, correspondence_to_deformation,
                          correspondence_to_morphism, semiuniversal_deformation, tangent_complex,
                          universal_deformation)
from .trees import enumerate_ot, node_value, sign_e, weight_w

PASS, FAIL, NA = "pass", "fail", "not-applicable"


class UsageError(Exception):
    pass


# -- reports -------------------------------------------------------------------------------------

def _labels(module, word):
    return [module.labels[i] for i in word]


def _residual(module, vec):
    return {module.labels[j]: io.format_rational(c) for j, c in sorted(vec.items())}


def failure_record(failure, source, target):
    """``(arity, word, residual)`` as JSON, or a message string."""
    if failure is None:
        return None
    if isinstance(failure, str):
        return {"message": failure}
    n, word, vec = failure
    return {"component": n, "basis": _labels(source, word), "residual": _residual(target, vec)}


def report(command, status, first_failure=None, provenance=None, outputs=None):
    out = {"command": command, "status": status, "first_failure": first_failure,
           "provenance": provenance or {}}
    if outputs:
        out["outputs"] = outputs
    return out


def emit(rep, fmt):
    if fmt == "json":
        sys.stdout.write(json.dumps(rep, indent=2, sort_keys=True) + "\n")
        return
    lines = [f"{rep['command']}: {rep['status']}"]
    ff = rep.get("first_failure")
    if ff:
        if "message" in ff:
            lines.append(f"  first failure: {ff['message']}")
        else:
            lines.append(f"  first failure: arity {ff['component']} on ({', '.join(ff['basis'])})"
                         f" residual {ff['residual']}")
    for key in sorted(rep.get("provenance", {})):
        lines.append(f"  {key}: {json.dumps(rep['provenance'][key], sort_keys=True)}")
    for path in rep.get("outputs", []):
        lines.append(f"  wrote {path}")
    sys.stdout.write("\n".join(lines) + "\n")


def _exit(rep):
    return {PASS: 0, NA: 0}.get(rep["status"], 1)


# -- shared option handling --------------------------------------------------------------------------

def _arity(args, default=DEFAULT_ARITY, doc=None):
    A = args.arity
    if A is None and doc is not None:
        A = doc.get("options", {}).get("arity")
    A = A or default
    cap = os.environ.get("LINFTY_MAX_ARITY")
    if cap:
        try:
            cap = int(cap)
        except ValueError:
            raise UsageError(f"LINFTY_MAX_ARITY must be an integer, got {cap!r}") from None
        if A > cap:
            raise UsageError(f"arity {A} exceeds LINFTY_MAX_ARITY={cap}")
    if A < 1:
        raise UsageError("arity must be positive")
    return A


def _poly(args, doc=None):
    P = args.poly_degree
    if P is None and doc is not None:
        P = doc.get("options", {}).get("poly_degree")
    return DEFAULT_POLY if P is None else P


def _out_path(args, src, suffix):
    out = Path(args.output_dir or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out / (Path(src).name.removesuffix(".json") + suffix)


def _bounds(A, P=None, seed=None):
    b = {"arity": A}
    if P is not None:
        b["poly_degree"] = P
    if seed is not None:
        b["seed"] = seed
    return b


# -- commands ---------------------------------------------------------------------------------------

def _check_object(obj, A):
    """``(status, failure, source, target)`` for any loaded object."""
    if isinstance(obj, DGL):
        for name, m in (("d", obj.d), ("bracket", obj.bracket)):
            if m.check_degree():
                return FAIL, f"{name} is not homogeneous", None, None
        rep = check_linfty(obj.as_linfty(max(A, 3)), max(A, 3))
        return (PASS if rep else FAIL), rep.failure, obj.module, obj.module
    if isinstance(obj, LInftyAlgebra):
        rep = check_linfty(obj, A)
        return (PASS if rep else FAIL), rep.failure, obj.module, obj.module
    if isinstance(obj, LInftyMorphism):
        for alg in (obj.source, obj.target):
            rep = check_linfty(alg, A)
            if not rep:
                return FAIL, rep.failure, alg.module, alg.module
        rep = check_lmorphism(obj, "coalgebra", A)
        return (PASS if rep else FAIL), rep.failure, obj.source.module, obj.target.module
    if isinstance(obj, FormalDGManifold):
        rep = check_square_zero(obj.Q.truncate(A))
        return (PASS if rep else FAIL), rep.failure, obj.space, obj.space
    if isinstance(obj, tuple):
        F, src, tgt = obj
        for M in (src, tgt):
            rep = check_square_zero(M.Q.truncate(A))
            if not rep:
                return FAIL, rep.failure, M.space, M.space
        rep = check_equivariance(F.truncate(A), src.Q.truncate(A), tgt.Q.truncate(A), A)
        return (PASS if rep else FAIL), rep.failure, src.space, tgt.space
    if isinstance(obj, Deformation):
        bad = obj.axiom_failure()
        return (PASS if bad is None else FAIL), bad, None, None
    raise UsageError(f"cannot check {type(obj).__name__}")


def cmd_check(args):
    doc = io.read_document(args.path)
    A = _arity(args, doc=doc)
    obj = io.from_document(doc, A, args.seed)
    status, failure, src, tgt = _check_object(obj, A)
    return report("check", status, failure_record(failure, src, tgt),
                  {"kind": doc["kind"], "bounds": _bounds(A, seed=args.seed)})


def _load_dgl(args, doc):
    A = _arity(args, doc=doc)
    dgl = io.from_document(doc, A, args.seed)
    if not isinstance(dgl, DGL):
        raise UsageError("this command needs a DGL document")
    bad = dgl.axiom_failure()
    return dgl, A, bad


def cmd_transfer(args):
    from .transfer import transfer

    doc = io.read_document(args.path)
    dgl, A, bad = _load_dgl(args, doc)
    if bad:
        return report("transfer", FAIL, {"message": bad})
    if A < 2:
        raise UsageError("transfer needs --arity >= 2")
    hd, mm, f = transfer(dgl, max_arity=A)
    rep_mm = check_linfty(mm, A)
    rep_f = check_lmorphism(f, "coalgebra", A)
    meta = {"arity": A, "truncated": True, "splitting": hd.splitting.pivots}
    p1 = io.write_document(io.linfty_document(mm, meta), _out_path(args, args.path, ".minimal.json"))
    p2 = io.write_document(io.morphism_document(f, meta), _out_path(args, args.path, ".morphism.json"))
    status = PASS if rep_mm and rep_f else FAIL
    failure = None
    if not rep_mm:
        failure = failure_record(rep_mm.failure, mm.module, mm.module)
    elif not rep_f:
        failure = failure_record(rep_f.failure, f.source.module, f.target.module)
    prov = {"bounds": _bounds(A, seed=args.seed), "splitting": hd.splitting.pivots,
            "homology": list(mm.module.labels)}
    return report("transfer", status, failure, prov, [str(p1), str(p2)])


def cmd_decompose(args):
    from .transfer import decompose

    doc = io.read_document(args.path)
    dgl, A, bad = _load_dgl(args, doc)
    if bad:
        return report("decompose", FAIL, {"message": bad})
    if A < 2:
        raise UsageError("decompose needs --arity >= 2")
    dec = decompose(dgl, max_arity=A)
    ident_t = compose_formal(dec.phi, dec.phi_inv) == identity_morphism(dec.target.module, A)
    ident_s = compose_formal(dec.phi_inv, dec.phi) == identity_morphism(dec.product.module, A)
    equiv = check_equivariance(dec.phi, dec.product, dec.target, A)
    conj = dec.conjugated() == dec.product
    checks = {"morphism": bool(equiv), "phi o phi^-1 = Id": ident_t, "phi^-1 o phi = Id": ident_s,
              "conjugate = product": conj}
    path = io.write_document(
        io.formal_morphism_document(dec.phi, dec.product, dec.target,
                                    {"arity": A, "splitting": dec.hd.splitting.pivots}),
        _out_path(args, args.path, ".decomposition.json"))
    status = PASS if all(checks.values()) else FAIL
    failure = None if status == PASS else {"message": ", ".join(k for k, v in checks.items() if not v)}
    prov = {"bounds": _bounds(A), "checks": checks, "splitting": dec.hd.splitting.pivots,
            "H": list(dec.hd.H.labels), "F": list(dec.hd.F.labels)}
    return report("decompose", status, failure, prov, [str(path)])


def _load_manifold(args):
    doc = io.read_document(args.path)
    A = _arity(args, doc=doc)
    P = _poly(args, doc)
    M = io.from_document(doc, A)
    if not isinstance(M, FormalDGManifold):
        raise UsageError("this command needs a manifold document")
    rep = check_square_zero(M.Q.truncate(A))
    if not rep:
        return None, A, P, rep
    return FormalDGManifold(M.space, M.Q.truncate(A)), A, P, rep


def cmd_deform(args):
    M, A, P, rep = _load_manifold(args)
    if M is None:
        n, word, vec = rep.failure
        return report("deform", FAIL, {"message": f"[Q,Q] != 0 in arity {n}"})
    tc = tangent_complex(M, P)
    if args.semiuniversal:
        d, F = semiuniversal_deformation(M, A, P, tc=tc)
        suffix, kind = ".semiuniversal.json", "semiuniversal"
    else:
        d = universal_deformation(M, A, P, tc=tc)
        suffix, kind = ".universal.json", "universal"
    bad = d.axiom_failure()
    meta = {"window": {"arity": A, "poly_degree": P}, "tangent_dim": tc.module.dim,
            "constants": tc.with_constants, "deformation": kind}
    path = io.write_document(io.deformation_document(d, meta), _out_path(args, args.path, suffix))
    prov = {"bounds": _bounds(A, P), "base_dim": d.base.space.dim, "tangent_dim": tc.module.dim}
    return report("deform", PASS if bad is None else FAIL, None if bad is None else {"message": bad},
                  prov, [str(path)])


def cmd_correspond(args):
    doc = io.read_document(args.path)
    A = _arity(args, doc=doc)
    P = _poly(args, doc)
    obj = io.from_document(doc, A)
    if isinstance(obj, Deformation):
        bad = obj.axiom_failure()
        if bad:
            return report("correspond", FAIL, {"message": bad})
        tc = tangent_complex(obj.fiber, P)
        F = correspondence_to_morphism(obj, tc, A)
        rep = check_window_morphism(F, obj.base.Q, tc, A)
        back = correspondence_to_deformation(F, obj.base, tc, A, check=False)
        roundtrip = all(back.Q.comp(n).entries == obj.Q.comp(n).entries for n in range(1, A + 1))
        QU = tc.dgl.as_linfty(A).shifted
        path = io.write_document(
            io.formal_morphism_document(F, obj.base.Q, QU, {"window": {"arity": A, "poly_degree": P}}),
            _out_path(args, args.path, ".correspondence.json"))
        status = PASS if rep and roundtrip else FAIL
        failure = None
        if not rep:
            failure = failure_record(rep.failure, F.source, F.target)
        elif not roundtrip:
            failure = {"message": "roundtrip does not reproduce the deformation"}
        return report("correspond", status, failure,
                      {"bounds": _bounds(A, P), "roundtrip": roundtrip}, [str(path)])
    if isinstance(obj, tuple):
        if not args.fiber:
            raise UsageError("a morphism document needs --fiber MANIFOLD.json")
        F, base, _ = obj
        fdoc = io.read_document(args.fiber)
        M = io.from_document(fdoc, A)
        tc = tangent_complex(FormalDGManifold(M.space, M.Q.truncate(A)), P)
        if F.target != tc.module.shift():
            raise UsageError("the morphism target is not the tangent complex of the fiber")
        base = FormalDGManifold(base.space, base.Q)
        d = correspondence_to_deformation(F, base, tc, A, check=False)
        bad = d.axiom_failure()
        path = io.write_document(io.deformation_document(d), _out_path(args, args.path, ".deformation.json"))
        return report("correspond", PASS if bad is None else FAIL,
                      None if bad is None else {"message": bad}, {"bounds": _bounds(A, P)}, [str(path)])
    raise UsageError("correspond needs a deformation or a morphism document")


def cmd_trees(args):
    n = args.leaves
    if n < 1:
        raise UsageError("--leaves must be at least 1")
    trees = enumerate_ot(n)
    rows = []
    for t in trees:
        row = {"tree": t.literal()}
        if args.invariants:
            row["e"] = sign_e(t)
            row["v"] = {p or "root": str(node_value(t, p)[1]) for p in t.ramifications}
            row["w"] = [weight_w(t, i) for i in range(1, n + 1)]
        rows.append(row)
    if args.format == "json":
        sys.stdout.write(json.dumps({"leaves": n, "trees": rows, "count": len(rows)}, indent=2) + "\n")
    else:
        for row in rows:
            if args.invariants:
                v = " ".join(f"{k}={x}" for k, x in row["v"].items())
                w = ",".join(str(x) for x in row["w"])
                sys.stdout.write(f"{row['tree']}  e={row['e']:+d}  w=({w})  v: {v}\n")
            else:
                sys.stdout.write(row["tree"] + "\n")
        sys.stdout.write(f"count {len(rows)}\n")
    return None


# -- entry point ------------------------------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--arity", type=int, help="arity bound A (capped by LINFTY_MAX_ARITY)")
    common.add_argument("--poly-degree", type=int, help="polynomial bound P of the tangent window")
    common.add_argument("--seed", type=int, help="seed for random_dgl documents")
    common.add_argument("--output-dir", help="where output documents go (default: current directory)")
    common.add_argument("--format", choices=("json", "text"), default="text")

    parser = argparse.ArgumentParser(prog="linfty", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("check", parents=[common], help="verify the identities of a document")
    p.add_argument("path")
    p = sub.add_parser("transfer", parents=[common], help="minimal model and transfer morphism")
    p.add_argument("path")
    p = sub.add_parser("decompose", parents=[common], help="isomorphism H x F -> L")
    p.add_argument("path")
    p = sub.add_parser("deform", parents=[common], help="universal or semiuniversal deformation")
    p.add_argument("path")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--universal", action="store_true")
    g.add_argument("--semiuniversal", action="store_true")
    p = sub.add_parser("trees", parents=[common], help="list the oriented trees with n leaves")
    p.add_argument("--leaves", type=int, required=True)
    p.add_argument("--invariants", action="store_true", help="show e, w and v")
    p = sub.add_parser("correspond", parents=[common], help="deformation <-> morphism into U")
    p.add_argument("path")
    p.add_argument("--fiber", help="fiber manifold document (morphism -> deformation)")
    return parser


COMMANDS = {"check": cmd_check, "transfer": cmd_transfer, "decompose": cmd_decompose,
            "deform": cmd_deform, "trees": cmd_trees, "correspond": cmd_correspond}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        rep = COMMANDS[args.command](args)
    except (UsageError, io.DocumentError, PreconditionError) as exc:
        sys.stderr.write(f"linfty {args.command}: {exc}\n")
        return 2
    if rep is None:
        return 0
    emit(rep, args.format)
    return _exit(rep)


if __name__ == "__main__":
    sys.exit(main())
