"""Command line front end.

Exit codes: 0 success, 1 verification ran and failed, 2 usage error; every
library error class carries its own code (see ``scaledquat.errors``).
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import acceptance
from .constructors import (blaschke_circle, blaschke_line, blaschke_line_pair, brune_section,
                           theta_builder)
from .core import AlgebraContext, HtScalar
from .errors import DegenerateSubspace, HtError, KindMismatch, NotInvariant, PoleAt
from .factorization import additive_decomposition, eigen_subspaces, junitary_factor
from .io import NodeDocument, format_node_document, load_matrix, load_node, save_node
from .matrix import HtMatrix
from .realization import (evaluate, is_controllable, is_minimal, is_observable,
                          mcmillan_degree)
from .structured import (Certificate, Kind, doubled_certificate, make_phi_from_psi, solve_certificate,
                         verify_certificate)

EXIT_FAILED = 1
DEFAULT_TOL = 1e-8


def default_tol():
    v = os.environ.get("HT_TOL")
    return float(v) if v else DEFAULT_TOL


def _emit(args, payload, text):
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(text)


def _quads(M: HtMatrix):
    return M.quads().tolist()


def _fmt(M: HtMatrix):
    rows = []
    for r in range(M.rows):
        rows.append("  " + "  ".join("[" + ", ".join(f"{v + 0.0:.10g}" for v in M.quads()[r, c]) + "]"
                                     for c in range(M.cols)))
    return "\n".join(rows) if rows else "  (empty)"


def _signature(doc: NodeDocument, args):
    if getattr(args, "j", None):
        return load_matrix(args.j)
    if doc.J is not None:
        return doc.J
    return HtMatrix.eye(doc.node.shape[0], doc.ctx)


# subcommands ----------------------------------------------------------------

def cmd_eval(args):
    doc = load_node(args.file)
    out, text, poles = [], [], 0
    for x in args.x:
        try:
            R = evaluate(doc.node, x)
            out.append({"x": x, "value": _quads(R)})
            text.append(f"R({x:g}) =\n{_fmt(R)}")
        except PoleAt:
            poles += 1
            out.append({"x": x, "pole": True})
            text.append(f"R({x:g}): pole")
    _emit(args, {"points": out}, "\n".join(text))
    return PoleAt.exit_code if poles else 0


def _kind_checked(doc, args):
    kind = Kind.parse(args.kind)
    if doc.kind is not None and doc.kind is not kind:
        raise KindMismatch(f"document is certified {doc.kind.value}, requested {kind.value}")
    return kind


def cmd_verify(args):
    doc = load_node(args.file)
    kind = _kind_checked(doc, args)
    J = _signature(doc, args) if kind.is_junitary else None
    H = load_matrix(args.h) if args.h else doc.H
    if H is None or args.solve_h:
        cert = solve_certificate(doc.node, J, kind)
        H = cert.H
        if args.solve_h:
            doc.H, doc.kind = H, kind
            if kind.is_junitary:
                doc.J = J
            save_node(args.file, doc)
    cert = Certificate(H, kind, J=J)
    rep = verify_certificate(doc.node, J, cert, tol=args.tol)
    lines = [f"{kind.value}: {'VERIFIED' if rep.passed else 'FAILED'} (tol {rep.tol:g})"]
    lines += [f"  {k:16s} {v:.3e}" for k, v in rep.residuals]
    _emit(args, rep.as_dict(), "\n".join(lines))
    return 0 if rep.passed else EXIT_FAILED


def cmd_solve_h(args):
    doc = load_node(args.file)
    kind = _kind_checked(doc, args)
    J = _signature(doc, args) if kind.is_junitary else None
    cert = solve_certificate(doc.node, J, kind, tol=args.tol)
    if args.out:
        doc.H, doc.kind = cert.H, kind
        if kind.is_junitary:
            doc.J = J
        save_node(args.out, doc)
    _emit(args, {"kind": kind.value, "h": _quads(cert.H), "residuals": cert.residuals},
          f"H =\n{_fmt(cert.H)}")
    return 0


def _subspaces(doc, args):
    if args.from_eigenpair:
        return eigen_subspaces(doc.node.A)
    N = doc.node.N
    if args.subspace == "full":
        return [HtMatrix.eye(N, doc.ctx)]
    if args.subspace == "zero":
        return [HtMatrix.zeros(N, 0, doc.ctx)]
    return [load_matrix(args.subspace)]


def _run_split(args, split, names):
    doc = load_node(args.file)
    line = args.kind == "line"
    if split is junitary_factor:
        kind = Kind.LINE_JUNITARY if line else Kind.CIRCLE_JUNITARY
    else:
        kind = Kind.LINE_ANTISYM if line else Kind.CIRCLE_ANTISYM
    if doc.kind is not None and doc.kind is not kind:
        raise KindMismatch(f"document is certified {doc.kind.value}, requested {kind.value}")
    J = _signature(doc, args) if kind.is_junitary else None
    cert = Certificate(doc.H, kind, J=J) if doc.H is not None else solve_certificate(doc.node, J, kind)
    subs = _subspaces(doc, args)
    if args.from_eigenpair:
        subs = [f for f in subs if 0 < f.cols < doc.node.N] or subs
    last = None
    for M in subs:
        try:
            if kind.is_junitary:
                res = split(doc.node, J, cert, M, args.kind, tol=args.tol)
                parts = (res.R1, res.R2)
            else:
                res = split(doc.node, cert, M, args.kind, tol=args.tol)
                parts = (res.phi1, res.phi2)
        except (DegenerateSubspace, NotInvariant) as exc:
            last = exc
            continue
        certs = (res.cert1, res.cert2)
        degs = [mcmillan_degree(p) for p in parts]
        total = mcmillan_degree(doc.node)
        paths = []
        for k, (p, c) in enumerate(zip(parts, certs), 1):
            path = f"{args.out}{k}.json"
            d = NodeDocument(doc.t, p, J if kind.is_junitary else None, c.H, kind,
                             {"role": f"{names}{k}", "source": os.path.basename(args.file)})
            save_node(path, d)
            paths.append(path)
        _emit(args, {"degrees": degs, "total": total, "files": paths},
              f"degree {total} = {degs[0]} + {degs[1]}\nwrote {', '.join(paths)}")
        return 0
    if last is None:
        raise DegenerateSubspace("no candidate subspace")
    raise last


def cmd_factor(args):
    return _run_split(args, junitary_factor, "R")


def cmd_decompose(args):
    return _run_split(args, additive_decomposition, "phi")


def _q(vals):
    return HtScalar.from_quad(vals)


def cmd_make(args):
    ctx = AlgebraContext(args.t)
    w = args.which
    J = None
    if w == "blaschke-line":
        node, cert = blaschke_line(_q(args.alpha), ctx)
        J = cert.J
    elif w == "blaschke-circle":
        node, cert = blaschke_circle(_q(args.alpha), ctx)
        J = cert.J
    elif w == "blaschke-pair":
        node, cert, sig = blaschke_line_pair(_q(args.alpha), _q(args.beta), ctx)
        J = sig.J
    elif w == "brune":
        node, cert, sig = brune_section(_q(args.alpha), _q(args.beta), _q(args.gamma), args.h, ctx)
        J = sig.J
    elif w == "theta":
        node, cert = theta_builder([_q(a) for a in args.alpha], ctx)
        J = cert.J
    else:  # phi-from-psi
        psi = load_node(args.psi).node
        node = make_phi_from_psi(psi, args.kind)
        cert = doubled_certificate(psi, args.kind)
    doc = NodeDocument(node.t, node, J, cert.H, cert.kind, {"constructor": w})
    text = format_node_document(doc)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_minimality(args):
    doc = load_node(args.file)
    n = doc.node
    info = {"observable": is_observable(n), "controllable": is_controllable(n), "minimal": is_minimal(n),
            "state_dimension": n.N, "degree": mcmillan_degree(n)}
    _emit(args, info, "\n".join(f"{k}: {v}" for k, v in info.items()))
    return 0 if info["minimal"] else 4


def cmd_degree(args):
    doc = load_node(args.file)
    d = mcmillan_degree(doc.node)
    _emit(args, {"degree": d}, str(d))
    return 0


def cmd_selftest(args):
    groups = set(args.filter) if args.filter else None
    if groups:
        bad = groups - set(acceptance.GROUPS)
        if bad:
            print(f"unknown group(s): {', '.join(sorted(bad))}; choose from {', '.join(acceptance.GROUPS)}",
                  file=sys.stderr)
            return 2
    echo = None if args.json else print
    results = acceptance.run_all(groups, fault=args.inject_fault, echo=echo)
    ok = all(r.passed for r in results)
    if args.json:
        print(json.dumps([r.__dict__ for r in results], indent=2))
    else:
        print(f"{sum(r.passed for r in results)}/{len(results)} criteria passed")
    return 0 if ok else EXIT_FAILED


# parser ----------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="scaledquat", description="Rational functions over scaled quaternions.")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--tol", type=float, default=None, help="tolerance (default: $HT_TOL or 1e-8)")
    sub = p.add_subparsers(dest="cmd", required=True)
    kinds = [k.value for k in Kind]

    s = sub.add_parser("eval", help="evaluate R(x)")
    s.add_argument("file")
    s.add_argument("x", type=float, nargs="+")
    s.set_defaults(fn=cmd_eval)

    s = sub.add_parser("verify", help="check a certificate")
    s.add_argument("file")
    s.add_argument("--kind", required=True, choices=kinds)
    s.add_argument("--j", help="matrix document with J")
    s.add_argument("--h", help="matrix document with H")
    s.add_argument("--solve-h", action="store_true", help="solve for H and write it back")
    s.set_defaults(fn=cmd_verify)

    s = sub.add_parser("solve-h", help="solve for the certificate H")
    s.add_argument("file")
    s.add_argument("--kind", required=True, choices=kinds)
    s.add_argument("--j")
    s.add_argument("--out")
    s.set_defaults(fn=cmd_solve_h)

    for name, fn in (("factor", cmd_factor), ("decompose", cmd_decompose)):
        s = sub.add_parser(name, help="J-unitary factorization" if name == "factor" else "additive decomposition")
        s.add_argument("file")
        s.add_argument("--kind", required=True, choices=["line", "circle"])
        g = s.add_mutually_exclusive_group(required=True)
        g.add_argument("--subspace", help="matrix document of spanning columns, or 'full' / 'zero'")
        g.add_argument("--from-eigenpair", action="store_true", help="try eigenvector subspaces")
        s.add_argument("--j")
        s.add_argument("--out", default="factor", help="output prefix (writes PREFIX1.json, PREFIX2.json)")
        s.set_defaults(fn=fn)

    s = sub.add_parser("make", help="build a canonical node")
    ms = s.add_subparsers(dest="which", required=True)
    for name in ("blaschke-line", "blaschke-circle", "blaschke-pair", "brune", "theta", "phi-from-psi"):
        m = ms.add_parser(name)
        m.add_argument("--t", type=float, default=-1.0)
        m.add_argument("--out")
        if name == "theta":
            m.add_argument("--alpha", type=float, nargs=4, action="append", required=True)
        elif name == "phi-from-psi":
            m.add_argument("--psi", required=True)
            m.add_argument("--kind", choices=["line", "circle"], required=True)
        else:
            m.add_argument("--alpha", type=float, nargs=4, required=True)
        if name == "blaschke-pair":
            m.add_argument("--beta", type=float, nargs=4, required=True)
        if name == "brune":
            m.add_argument("--beta", type=float, nargs=4, required=True)
            m.add_argument("--gamma", type=float, nargs=4, required=True)
            m.add_argument("--h", type=float, required=True)
        m.set_defaults(fn=cmd_make)

    s = sub.add_parser("minimality", help="observability, controllability, minimality")
    s.add_argument("file")
    s.set_defaults(fn=cmd_minimality)

    s = sub.add_parser("degree", help="McMillan degree")
    s.add_argument("file")
    s.set_defaults(fn=cmd_degree)

    s = sub.add_parser("selftest", help="run the acceptance suite")
    s.add_argument("--filter", action="append", help="run only this group (repeatable)")
    s.add_argument("--inject-fault", help=argparse.SUPPRESS)
    s.set_defaults(fn=cmd_selftest)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.tol is None:
        args.tol = default_tol()
    try:
        return args.fn(args)
    except HtError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
