"""Command-line interface.

All spins on the command line are twice-values (integers): pass 1 for spin
1/2, 2 for spin 1, and so on.  Outputs are deterministic: identical
arguments (and seed) produce byte-identical files regardless of the worker
count.

Exit codes: 0 success, 1 numerical failure (a verify suite failed or the
eigensolver did not converge), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import hamiltonian as hm
from . import invariant_algebra as ia
from . import spin_basis as sb
from . import strata as st
from . import verify as vf
from . import wigner as w


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
            if not text.endswith("\n"):
                fh.write("\n")
    else:
        print(text)


def _emit_json(obj, out: str | None) -> None:
    _emit(json.dumps(obj, indent=1), out)


def _g17(x: float) -> str:
    return format(float(x), ".17g")


def cmd_symbol(args, parser) -> int:
    spins = args.spins
    counts = {"cg": 6, "6j": 6, "9j": 9, "paren9j": 9, "bracket9j": 9}
    if len(spins) != counts[args.kind]:
        parser.error(f"symbol {args.kind} needs {counts[args.kind]} "
                     "twice-value arguments")
    try:
        if args.kind == "cg":
            tj1, tm1, tj2, tm2, tj3, tm3 = spins
            for tj, tm in ((tj1, tm1), (tj2, tm2), (tj3, tm3)):
                if tj < 0 or not w.valid_pair(tj, tm):
                    parser.error(f"invalid spin/projection pair ({tj}, {tm})")
            value = w.clebsch_gordan(*spins)
        else:
            if any(tj < 0 for tj in spins):
                parser.error("spins must be nonnegative twice-values")
            fn = {"6j": w.wigner_6j, "9j": w.wigner_9j,
                  "paren9j": w.paren_9j, "bracket9j": w.bracket_9j}[args.kind]
            value = fn(*spins)
    except ValueError as exc:
        parser.error(str(exc))
    print(_g17(value))
    return 0


def cmd_basis(args, parser) -> int:
    idxs = sb.enumerate_indices(args.n, args.cutoff2)
    obj = {"format_version": ia.FORMAT_VERSION, "n": args.n,
           "cutoff2": args.cutoff2, "count": len(idxs),
           "indices": [sb.format_index(i) for i in idxs]}
    _emit_json(obj, args.out)
    return 0


def cmd_multiply(args, parser) -> int:
    try:
        i1 = sb.parse_index(args.i1)
        i2 = sb.parse_index(args.i2)
    except ValueError as exc:
        parser.error(str(exc))
    if i1.n != i2.n:
        parser.error("indices must share the same N")
    _emit_json(ia.multiply_basis(i1, i2).to_json_obj(), args.out)
    return 0


def _parse_nu(text: str, n: int, parser):
    nu = []
    for ch in text:
        if ch == "+":
            nu.append(1)
        elif ch == "-":
            nu.append(-1)
        else:
            parser.error("--nu must be a string of + and - characters")
    if len(nu) != n:
        parser.error("--nu length must equal --n")
    return tuple(nu)


def cmd_strata(args, parser) -> int:
    n = args.n
    if args.what == "pT":
        _emit_json(st.p_T_rs(n, args.r, args.s).to_json_obj(), args.out)
    elif args.what == "pTrst":
        _emit_json(st.p_T_rst(n, args.r, args.s, args.t).to_json_obj(),
                   args.out)
    elif args.what == "pnu":
        _emit_json(st.p_nu(n, args.r, args.sign).to_json_obj(), args.out)
    elif args.what == "generators":
        gens = st.vanishing_generators_T(n, args.cutoff2, workers=args.threads)
        obj = {"format_version": ia.FORMAT_VERSION, "n": n,
               "cutoff2": args.cutoff2,
               "generators": [{"kind": g.label.kind,
                               "links": list(g.label.links),
                               "index": g.label.index.text(),
                               "vector": g.vector.to_json_obj()}
                              for g in gens]}
        _emit_json(obj, args.out)
    elif args.what == "system":
        system = st.costratum_T_system(n, args.cutoff2, args.hbar,
                                       workers=args.threads)
        lines = [f"% costratum system n={n} cutoff2={args.cutoff2} "
                 f"hbar={_g17(args.hbar)}",
                 f"{system.matrix.shape[0]} {system.matrix.shape[1]} "
                 f"{len(system.triplets())}"]
        lines += [f"{i + 1} {j + 1} {_g17(v)}" for i, j, v in system.triplets()]
        _emit("\n".join(lines), args.out)
        if args.columns_out:
            obj = {"format_version": ia.FORMAT_VERSION,
                   "columns": [idx.text() for idx in system.columns],
                   "rows": [{"kind": lab.kind, "links": list(lab.links),
                             "index": lab.index.text()}
                            for lab in system.rows]}
            _emit_json(obj, args.columns_out)
    elif args.what == "kernel":
        system = st.costratum_T_system(n, args.cutoff2, args.hbar,
                                       workers=args.threads)
        kern = st.costratum_T_kernel(system, tol=args.tol)
        obj = {"format_version": ia.FORMAT_VERSION, "n": n,
               "cutoff2": args.cutoff2, "hbar": args.hbar,
               "dimension": len(kern),
               "vectors": [v.to_json_obj() for v in kern]}
        _emit_json(obj, args.out)
    elif args.what == "pointvec":
        nu = _parse_nu(args.nu, n, parser)
        psi = st.point_stratum_vector(nu, args.cutoff2, args.hbar)
        _emit_json(psi.to_json_obj(), args.out)
    return 0


def cmd_spectrum(args, parser) -> int:
    dims = tuple(int(x) for x in args.dims.split(","))
    try:
        lattice = hm.build_lattice(dims)
        params = hm.HamiltonianParams(g=args.g, delta=args.delta)
        matrix = hm.assemble_matrix(lattice, params, args.cutoff2)
    except ValueError as exc:
        parser.error(str(exc))
    if args.matrix_out:
        lines = [f"% hamiltonian matrix dims={args.dims} "
                 f"cutoff2={args.cutoff2} g={_g17(args.g)} "
                 f"delta={_g17(args.delta)}",
                 f"{matrix.dim} {matrix.dim} {len(matrix.values)}"]
        lines += [f"{i + 1} {j + 1} {_g17(v)}" for i, j, v in matrix.triplets()]
        _emit("\n".join(lines), args.matrix_out)
    try:
        pairs = hm.solve_spectrum(matrix, args.k)
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    obj = {"format_version": ia.FORMAT_VERSION, "dims": list(dims),
           "cutoff2": args.cutoff2, "g": args.g, "delta": args.delta,
           "n_offtree": lattice.n_offtree, "dimension": matrix.dim,
           "eigenvalues": [val for val, _ in pairs],
           "eigenvectors": [
               {"value": val,
                "components": [{"index": matrix.basis[i].text(),
                                "c": float(vec[i])}
                               for i in np.nonzero(np.abs(vec) > 1e-12)[0]]}
               for val, vec in pairs]}
    _emit_json(obj, args.out)
    return 0


def cmd_verify(args, parser) -> int:
    try:
        report = vf.run_suites(args.suite, args.seed, workers=args.threads)
    except KeyError:
        parser.error(f"unknown suite {args.suite!r}; pick one of "
                     f"{', '.join(list(vf.SUITES) + ['all'])}")
    _emit_json(report, args.out)
    return 0 if report["passed"] else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="costrat",
        description="SU(2) lattice gauge theory: spin-network bases, "
                    "invariant-algebra structure constants, orbit-type "
                    "costrata and the Kogut-Susskind eigenproblem. "
                    "All spins are twice-values (integers).")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("symbol", help="print one coupling symbol")
    p.add_argument("kind", choices=["cg", "6j", "9j", "paren9j", "bracket9j"])
    p.add_argument("spins", nargs="+", type=int,
                   help="twice-values; cg takes j1 m1 j2 m2 j3 m3")

    p = sub.add_parser("basis", help="enumerate truncated multi-indices")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--cutoff2", type=int, required=True)
    p.add_argument("--out")

    p = sub.add_parser("multiply", help="expand a product of basis functions")
    p.add_argument("--i1", required=True, help="multi-index text form")
    p.add_argument("--i2", required=True)
    p.add_argument("--out")

    p = sub.add_parser("strata", help="stratum invariants and costrata")
    p.add_argument("what", choices=["pT", "pTrst", "pnu", "generators",
                                    "system", "kernel", "pointvec"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int)
    p.add_argument("--s", type=int)
    p.add_argument("--t", type=int)
    p.add_argument("--nu", help="sign chain, e.g. +-+")
    p.add_argument("--sign", type=int, choices=[1, -1], default=1,
                   help="sign for pnu")
    p.add_argument("--cutoff2", type=int, default=2)
    p.add_argument("--hbar", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=st.SVD_TOL)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out")
    p.add_argument("--columns-out", help="row/column labels for `system`")

    p = sub.add_parser("spectrum", help="assemble and solve the eigenproblem")
    p.add_argument("--dims", required=True, help="site extents, e.g. 2,2 or 3,3,2")
    p.add_argument("--cutoff2", type=int, required=True)
    p.add_argument("--g", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=1.0)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--out")
    p.add_argument("--matrix-out")

    p = sub.add_parser("verify", help="run named verification suites")
    p.add_argument("suite", help="symbols | recoupling | multiplication | "
                                 "strata | wilson | spectrum | all")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    missing = {
        "pT": ("r", "s"), "pTrst": ("r", "s", "t"), "pnu": ("r",),
        "pointvec": ("nu",),
    }
    if args.command == "strata":
        for name in missing.get(args.what, ()):
            if getattr(args, name) is None:
                parser.error(f"strata {args.what} requires --{name}")
    handler = {"symbol": cmd_symbol, "basis": cmd_basis,
               "multiply": cmd_multiply, "strata": cmd_strata,
               "spectrum": cmd_spectrum, "verify": cmd_verify}[args.command]
    try:
        return handler(args, parser)
    except ValueError as exc:
        parser.error(str(exc))
        return 2


if __name__ == "__main__":
    sys.exit(main())
