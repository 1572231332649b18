"""Command-line client for the analysis service.

Each subcommand reads a ``.hct`` netlist, builds the same request model
the HTTP API accepts, runs the shared handler in-process and renders the
response as text or JSON.  Exit codes: 0 ok, 2 parse, 3 patch violation,
4 degenerate circuit, 5 anything else.
"""

from __future__ import annotations

import argparse
import sys

from .errors import EXIT_CODES, CircuitError, ParseError
from .netlist import format_complex
from .service import handlers
from .service.schemas import (
    BridgeSpec,
    DegeneracyRequest,
    FaultsRequest,
    PolyRequest,
    SolveRequest,
    TheveninRequest,
    TreesRequest,
    ZparamsRequest,
)


def _read_netlist(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None


def _fmt(cv, precision) -> str:
    if cv is None:
        return "-"
    return format_complex(cv.value(), precision)


def _common(ns) -> dict:
    return {"tol": ns.tol, "ref": ns.ref, "seed": ns.seed}


def _emit(ns, response, human):
    if ns.json:
        print(response.model_dump_json(indent=2))
    else:
        human(response)


def _cmd_solve(ns):
    req = SolveRequest(
        netlist=_read_netlist(ns.file),
        model=ns.model,
        homogeneous=ns.homog.split(",") if ns.homog else [],
        **_common(ns),
    )
    resp = handlers.handle_solve(req)

    def human(r):
        p = ns.precision
        print(f"model: {r.result.model_kind}")
        print(f"det:   {_fmt(r.result.determinant, p)}")
        for b in r.branches:
            bits = [f"branch {b.branch:>4s}"]
            if b.u is not None:
                bits.append(f"u = {_fmt(b.u, p)}")
            bits.append(f"i = {_fmt(b.i, p)}")
            bits.append(f"v = {_fmt(b.v, p)}")
            print("  " + "  ".join(bits))
        res = r.residuals
        print(
            f"residuals: kcl={res.kcl:.2e} kvl={res.kvl:.2e} "
            f"characteristic={res.characteristic:.2e}"
        )

    _emit(ns, resp, human)


def _cmd_poly(ns):
    req = PolyRequest(
        netlist=_read_netlist(ns.file), graph_only=ns.graph_only, **_common(ns)
    )
    resp = handlers.handle_poly(req)

    def human(r):
        print(f"K  = {r.result.homogeneous}")
        print(f"K0 = {r.result.tree_form}")
        print(f"K1 = {r.result.cotree_form}")
        print(f"tau = {r.result.tau}")
        if r.result.value is not None:
            print(f"K(p,q) = {_fmt(r.result.value, ns.precision)}")

    _emit(ns, resp, human)


def _cmd_degeneracy(ns):
    req = DegeneracyRequest(netlist=_read_netlist(ns.file), **_common(ns))
    resp = handlers.handle_degeneracy(req)

    def human(r):
        verdict = "degenerate" if r.result.degenerate else "non-degenerate"
        p = ns.precision
        print(f"{verdict} (K = {_fmt(r.result.value, p)})")
        print(
            f"det[AP;BQ] = {_fmt(r.result.reduced_determinant, p)}"
            f"  (k_AB = {r.result.k_ab}, scale = {r.result.scale:.6g})"
        )

    _emit(ns, resp, human)


def _cmd_trees(ns):
    req = TreesRequest(
        netlist=_read_netlist(ns.file), cap=ns.cap, list_limit=ns.list_limit,
        **_common(ns),
    )
    resp = handlers.handle_trees(req)

    def human(r):
        print(f"tau = {r.result.tau}")
        print(f"k_A = {r.result.k_a}  k_B = {r.result.k_b}  k_AB = {r.result.k_ab}")
        for t in r.result.trees:
            print("  {" + ", ".join(t) + "}")
        if r.result.truncated:
            print(f"  ... ({r.result.tau} total)")

    _emit(ns, resp, human)


def _cmd_thevenin(ns):
    req = TheveninRequest(
        netlist=_read_netlist(ns.file), port=(ns.port[0], ns.port[1]),
        **_common(ns),
    )
    resp = handlers.handle_thevenin(req)

    def human(r):
        p = ns.precision
        print(f"V_th = {_fmt(r.result.v_th, p)}")
        print(f"I_N  = {_fmt(r.result.i_n, p)}")
        pair = r.result.z_pair
        print(f"Z_th = ({_fmt(pair[0], p)} : {_fmt(pair[1], p)})", end="")
        if r.result.z_infinite:
            print("  -> infinite")
        elif r.result.z_value is not None:
            print(f"  -> {_fmt(r.result.z_value, p)}")
        else:
            print("  -> undefined")
        for msg in (r.result.thevenin_error, r.result.norton_error):
            if msg:
                print(f"warning: {msg}")

    _emit(ns, resp, human)


def _parse_bridge(spec: str) -> BridgeSpec:
    plus, sep, minus = spec.partition(":")
    if not sep or not plus or not minus:
        raise ParseError(f"bad bridge spec {spec!r}, expected n+:n-")
    return BridgeSpec(plus=plus, minus=minus)


def _cmd_faults(ns):
    req = FaultsRequest(
        netlist=_read_netlist(ns.file),
        observe=ns.observe,
        short=ns.short.split(",") if ns.short else [],
        open=ns.open.split(",") if ns.open else [],
        bridge=[_parse_bridge(s) for s in ns.bridge],
        all_single=ns.all_single,
        **_common(ns),
    )
    resp = handlers.handle_faults(req)

    def human(r):
        print(f"observable: branch {r.result.observable}")
        width = max(len(row.fault) for row in r.result.rows)
        for row in r.result.rows:
            if row.error:
                print(f"  {row.fault:<{width}s}  <degenerate: {row.error}>")
            else:
                print(f"  {row.fault:<{width}s}  v = {_fmt(row.value, ns.precision)}")

    _emit(ns, resp, human)


def _cmd_zparams(ns):
    req = ZparamsRequest(netlist=_read_netlist(ns.file), **_common(ns))
    resp = handlers.handle_zparams(req)

    def human(r):
        p = ns.precision
        print(f"det = {_fmt(r.result.determinant, p)}")
        print(f"assembled det = {_fmt(r.result.assembled_determinant, p)}")
        print("Z-parameters exist" if r.result.exists else "no Z-parameter description")

    _emit(ns, resp, human)


def _cmd_serve(ns):
    import uvicorn

    from .service.api import app

    uvicorn.run(app, host=ns.host, port=ns.port)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="homcirc",
        description="Linear circuit analysis with homogeneous branch models",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None,
                        help="degeneracy/residual tolerance (default 1e-9)")
    common.add_argument("--ref", default=None, help="reference node")
    common.add_argument("--seed", type=int, default=None,
                        help="seed recorded for randomized harnesses")
    common.add_argument("--json", action="store_true", help="machine output")
    common.add_argument("--precision", type=int, default=6,
                        help="significant digits in text output")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common], help="solve a netlist")
    p.add_argument("file")
    p.add_argument("--model", default="symmetric",
                   choices=["full", "symmetric", "bcurrent", "bvoltage", "partial"])
    p.add_argument("--homog", default="",
                   help="comma-separated branch ids kept homogeneous (partial model)")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("poly", parents=[common],
                       help="tree polynomial and its dehomogenizations")
    p.add_argument("file")
    p.add_argument("--graph-only", action="store_true",
                   help="skip evaluating at the netlist parameters")
    p.set_defaults(func=_cmd_poly)

    p = sub.add_parser("degeneracy", parents=[common],
                       help="unique-solution verdict")
    p.add_argument("file")
    p.set_defaults(func=_cmd_degeneracy)

    p = sub.add_parser("trees", parents=[common], help="spanning-tree summary")
    p.add_argument("file")
    p.add_argument("--cap", type=int, default=1_000_000)
    p.add_argument("--list-limit", type=int, default=64)
    p.set_defaults(func=_cmd_trees)

    p = sub.add_parser("thevenin", parents=[common], help="port equivalent")
    p.add_argument("file")
    p.add_argument("--port", nargs=2, required=True, metavar=("N+", "N-"))
    p.set_defaults(func=_cmd_thevenin)

    p = sub.add_parser("faults", parents=[common], help="fault signature table")
    p.add_argument("file")
    p.add_argument("--observe", default=None, help="observable branch id")
    p.add_argument("--short", default="", help="comma-separated branch ids")
    p.add_argument("--open", default="", help="comma-separated branch ids")
    p.add_argument("--bridge", action="append", default=[], metavar="N+:N-",
                   help="bridging fault between two nodes (repeatable)")
    p.add_argument("--all-single", action="store_true",
                   help="short and open fault on every branch")
    p.set_defaults(func=_cmd_faults)

    p = sub.add_parser("zparams", parents=[common],
                       help="two-port Z-parameter existence for a stage netlist")
    p.add_argument("file")
    p.set_defaults(func=_cmd_zparams)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        ns.func(ns)
    except CircuitError as exc:
        print(f"error[{exc.category}]: {exc}", file=sys.stderr)
        return EXIT_CODES.get(exc.category, 5)
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error[internal]: {exc}", file=sys.stderr)
        return 5
    return 0


if __name__ == "__main__":
    sys.exit(main())
