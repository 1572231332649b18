"""Command implementations behind both the HTTP endpoints and the CLI."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..coupled import PiModel, zparam_existence
from ..elements import Configuration
from ..errors import CircuitError, TreeCountExceedsCap
from ..graph import CutCyclePair, Digraph, default_pair, spanning_trees
from ..kirchhoff import (
    evaluate,
    format_cotree_form,
    format_homogeneous,
    format_tree_form,
    is_degenerate,
    kirchhoff_polynomial,
)
from ..netlist import Netlist, parse_netlist
from ..numerics import DEFAULT_TOL
from ..solver import (
    MODEL_BUILDERS,
    Fault,
    assemble_partial,
    fault_sweep,
    solve_model,
    thevenin,
)
from .schemas import (
    BranchReport,
    ComplexValue,
    DegeneracyPayload,
    DegeneracyRequest,
    DegeneracyResponse,
    Diagnostics,
    FaultRowReport,
    FaultsPayload,
    FaultsRequest,
    FaultsResponse,
    PolyPayload,
    PolyRequest,
    PolyResponse,
    ResidualReport,
    SolvePayload,
    SolveRequest,
    SolveResponse,
    TheveninPayload,
    TheveninRequest,
    TheveninResponse,
    TreesPayload,
    TreesRequest,
    TreesResponse,
    ZparamsPayload,
    ZparamsRequest,
    ZparamsResponse,
)


@dataclass
class LoadedCircuit:
    netlist: Netlist
    graph: Digraph
    config: Configuration
    pair: CutCyclePair
    tol: float
    reference: int
    reference_name: str


def load_circuit(req) -> LoadedCircuit:
    nl = parse_netlist(req.netlist)
    tol = req.tol if req.tol is not None else nl.options.get("tol", DEFAULT_TOL)
    ref_name = req.ref or nl.options.get("ref") or nl.node_names[-1]
    reference = nl.node_index(ref_name)
    pair = default_pair(nl.graph, reference=reference)
    return LoadedCircuit(
        netlist=nl,
        graph=nl.graph,
        config=nl.config,
        pair=pair,
        tol=tol,
        reference=reference,
        reference_name=ref_name,
    )


def _diagnostics(command, ctx, req, model_kind=None) -> Diagnostics:
    return Diagnostics(
        command=command,
        field=ctx.netlist.field_kind,
        tolerance=ctx.tol,
        reference=ctx.reference_name,
        model_kind=model_kind,
        seed=req.seed,
    )


def _branch_reports(ctx, u=None, i=None, v=None) -> list[BranchReport]:
    nl = ctx.netlist
    out = []
    for k, (label, nodes, triad) in enumerate(
        zip(nl.branch_labels, nl.branch_nodes, ctx.config.triads)
    ):
        def pick(vec):
            if vec is None:
                return None
            val = vec[k]
            if isinstance(val, complex) and (
                math.isnan(val.real) or math.isnan(val.imag)
            ):
                return None
            return ComplexValue.of(val)

        out.append(
            BranchReport(
                branch=label,
                nodes=nodes,
                p=ComplexValue.of(triad.p),
                q=ComplexValue.of(triad.q),
                s=ComplexValue.of(triad.s),
                u=pick(u),
                i=pick(i),
                v=pick(v),
            )
        )
    return out


def handle_solve(req: SolveRequest) -> SolveResponse:
    ctx = load_circuit(req)
    if req.model == "partial":
        homog = [ctx.netlist.branch_index(lab) for lab in req.homogeneous]
        # declared element kinds fix the classical view: current sources
        # keep their voltage, impedances and voltage sources their current
        views = {}
        for k, kind in enumerate(ctx.netlist.branch_kinds, start=1):
            if kind in ("admittance", "isource"):
                views[k] = "v"
            elif kind in ("impedance", "vsource"):
                views[k] = "i"
        model = assemble_partial(
            ctx.graph, ctx.config, ctx.pair, homogeneous_branches=homog,
            controls=ctx.netlist.controls, tol=ctx.tol, prefer_views=views,
        )
    else:
        builder = MODEL_BUILDERS[req.model]
        model = builder(
            ctx.graph, ctx.config, ctx.pair, controls=ctx.netlist.controls
        )
    result = solve_model(model, tol=ctx.tol)
    u = result.u if result.u is not None else None
    payload = SolvePayload(
        model_kind=model.kind,
        determinant=ComplexValue.of(model.determinant()),
        unknowns=list(model.unknowns),
    )
    return SolveResponse(
        branches=_branch_reports(ctx, u=u, i=result.i, v=result.v),
        result=payload,
        residuals=ResidualReport(
            kcl=result.residuals.kcl,
            kvl=result.residuals.kvl,
            characteristic=result.residuals.characteristic,
        ),
        diagnostics=_diagnostics("solve", ctx, req, model_kind=model.kind),
    )


def handle_poly(req: PolyRequest) -> PolyResponse:
    ctx = load_circuit(req)
    poly = kirchhoff_polynomial(ctx.graph)
    value = None
    if not req.graph_only:
        value = ComplexValue.of(
            evaluate(poly, ctx.config.p_vector(), ctx.config.q_vector())
        )
    payload = PolyPayload(
        homogeneous=format_homogeneous(poly),
        tree_form=format_tree_form(poly),
        cotree_form=format_cotree_form(poly),
        tau=poly.tau,
        value=value,
    )
    return PolyResponse(
        branches=_branch_reports(ctx),
        result=payload,
        diagnostics=_diagnostics("poly", ctx, req),
    )


def handle_degeneracy(req: DegeneracyRequest) -> DegeneracyResponse:
    ctx = load_circuit(req)
    report = is_degenerate(ctx.graph, ctx.config, tol=ctx.tol)
    from ..solver import assemble_homogeneous_symmetric

    model = assemble_homogeneous_symmetric(
        ctx.graph, ctx.config, ctx.pair, controls=ctx.netlist.controls
    )
    payload = DegeneracyPayload(
        degenerate=report.degenerate,
        value=ComplexValue.of(report.value),
        scale=report.scale,
        reduced_determinant=ComplexValue.of(model.determinant()),
        k_ab=ctx.pair.k_ab,
    )
    return DegeneracyResponse(
        branches=_branch_reports(ctx),
        result=payload,
        diagnostics=_diagnostics("degeneracy", ctx, req),
    )


def handle_trees(req: TreesRequest) -> TreesResponse:
    ctx = load_circuit(req)
    trees = spanning_trees(ctx.graph, cap=req.cap)
    labels = ctx.netlist.branch_labels
    shown = trees[: req.list_limit]
    payload = TreesPayload(
        tau=len(trees),
        trees=[[labels[j - 1] for j in t] for t in shown],
        truncated=len(trees) > len(shown),
        k_a=ctx.pair.k_a,
        k_b=ctx.pair.k_b,
        k_ab=ctx.pair.k_ab,
        witness_tree=[labels[j - 1] for j in ctx.pair.witness_tree],
    )
    return TreesResponse(
        branches=_branch_reports(ctx),
        result=payload,
        diagnostics=_diagnostics("trees", ctx, req),
    )


def handle_thevenin(req: TheveninRequest) -> TheveninResponse:
    ctx = load_circuit(req)
    plus = ctx.netlist.node_index(req.port[0])
    minus = ctx.netlist.node_index(req.port[1])
    res = thevenin(ctx.graph, ctx.config, ctx.pair, (plus, minus), tol=ctx.tol)
    payload = TheveninPayload(
        v_th=None if res.v_th is None else ComplexValue.of(res.v_th),
        i_n=None if res.i_n is None else ComplexValue.of(res.i_n),
        z_pair=(ComplexValue.of(res.z_pair[0]), ComplexValue.of(res.z_pair[1])),
        z_value=None if res.z_value is None else ComplexValue.of(res.z_value),
        z_infinite=res.z_infinite,
        thevenin_error=res.thevenin_error,
        norton_error=res.norton_error,
    )
    return TheveninResponse(
        branches=_branch_reports(ctx),
        result=payload,
        diagnostics=_diagnostics("thevenin", ctx, req),
    )


def handle_faults(req: FaultsRequest) -> FaultsResponse:
    ctx = load_circuit(req)
    nl = ctx.netlist
    observe_label = req.observe or nl.options.get("observe")
    if not observe_label:
        raise CircuitError("faults needs an observable branch (--observe)")
    observable = nl.branch_index(observe_label)
    faults = []
    if req.all_single:
        for label in nl.branch_labels:
            faults.append(
                Fault(kind="short", branch=nl.branch_index(label),
                      label=f"short {label}")
            )
            faults.append(
                Fault(kind="open", branch=nl.branch_index(label),
                      label=f"open {label}")
            )
    for label in req.short:
        faults.append(
            Fault(kind="short", branch=nl.branch_index(label),
                  label=f"short {label}")
        )
    for label in req.open:
        faults.append(
            Fault(kind="open", branch=nl.branch_index(label),
                  label=f"open {label}")
        )
    for spec in req.bridge:
        faults.append(
            Fault(
                kind="bridge",
                nodes=(nl.node_index(spec.plus), nl.node_index(spec.minus)),
                label=f"bridge {spec.plus}:{spec.minus}",
            )
        )
    rows = fault_sweep(
        ctx.graph, ctx.config, ctx.pair, faults, observable, tol=ctx.tol
    )
    payload = FaultsPayload(
        observable=observe_label,
        rows=[
            FaultRowReport(
                fault=r.fault,
                value=None if r.value is None else ComplexValue.of(r.value),
                error=r.error,
            )
            for r in rows
        ],
    )
    return FaultsResponse(
        branches=_branch_reports(ctx),
        result=payload,
        diagnostics=_diagnostics("faults", ctx, req),
    )


def handle_zparams(req: ZparamsRequest) -> ZparamsResponse:
    ctx = load_circuit(req)
    nl = ctx.netlist
    if nl.graph.m != 3 or nl.graph.n != 3:
        raise CircuitError(
            "zparams expects a three-branch, three-node stage netlist"
        )
    if len(nl.controls) != 1:
        raise CircuitError("zparams expects exactly one control directive")
    ctl = nl.controls[0]
    bridge = ({1, 2, 3} - {ctl.controlling, ctl.controlled}).pop()
    t1 = ctx.config.triads[ctl.controlling - 1]
    t2 = ctx.config.triads[ctl.controlled - 1]
    t3 = ctx.config.triads[bridge - 1]
    pi = PiModel(
        p1=t1.p, q1=t1.q, p2=t2.p, q2=t2.q, p3=t3.p, q3=t3.q,
        alpha=ctl.alpha, beta=ctl.beta,
    )
    report = zparam_existence(pi, tol=ctx.tol)
    payload = ZparamsPayload(
        determinant=ComplexValue.of(report.det),
        assembled_determinant=ComplexValue.of(report.assembled_det),
        exists=report.exists,
    )
    return ZparamsResponse(
        branches=_branch_reports(ctx),
        result=payload,
        diagnostics=_diagnostics("zparams", ctx, req),
    )
