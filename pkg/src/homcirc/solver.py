"""Model assembly and solution.

Every model family reduces the same circuit equations
    A i = 0,  B v = 0,  -Q i + P v = s
to a square system.  The seed (homogeneous) reduction [AP; BQ] u = rhs
is valid for every configuration; branch-current and branch-voltage
reductions are patch-guarded; partially homogeneous models mix seed
variables with classical per-branch currents or voltages.  Recovered
currents and voltages always satisfy the three residual identities above,
which every solve checks and reports.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .coupled import ControlledPair, embed_coupling, validate_controls
from .elements import (
    OPEN,
    SHORT,
    Configuration,
    Triad,
    in_y_patch,
    in_z_patch,
)
from .errors import (
    CircuitError,
    DimensionMismatch,
    NotProjectivelyEqual,
    PatchViolation,
    SingularMatrix,
    UnknownNode,
)
from .graph import CutCyclePair, Digraph, default_pair
from .kirchhoff import evaluate, kirchhoff_polynomial, magnitude
from .numerics import DEFAULT_TOL, lu_solve_det

# Below this relative size, p^2 + q^2 counts as zero (complex-isotropic
# branch) and the excitation origin falls back to a single-patch choice.
_ISO_EPS = 1e-14


def _branch_origin(p, q, s):
    """A particular (i0, v0) solving -q*i + p*v = s for one branch.

    Prefers the symmetric choice (-q, p)*s/(p^2+q^2), which is invariant
    under triad rescaling; for complex-isotropic branches (p^2+q^2 = 0,
    possible over C only) it anchors on the larger coordinate instead.
    """
    if s == 0:
        return 0j, 0j
    denom = p * p + q * q
    if abs(denom) > _ISO_EPS * max(abs(p), abs(q)) ** 2:
        sbar = s / denom
        return -q * sbar, p * sbar
    if abs(p) >= abs(q):
        return 0j, s / p
    return -s / q, 0j


def characteristic_origin(cfg: Configuration, controls=()):
    """Per-branch particular solution (i0, v0) of the characteristic
    equations, including coupled pairs."""
    m = len(cfg)
    i0 = np.zeros(m, dtype=complex)
    v0 = np.zeros(m, dtype=complex)
    controlled = {c.controlled: c for c in controls}
    for k, t in enumerate(cfg.triads, start=1):
        if k in controlled:
            continue
        i0[k - 1], v0[k - 1] = _branch_origin(t.p, t.q, t.s)
    for c in controls:
        t = cfg.triads[c.controlled - 1]
        shift = c.alpha * v0[c.controlling - 1] + c.beta * i0[c.controlling - 1]
        i0[c.controlled - 1], v0[c.controlled - 1] = _branch_origin(
            t.p, t.q, t.s - shift
        )
    return i0, v0


@dataclass(frozen=True)
class Residuals:
    kcl: float
    kvl: float
    characteristic: float

    def worst(self) -> float:
        return max(self.kcl, self.kvl, self.characteristic)


@dataclass(frozen=True)
class SolveResult:
    u: np.ndarray | None
    i: np.ndarray
    v: np.ndarray
    residuals: Residuals


@dataclass(frozen=True)
class AssembledModel:
    kind: str
    matrix: np.ndarray
    rhs: np.ndarray
    unknowns: tuple[str, ...]
    graph: Digraph
    cfg: Configuration
    pair: CutCyclePair
    controls: tuple[ControlledPair, ...]
    recover: Callable[[np.ndarray], tuple]

    def determinant(self) -> complex:
        det, _ = lu_solve_det(self.matrix)
        return det


def _kirchhoff_residuals(pair, cfg, controls, i, v):
    a = pair.a
    b = pair.b
    p_all, q_all = embed_coupling(
        cfg.p_vector(), cfg.q_vector(), controls, hat=False
    )
    kcl = float(np.max(np.abs(a @ i))) if a.shape[0] else 0.0
    kvl = float(np.max(np.abs(b @ v))) if b.shape[0] else 0.0
    char = float(np.max(np.abs(-q_all @ i + p_all @ v - cfg.s_vector())))
    return Residuals(kcl=kcl, kvl=kvl, characteristic=char)


def solve_model(model: AssembledModel, tol: float = DEFAULT_TOL) -> SolveResult:
    _, x = lu_solve_det(model.matrix, model.rhs, tol=tol)
    u, i, v = model.recover(x[:, 0] if x.ndim == 2 else x)
    res = _kirchhoff_residuals(model.pair, model.cfg, model.controls, i, v)
    return SolveResult(u=u, i=i, v=v, residuals=res)


def assemble_homogeneous_symmetric(
    g: Digraph, cfg: Configuration, pair: CutCyclePair, controls=()
) -> AssembledModel:
    """The universal m-dimensional reduction [A P; B Q] u = [A Q; -B P] sbar.

    Valid for every configuration; coupled pairs enter through their seed
    parametrization blocks.
    """
    cfg.require_size(g.m)
    p_hat, q_hat = embed_coupling(
        cfg.p_vector(), cfg.q_vector(), controls, hat=True
    )
    i0, v0 = characteristic_origin(cfg, controls)
    matrix = np.vstack([pair.a @ p_hat, pair.b @ q_hat])
    rhs = np.concatenate([-pair.a @ i0, -pair.b @ v0])

    def recover(x):
        return x, p_hat @ x + i0, q_hat @ x + v0

    return AssembledModel(
        kind="homogeneous_symmetric",
        matrix=matrix,
        rhs=rhs.reshape(-1, 1),
        unknowns=tuple(f"u{k}" for k in range(1, g.m + 1)),
        graph=g,
        cfg=cfg,
        pair=pair,
        controls=tuple(controls),
        recover=recover,
    )


def assemble_full(
    g: Digraph, cfg: Configuration, pair: CutCyclePair, controls=()
) -> AssembledModel:
    """The unreduced 2m x 2m system over (i, v)."""
    cfg.require_size(g.m)
    m = g.m
    p_all, q_all = embed_coupling(
        cfg.p_vector(), cfg.q_vector(), controls, hat=False
    )
    zero_a = np.zeros((pair.a.shape[0], m))
    zero_b = np.zeros((pair.b.shape[0], m))
    matrix = np.block(
        [[pair.a, zero_a], [zero_b, pair.b], [-q_all, p_all]]
    ).astype(complex)
    rhs = np.concatenate(
        [np.zeros(pair.a.shape[0]), np.zeros(pair.b.shape[0]), cfg.s_vector()]
    )

    def recover(x):
        return None, x[:m], x[m:]

    names = tuple(f"i{k}" for k in range(1, m + 1)) + tuple(
        f"v{k}" for k in range(1, m + 1)
    )
    return AssembledModel(
        kind="full",
        matrix=matrix,
        rhs=rhs.reshape(-1, 1),
        unknowns=names,
        graph=g,
        cfg=cfg,
        pair=pair,
        controls=tuple(controls),
        recover=recover,
    )


def _require_uncontrolled(controls, model_name):
    if controls:
        raise PatchViolation(
            f"{model_name} model does not support controlled sources; "
            "use the full or symmetric model",
            branches=[c.controlled for c in controls],
        )


def assemble_branch_current(
    g: Digraph, cfg: Configuration, pair: CutCyclePair, controls=(),
    tol: float = DEFAULT_TOL,
) -> AssembledModel:
    """[A; B Z] i = (0, -B v_s); defined only where every p_k is nonzero."""
    cfg.require_size(g.m)
    _require_uncontrolled(controls, "branch-current")
    outside = [
        k for k, t in enumerate(cfg.triads, start=1) if not in_z_patch(t, tol)
    ]
    if outside:
        raise PatchViolation(
            f"branches {outside} are not current-controlled (p = 0)",
            branches=outside,
        )
    p = cfg.p_vector()
    z = cfg.q_vector() / p
    v_s = cfg.s_vector() / p
    matrix = np.vstack([pair.a.astype(complex), pair.b @ np.diag(z)])
    rhs = np.concatenate([np.zeros(pair.a.shape[0]), -pair.b @ v_s])

    def recover(x):
        return None, x, z * x + v_s

    return AssembledModel(
        kind="branch_current",
        matrix=matrix,
        rhs=rhs.reshape(-1, 1),
        unknowns=tuple(f"i{k}" for k in range(1, g.m + 1)),
        graph=g,
        cfg=cfg,
        pair=pair,
        controls=(),
        recover=recover,
    )


def assemble_branch_voltage(
    g: Digraph, cfg: Configuration, pair: CutCyclePair, controls=(),
    tol: float = DEFAULT_TOL,
) -> AssembledModel:
    """[A Y; B] v = (A i_s, 0); defined only where every q_k is nonzero."""
    cfg.require_size(g.m)
    _require_uncontrolled(controls, "branch-voltage")
    outside = [
        k for k, t in enumerate(cfg.triads, start=1) if not in_y_patch(t, tol)
    ]
    if outside:
        raise PatchViolation(
            f"branches {outside} are not voltage-controlled (q = 0)",
            branches=outside,
        )
    q = cfg.q_vector()
    y = cfg.p_vector() / q
    i_s = cfg.s_vector() / q
    matrix = np.vstack([pair.a @ np.diag(y), pair.b.astype(complex)])
    rhs = np.concatenate([pair.a @ i_s, np.zeros(pair.b.shape[0])])

    def recover(x):
        return None, y * x - i_s, x

    return AssembledModel(
        kind="branch_voltage",
        matrix=matrix,
        rhs=rhs.reshape(-1, 1),
        unknowns=tuple(f"v{k}" for k in range(1, g.m + 1)),
        graph=g,
        cfg=cfg,
        pair=pair,
        controls=(),
        recover=recover,
    )


def assemble_partial(
    g: Digraph,
    cfg: Configuration,
    pair: CutCyclePair,
    homogeneous_branches=(),
    controls=(),
    tol: float = DEFAULT_TOL,
    prefer_views: dict | None = None,
) -> AssembledModel:
    """Seed variables on the listed branches, classical variables elsewhere.

    A classical branch uses its current (impedance view, when p != 0) or
    its voltage (admittance view otherwise); ``prefer_views`` maps branch
    ids to "i" or "v" to override that default where both views exist.
    The substituted Kirchhoff rows make a square system of order m.
    """
    cfg.require_size(g.m)
    _require_uncontrolled(controls, "partial")
    homog = set(int(k) for k in homogeneous_branches)
    if any(not 1 <= k <= g.m for k in homog):
        raise DimensionMismatch("homogeneous branch id out of range")
    prefer_views = prefer_views or {}
    m = g.m
    a = pair.a.astype(complex)
    b = pair.b.astype(complex)
    i0, v0 = characteristic_origin(cfg)
    cols_a = np.zeros((a.shape[0], m), dtype=complex)
    cols_b = np.zeros((b.shape[0], m), dtype=complex)
    rhs_a = np.zeros(a.shape[0], dtype=complex)
    rhs_b = np.zeros(b.shape[0], dtype=complex)
    plan = []
    names = []
    for k, t in enumerate(cfg.triads, start=1):
        col = k - 1
        want = prefer_views.get(k)
        use_current = in_z_patch(t, tol) and not (
            want == "v" and in_y_patch(t, tol)
        )
        if k in homog:
            cols_a[:, col] = a[:, col] * t.p
            cols_b[:, col] = b[:, col] * t.q
            rhs_a -= a[:, col] * i0[col]
            rhs_b -= b[:, col] * v0[col]
            plan.append(("u", t.p, t.q, i0[col], v0[col]))
            names.append(f"u{k}")
        elif use_current:
            z = t.q / t.p
            v_s = t.s / t.p
            cols_a[:, col] = a[:, col]
            cols_b[:, col] = b[:, col] * z
            rhs_b -= b[:, col] * v_s
            plan.append(("i", z, v_s, 0, 0))
            names.append(f"i{k}")
        elif in_y_patch(t, tol):
            y = t.p / t.q
            i_s = t.s / t.q
            cols_a[:, col] = a[:, col] * y
            cols_b[:, col] = b[:, col]
            rhs_a += a[:, col] * i_s
            plan.append(("v", y, i_s, 0, 0))
            names.append(f"v{k}")
        else:
            raise PatchViolation(
                f"branch {k} lies in no classical patch; add it to the "
                "homogeneous set",
                branches=[k],
            )

    def recover(x):
        i = np.zeros(m, dtype=complex)
        v = np.zeros(m, dtype=complex)
        u = np.full(m, np.nan, dtype=complex)
        for col, (role, c1, c2, oi, ov) in enumerate(plan):
            if role == "u":
                u[col] = x[col]
                i[col] = c1 * x[col] + oi
                v[col] = c2 * x[col] + ov
            elif role == "i":
                i[col] = x[col]
                v[col] = c1 * x[col] + c2
            else:
                v[col] = x[col]
                i[col] = c1 * x[col] - c2
        return u, i, v

    return AssembledModel(
        kind="partial",
        matrix=np.vstack([cols_a, cols_b]),
        rhs=np.concatenate([rhs_a, rhs_b]).reshape(-1, 1),
        unknowns=tuple(names),
        graph=g,
        cfg=cfg,
        pair=pair,
        controls=(),
        recover=recover,
    )


MODEL_BUILDERS = {
    "full": assemble_full,
    "symmetric": assemble_homogeneous_symmetric,
    "homogeneous_symmetric": assemble_homogeneous_symmetric,
    "bcurrent": assemble_branch_current,
    "branch_current": assemble_branch_current,
    "bvoltage": assemble_branch_voltage,
    "branch_voltage": assemble_branch_voltage,
}


def rescale_solution(
    u, old_cfg: Configuration, new_cfg: Configuration, tol: float = 1e-9
):
    """Transport seed variables between projectively equal configurations.

    With per-branch factors d_k (new = d_k * old) the seed transforms as
    u_new = u / d_k plus the origin-difference correction, which vanishes
    here because the symmetric origin is itself scale-invariant.
    """
    if len(old_cfg) != len(new_cfg):
        raise DimensionMismatch("configurations have different sizes")
    u = np.asarray(u, dtype=complex)
    if u.shape[0] != len(old_cfg):
        raise DimensionMismatch("u has wrong length")
    d = np.zeros(len(old_cfg), dtype=complex)
    for k, (old, new) in enumerate(zip(old_cfg.triads, new_cfg.triads)):
        ref_old = old.p if abs(old.p) >= abs(old.q) else old.q
        ref_new = new.p if abs(old.p) >= abs(old.q) else new.q
        if ref_new == 0:
            raise NotProjectivelyEqual(f"branch {k + 1}: zero pattern changed")
        dk = ref_new / ref_old
        scale = max(abs(old.p), abs(old.q), abs(old.s)) * abs(dk)
        for o, nw in ((old.p, new.p), (old.q, new.q), (old.s, new.s)):
            if abs(nw - dk * o) > tol * scale:
                raise NotProjectivelyEqual(
                    f"branch {k + 1} triads are not projectively equal"
                )
        d[k] = dk
    i0_old, v0_old = characteristic_origin(old_cfg)
    i0_new, v0_new = characteristic_origin(new_cfg)
    p = old_cfg.p_vector()
    q = old_cfg.q_vector()
    denom = p * p + q * q
    shift = p * (i0_new - i0_old) + q * (v0_new - v0_old)
    corr = np.where(shift != 0, shift / np.where(denom != 0, denom, 1), 0.0)
    return (u - corr) / d


@dataclass(frozen=True)
class TheveninResult:
    v_th: complex | None
    i_n: complex | None
    z_pair: tuple[complex, complex]
    z_value: complex | None
    z_infinite: bool
    thevenin_error: str | None
    norton_error: str | None
    virtual_branch: int


def thevenin(
    g: Digraph,
    cfg: Configuration,
    pair: CutCyclePair,
    port: tuple[int, int],
    tol: float = DEFAULT_TOL,
) -> TheveninResult:
    """Port equivalent through one virtual load branch across the port.

    The load is solved twice: open (p_l, q_l) = (0, 1) gives the Thevenin
    voltage as u_l, short (1, 0) gives the Norton current as u_l.  Either
    side alone may be degenerate; the sides fail independently.  The
    impedance is reported projectively as (I_N : V_th) so the infinite
    case is first-class.
    """
    plus, minus = port
    for node in (plus, minus):
        if not 1 <= node <= g.n:
            raise UnknownNode(f"port node {node} not in graph")
    if plus == minus:
        raise CircuitError("port nodes must be distinct")
    g_aug = g.add_branch(plus, minus)
    ell = g_aug.m
    pair_aug = default_pair(g_aug)
    poly = kirchhoff_polynomial(g_aug)
    p_base = np.append(cfg.p_vector(), 0)
    q_base = np.append(cfg.q_vector(), 0)

    def coefficient(load_p, load_q):
        p_base[-1] = load_p
        q_base[-1] = load_q
        val = complex(evaluate(poly, p_base, q_base))
        mag = magnitude(poly, p_base, q_base)
        return val, mag

    c_q, scale_q = coefficient(0, 1)
    c_p, scale_p = coefficient(1, 0)

    v_th = i_n = None
    err_v = err_i = None
    try:
        open_res = solve_model(
            assemble_homogeneous_symmetric(g_aug, cfg.extend(OPEN), pair_aug),
            tol=tol,
        )
        v_th = complex(open_res.v[ell - 1])
    except SingularMatrix as exc:
        err_v = f"Thevenin side degenerate: {exc}"
    try:
        short_res = solve_model(
            assemble_homogeneous_symmetric(g_aug, cfg.extend(SHORT), pair_aug),
            tol=tol,
        )
        i_n = complex(short_res.i[ell - 1])
    except SingularMatrix as exc:
        err_i = f"Norton side degenerate: {exc}"

    # (I_N : V_th) is projectively the pair of load coefficients of the
    # augmented tree polynomial, which stays computable when a side fails.
    if v_th is not None and i_n is not None:
        z_pair = (i_n, v_th)
    else:
        z_pair = (c_q, c_p)
    za, zb = z_pair
    top = max(abs(za), abs(zb))
    z_value = None
    z_infinite = False
    if top > 0 and abs(za) > tol * top:
        z_value = zb / za
    elif top > 0:
        z_infinite = True
    return TheveninResult(
        v_th=v_th,
        i_n=i_n,
        z_pair=z_pair,
        z_value=z_value,
        z_infinite=z_infinite,
        thevenin_error=err_v,
        norton_error=err_i,
        virtual_branch=ell,
    )


@dataclass(frozen=True)
class Fault:
    kind: str  # "short" | "open" | "bridge"
    branch: int | None = None
    nodes: tuple[int, int] | None = None
    label: str = ""

    def describe(self) -> str:
        if self.label:
            return self.label
        if self.kind == "bridge":
            return f"bridge {self.nodes[0]}-{self.nodes[1]}"
        return f"{self.kind} {self.branch}"


@dataclass(frozen=True)
class FaultRow:
    fault: str
    value: complex | None
    error: str | None


def fault_sweep(
    g: Digraph,
    cfg: Configuration,
    pair: CutCyclePair,
    faults,
    observable: int,
    tol: float = DEFAULT_TOL,
) -> list[FaultRow]:
    """Observable voltage under each fault, all rows from one model.

    Bridge faults add virtual branches up front, open (0:1:0) in the
    baseline; every row then only substitutes branch parameters — short
    (1:0:0), open (0:1:0), bridge present (1:0:0) — so the coefficient
    structure never changes.  A degenerate row is recorded, not fatal.
    """
    if not 1 <= observable <= g.m:
        raise DimensionMismatch(f"observable branch {observable} out of range")
    faults = list(faults)
    g_aug = g
    virtual_ids = {}
    for idx, f in enumerate(faults):
        if f.kind == "bridge":
            if f.nodes is None:
                raise CircuitError("bridge fault needs a node pair")
            g_aug = g_aug.add_branch(*f.nodes)
            virtual_ids[idx] = g_aug.m
        elif f.kind in ("short", "open"):
            if f.branch is None or not 1 <= f.branch <= g.m:
                raise DimensionMismatch(
                    f"fault branch {f.branch} out of range"
                )
        else:
            raise CircuitError(f"unknown fault kind {f.kind!r}")
    pair_aug = default_pair(g_aug) if virtual_ids else pair
    base = cfg.extend(*([OPEN] * len(virtual_ids)))

    def run(row_cfg):
        model = assemble_homogeneous_symmetric(g_aug, row_cfg, pair_aug)
        return solve_model(model, tol=tol)

    rows = []

    def push(label, row_cfg):
        try:
            res = run(row_cfg)
            rows.append(
                FaultRow(fault=label, value=complex(res.v[observable - 1]), error=None)
            )
        except SingularMatrix as exc:
            rows.append(FaultRow(fault=label, value=None, error=str(exc)))

    push("none", base)
    for idx, f in enumerate(faults):
        if f.kind == "bridge":
            row_cfg = base.replace(virtual_ids[idx], SHORT)
        elif f.kind == "short":
            row_cfg = base.replace(f.branch, SHORT)
        else:
            row_cfg = base.replace(f.branch, OPEN)
        push(f.describe(), row_cfg)
    return rows
