"""Line-oriented netlist format (``.hct`` files).

    # comment
    field real|complex
    branch <id> <from> <to> homog p=<c> q=<c> [s=<c>]
    branch <id> <from> <to> impedance z=<c> [vs=<c>]
    branch <id> <from> <to> admittance y=<c> [is=<c>]
    branch <id> <from> <to> vsource v=<c> [z=<c>]
    branch <id> <from> <to> isource i=<c> [y=<c>]
    control <controlled-id> by <controlling-id> alpha=<c> beta=<c>
    option tol=<float> | ref=<node> | observe=<branch>

Complex literals: ``a``, ``bj``, ``a+bj``, ``a-bj`` (also bare ``j``).
Branch ids are labels (strings); internally branches are numbered 1..m
in file order.  Node names map to 1..n in order of first appearance.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .coupled import ControlledPair
from .elements import (
    Configuration,
    Triad,
    from_admittance,
    from_impedance,
    from_isource,
    from_vsource,
)
from .errors import CircuitError, DuplicateBranch, ParseError
from .graph import Digraph

_FORBIDDEN = re.compile(r"[()]|inf|nan", re.IGNORECASE)


def parse_complex(token: str, *, real_only: bool = False) -> complex:
    """Literals ``a``, ``bj``, ``a+bj``, ``a-bj`` (bare ``j`` allowed)."""
    tok = token.strip().replace(" ", "")
    if not tok or _FORBIDDEN.search(tok):
        raise ValueError(f"bad number {token!r}")
    try:
        z = complex(tok)
    except ValueError:
        raise ValueError(f"bad number {token!r}") from None
    if real_only and z.imag != 0.0:
        raise ValueError(f"imaginary literal {token!r} in a real-field netlist")
    return z


def format_complex(z: complex, precision: int = 6) -> str:
    re_s = f"{z.real:.{precision}g}"
    if z.imag == 0:
        return re_s
    sign = "+" if z.imag >= 0 else "-"
    return f"{re_s}{sign}{abs(z.imag):.{precision}g}j"


@dataclass(frozen=True)
class Control:
    controlled: str
    controlling: str
    alpha: complex
    beta: complex


@dataclass(frozen=True)
class Netlist:
    field_kind: str
    graph: Digraph
    config: Configuration
    controls: tuple[ControlledPair, ...]
    branch_labels: tuple[str, ...]
    branch_kinds: tuple[str, ...]
    node_names: tuple[str, ...]
    branch_nodes: tuple[tuple[str, str], ...]
    options: dict = field(default_factory=dict)

    def branch_index(self, label: str) -> int:
        """1-based position of a branch label."""
        try:
            return self.branch_labels.index(label) + 1
        except ValueError:
            raise CircuitError(f"unknown branch {label!r}") from None

    def node_index(self, name: str) -> int:
        try:
            return self.node_names.index(name) + 1
        except ValueError:
            raise CircuitError(f"unknown node {name!r}") from None


def _kv_pairs(tokens, lineno):
    out = {}
    for tok in tokens:
        if "=" not in tok:
            raise ParseError(f"expected key=value, got {tok!r}", line=lineno)
        key, _, val = tok.partition("=")
        if key in out:
            raise ParseError(f"duplicate key {key!r}", line=lineno)
        out[key] = val
    return out


_BRANCH_KINDS = {
    "homog": ({"p", "q"}, {"s"}),
    "impedance": ({"z"}, {"vs"}),
    "admittance": ({"y"}, {"is"}),
    "vsource": ({"v"}, {"z"}),
    "isource": ({"i"}, {"y"}),
}


def parse_netlist(text: str) -> Netlist:
    field_kind = "complex"
    field_seen = False
    branch_labels: list[str] = []
    branch_kinds: list[str] = []
    branch_nodes: list[tuple[str, str]] = []
    triads: list[Triad] = []
    node_names: list[str] = []
    node_index: dict[str, int] = {}
    raw_controls: list[tuple[Control, int]] = []
    options: dict = {}

    def node_id(name: str) -> int:
        if name not in node_index:
            node_index[name] = len(node_names) + 1
            node_names.append(name)
        return node_index[name]

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        head = tokens[0].lower()

        if head == "field":
            if len(tokens) != 2 or tokens[1] not in ("real", "complex"):
                raise ParseError("expected 'field real' or 'field complex'", line=lineno)
            if field_seen:
                raise ParseError("field declared twice", line=lineno)
            if branch_labels:
                raise ParseError("field must precede branch lines", line=lineno)
            field_kind = tokens[1]
            field_seen = True

        elif head == "branch":
            if len(tokens) < 5:
                raise ParseError(
                    "expected: branch <id> <from> <to> <kind> key=value ...",
                    line=lineno,
                )
            label, n_from, n_to, kind = tokens[1:5]
            if label in branch_labels:
                raise DuplicateBranch(f"duplicate branch {label!r}", line=lineno)
            if kind not in _BRANCH_KINDS:
                raise ParseError(f"unknown branch kind {kind!r}", line=lineno)
            required, optional = _BRANCH_KINDS[kind]
            kv = _kv_pairs(tokens[5:], lineno)
            unknown = set(kv) - required - optional
            if unknown:
                raise ParseError(
                    f"unknown keys {sorted(unknown)} for {kind}", line=lineno
                )
            missing = required - set(kv)
            if missing:
                raise ParseError(
                    f"missing keys {sorted(missing)} for {kind}", line=lineno
                )
            vals = {}
            for key, raw_val in kv.items():
                try:
                    vals[key] = parse_complex(
                        raw_val, real_only=(field_kind == "real")
                    )
                except ValueError as exc:
                    raise ParseError(str(exc), line=lineno) from None
            try:
                if kind == "homog":
                    triad = Triad(vals["p"], vals["q"], vals.get("s", 0))
                elif kind == "impedance":
                    triad = from_impedance(vals["z"], vals.get("vs", 0))
                elif kind == "admittance":
                    triad = from_admittance(vals["y"], vals.get("is", 0))
                elif kind == "vsource":
                    triad = from_vsource(vals["v"], vals.get("z", 0))
                else:
                    triad = from_isource(vals["i"], vals.get("y", 0))
            except CircuitError as exc:
                raise ParseError(str(exc), line=lineno) from None
            if n_from == n_to:
                raise ParseError(
                    f"branch {label!r} is a self-loop at {n_from!r}", line=lineno
                )
            branch_labels.append(label)
            branch_kinds.append(kind)
            branch_nodes.append((n_from, n_to))
            node_id(n_from)
            node_id(n_to)
            triads.append(triad)

        elif head == "control":
            if len(tokens) != 6 or tokens[2].lower() != "by":
                raise ParseError(
                    "expected: control <id> by <id> alpha=<c> beta=<c>",
                    line=lineno,
                )
            kv = _kv_pairs(tokens[4:], lineno)
            if set(kv) != {"alpha", "beta"}:
                raise ParseError("control needs alpha= and beta=", line=lineno)
            try:
                alpha = parse_complex(kv["alpha"], real_only=(field_kind == "real"))
                beta = parse_complex(kv["beta"], real_only=(field_kind == "real"))
            except ValueError as exc:
                raise ParseError(str(exc), line=lineno) from None
            raw_controls.append(
                (Control(tokens[1], tokens[3], alpha, beta), lineno)
            )

        elif head == "option":
            kv = _kv_pairs(tokens[1:], lineno)
            for key, val in kv.items():
                if key == "tol":
                    try:
                        options["tol"] = float(val)
                    except ValueError:
                        raise ParseError(f"bad tol {val!r}", line=lineno) from None
                elif key == "ref":
                    options["ref"] = val
                elif key == "observe":
                    options["observe"] = val
                else:
                    raise ParseError(f"unknown option {key!r}", line=lineno)

        else:
            raise ParseError(f"unknown directive {head!r}", line=lineno)

    if not branch_labels:
        raise ParseError("netlist has no branches")

    label_pos = {lab: k + 1 for k, lab in enumerate(branch_labels)}
    controls = []
    for ctl, lineno in raw_controls:
        for lab in (ctl.controlled, ctl.controlling):
            if lab not in label_pos:
                raise ParseError(f"control references unknown branch {lab!r}", line=lineno)
        t1 = triads[label_pos[ctl.controlling] - 1]
        t2 = triads[label_pos[ctl.controlled] - 1]
        try:
            controls.append(
                ControlledPair(
                    controlling=label_pos[ctl.controlling],
                    controlled=label_pos[ctl.controlled],
                    p1=t1.p, q1=t1.q, p2=t2.p, q2=t2.q,
                    alpha=ctl.alpha, beta=ctl.beta,
                    s1=t1.s, s2=t2.s,
                )
            )
        except CircuitError as exc:
            raise ParseError(str(exc), line=lineno) from None

    try:
        graph = Digraph(
            node_count=len(node_names),
            branches=tuple(
                (node_index[a], node_index[b]) for a, b in branch_nodes
            ),
        )
    except CircuitError as exc:
        raise ParseError(str(exc)) from None

    if "ref" in options and options["ref"] not in node_index:
        raise ParseError(f"option ref names unknown node {options['ref']!r}")
    if "observe" in options and options["observe"] not in label_pos:
        raise ParseError(
            f"option observe names unknown branch {options['observe']!r}"
        )

    return Netlist(
        field_kind=field_kind,
        graph=graph,
        config=Configuration(tuple(triads)),
        controls=tuple(controls),
        branch_labels=tuple(branch_labels),
        branch_kinds=tuple(branch_kinds),
        node_names=tuple(node_names),
        branch_nodes=tuple(branch_nodes),
        options=options,
    )
