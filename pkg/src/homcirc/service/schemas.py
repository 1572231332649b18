"""Request/response models shared by the HTTP API and the CLI.

Every response uses the same envelope: ``branches`` (per-branch data,
possibly empty), ``result`` (command-specific payload), ``residuals``
(solve commands only) and ``diagnostics``.
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field


class ComplexValue(BaseModel):
    re: float
    im: float = 0.0

    @classmethod
    def of(cls, z) -> "ComplexValue":
        z = complex(z)
        return cls(re=z.real, im=z.imag)

    def value(self) -> complex:
        return complex(self.re, self.im)


class BranchReport(BaseModel):
    branch: str
    nodes: tuple[str, str]
    p: ComplexValue
    q: ComplexValue
    s: ComplexValue
    u: ComplexValue | None = None
    i: ComplexValue | None = None
    v: ComplexValue | None = None


class ResidualReport(BaseModel):
    kcl: float
    kvl: float
    characteristic: float


class Diagnostics(BaseModel):
    command: str
    field: str
    tolerance: float
    reference: str
    model_kind: str | None = None
    seed: int | None = None


class NetlistRequest(BaseModel):
    netlist: str
    tol: float | None = None
    ref: str | None = None
    seed: int | None = None


class SolveRequest(NetlistRequest):
    model: Literal["full", "symmetric", "bcurrent", "bvoltage", "partial"] = (
        "symmetric"
    )
    homogeneous: list[str] = Field(default_factory=list)


class PolyRequest(NetlistRequest):
    graph_only: bool = False


class DegeneracyRequest(NetlistRequest):
    pass


class TreesRequest(NetlistRequest):
    cap: int = 1_000_000
    list_limit: int = 64


class TheveninRequest(NetlistRequest):
    port: tuple[str, str]


class BridgeSpec(BaseModel):
    plus: str
    minus: str


class FaultsRequest(NetlistRequest):
    observe: str | None = None
    short: list[str] = Field(default_factory=list)
    open: list[str] = Field(default_factory=list)
    bridge: list[BridgeSpec] = Field(default_factory=list)
    all_single: bool = False


class ZparamsRequest(NetlistRequest):
    pass


class SolvePayload(BaseModel):
    model_kind: str
    determinant: ComplexValue
    unknowns: list[str]


class SolveResponse(BaseModel):
    branches: list[BranchReport]
    result: SolvePayload
    residuals: ResidualReport
    diagnostics: Diagnostics


class PolyPayload(BaseModel):
    homogeneous: str
    tree_form: str
    cotree_form: str
    tau: int
    value: ComplexValue | None = None


class PolyResponse(BaseModel):
    branches: list[BranchReport]
    result: PolyPayload
    residuals: None = None
    diagnostics: Diagnostics


class DegeneracyPayload(BaseModel):
    degenerate: bool
    value: ComplexValue
    scale: float
    reduced_determinant: ComplexValue
    k_ab: int


class DegeneracyResponse(BaseModel):
    branches: list[BranchReport]
    result: DegeneracyPayload
    residuals: None = None
    diagnostics: Diagnostics


class TreesPayload(BaseModel):
    tau: int
    trees: list[list[str]]
    truncated: bool
    k_a: int
    k_b: int
    k_ab: int
    witness_tree: list[str]


class TreesResponse(BaseModel):
    branches: list[BranchReport]
    result: TreesPayload
    residuals: None = None
    diagnostics: Diagnostics


class TheveninPayload(BaseModel):
    v_th: ComplexValue | None
    i_n: ComplexValue | None
    z_pair: tuple[ComplexValue, ComplexValue]
    z_value: ComplexValue | None
    z_infinite: bool
    thevenin_error: str | None = None
    norton_error: str | None = None


class TheveninResponse(BaseModel):
    branches: list[BranchReport]
    result: TheveninPayload
    residuals: None = None
    diagnostics: Diagnostics


class FaultRowReport(BaseModel):
    fault: str
    value: ComplexValue | None
    error: str | None = None


class FaultsPayload(BaseModel):
    observable: str
    rows: list[FaultRowReport]


class FaultsResponse(BaseModel):
    branches: list[BranchReport]
    result: FaultsPayload
    residuals: None = None
    diagnostics: Diagnostics


class ZparamsPayload(BaseModel):
    determinant: ComplexValue
    assembled_determinant: ComplexValue
    exists: bool


class ZparamsResponse(BaseModel):
    branches: list[BranchReport]
    result: ZparamsPayload
    residuals: None = None
    diagnostics: Diagnostics


class ErrorBody(BaseModel):
    category: str
    message: str


class ErrorResponse(BaseModel):
    error: ErrorBody
