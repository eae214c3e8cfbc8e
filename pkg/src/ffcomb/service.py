"""HTTP service exposing the package operations.

Every endpoint is a thin adapter: parse the request model, call exactly one
library operation, serialize the result. Domain errors map to 422 with the
original message so callers can distinguish usage errors from bugs.
"""

from __future__ import annotations

import math
from typing import Literal, Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import bounds, decompose, incidence, survey
from .field import PrimeField
from .groups import subgroup, subgroup_orders
from .sets import (
    FpSet,
    REP_OPS,
    additive_energy,
    diffset,
    energy4,
    format_fpset,
    productset,
    ratioset,
    rep_fn,
    sumset,
)

app = FastAPI(title="ffcomb", version="0.1.0")


def _field(p: int) -> PrimeField:
    try:
        return PrimeField.of(p)
    except (ValueError, TypeError) as exc:
        raise HTTPException(status_code=422, detail=str(exc))


def _set(p: int, elements: list[int]) -> FpSet:
    fld = _field(p)
    try:
        return FpSet(fld, elements)
    except (ValueError, TypeError) as exc:
        raise HTTPException(status_code=422, detail=str(exc))


def _domain(call, *args, **kwargs):
    try:
        return call(*args, **kwargs)
    except (ValueError, TypeError) as exc:
        raise HTTPException(status_code=422, detail=str(exc))


class SetModel(BaseModel):
    p: int
    elements: list[int]


class SubgroupRequest(BaseModel):
    p: int
    d: int
    xi: int = 1


class SubgroupResponse(BaseModel):
    p: int
    d: int
    generator: int
    elements: list[int]
    formatted: str
    orders: list[int]


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.post("/subgroup", response_model=SubgroupResponse)
def subgroup_endpoint(req: SubgroupRequest) -> SubgroupResponse:
    fld = _field(req.p)
    sub = _domain(subgroup, fld, req.d)
    elems = sub.elements
    if req.xi % req.p != 1:
        from .groups import coset

        elems = _domain(coset, sub, req.xi)
    return SubgroupResponse(
        p=fld.p,
        d=req.d,
        generator=sub.generator,
        elements=list(elems.elements),
        formatted=format_fpset(elems),
        orders=subgroup_orders(fld),
    )


class SetOpRequest(BaseModel):
    p: int
    op: Literal["sum", "diff", "product", "ratio"]
    a: list[int]
    b: list[int]
    exclude_diagonal: bool = False


class SetOpResponse(BaseModel):
    p: int
    elements: list[int]
    formatted: str
    size: int


@app.post("/setop", response_model=SetOpResponse)
def setop_endpoint(req: SetOpRequest) -> SetOpResponse:
    a = _set(req.p, req.a)
    b = _set(req.p, req.b)
    if req.op == "sum":
        out = _domain(sumset, a, b)
    elif req.op == "diff":
        out = _domain(diffset, a, b)
    elif req.op == "product":
        out = _domain(productset, a, b)
    else:
        out = _domain(ratioset, a, b, req.exclude_diagonal)
    return SetOpResponse(p=req.p, elements=list(out.elements),
                         formatted=format_fpset(out), size=len(out))


class RepFnRequest(BaseModel):
    p: int
    op: Literal["sum", "diff", "product", "ratio"]
    a: list[int]
    b: list[int]


class RepFnResponse(BaseModel):
    p: int
    counts: dict[int, int]
    infinity_count: int
    total_mass: int
    sum_of_squares: int


@app.post("/repfn", response_model=RepFnResponse)
def repfn_endpoint(req: RepFnRequest) -> RepFnResponse:
    assert req.op in REP_OPS
    a = _set(req.p, req.a)
    b = _set(req.p, req.b)
    table = _domain(rep_fn, a, b, req.op)
    counts = {int(x): int(c) for x, c in enumerate(table.counts) if c}
    return RepFnResponse(p=req.p, counts=counts,
                         infinity_count=table.infinity_count,
                         total_mass=table.total_mass,
                         sum_of_squares=table.sum_of_squares())


class EnergyRequest(BaseModel):
    p: int
    a: list[int]
    b: Optional[list[int]] = None
    c: Optional[list[int]] = None
    d: Optional[list[int]] = None


class EnergyResponse(BaseModel):
    p: int
    energy: int
    kind: Literal["additive", "energy4"]


@app.post("/energy", response_model=EnergyResponse)
def energy_endpoint(req: EnergyRequest) -> EnergyResponse:
    a = _set(req.p, req.a)
    if req.b is None and req.c is None and req.d is None:
        return EnergyResponse(p=req.p, energy=_domain(additive_energy, a),
                              kind="additive")
    if None in (req.b, req.c, req.d):
        raise HTTPException(status_code=422,
                            detail="energy4 needs all of b, c, d")
    b = _set(req.p, req.b)
    c = _set(req.p, req.c)
    d = _set(req.p, req.d)
    return EnergyResponse(p=req.p, energy=_domain(energy4, a, b, c, d),
                          kind="energy4")


class TriplesRequest(BaseModel):
    p: int
    a: list[int]
    b: Optional[list[int]] = None
    c: Optional[list[int]] = None
    support: bool = False


class TriplesResponse(BaseModel):
    p: int
    finite: int
    geometric: int
    support_size: Optional[int] = None
    support: Optional[list[int]] = None


@app.post("/triples", response_model=TriplesResponse)
def triples_endpoint(req: TriplesRequest) -> TriplesResponse:
    a = _set(req.p, req.a)
    b = _set(req.p, req.b) if req.b is not None else a
    c = _set(req.p, req.c) if req.c is not None else a
    counts = _domain(incidence.triple_count, a, b, c)
    resp = TriplesResponse(p=req.p, finite=counts.finite,
                           geometric=counts.geometric)
    if req.support:
        supp = _domain(incidence.triple_support, a, b, c)
        resp.support_size = len(supp)
        resp.support = list(supp.elements)
    return resp


class QuadruplesRequest(BaseModel):
    p: int
    a: list[int]
    b: Optional[list[int]] = None
    c: Optional[list[int]] = None
    d: Optional[list[int]] = None
    oracle: bool = False


class QuadruplesResponse(BaseModel):
    p: int
    finite_sq_sum: int
    degenerate_mass: int
    total: int
    oracle_total: Optional[int] = None


@app.post("/quadruples", response_model=QuadruplesResponse)
def quadruples_endpoint(req: QuadruplesRequest) -> QuadruplesResponse:
    a = _set(req.p, req.a)
    b = _set(req.p, req.b) if req.b is not None else a
    c = _set(req.p, req.c) if req.c is not None else a
    d = _set(req.p, req.d) if req.d is not None else b
    counts = _domain(incidence.quad_count_detail, a, b, c, d)
    resp = QuadruplesResponse(p=req.p, finite_sq_sum=counts.finite_sq_sum,
                              degenerate_mass=counts.degenerate_mass,
                              total=counts.total)
    if req.oracle:
        resp.oracle_total = _domain(incidence.quad_count_geometric, a, b, c, d)
    return resp


class HistogramRequest(BaseModel):
    p: int
    a: list[int]
    b: Optional[list[int]] = None


class HistogramResponse(BaseModel):
    p: int
    buckets: dict[str, int]
    sum_exact: int
    sum_dyadic_lower: int
    lines_counted: int


@app.post("/histogram", response_model=HistogramResponse)
def histogram_endpoint(req: HistogramRequest) -> HistogramResponse:
    a = _set(req.p, req.a)
    b = _set(req.p, req.b) if req.b is not None else a
    h = _domain(incidence.line_histogram, a, b)
    return HistogramResponse(
        p=req.p,
        buckets={f"{i},{j}": n for (i, j), n in sorted(h.buckets.items())},
        sum_exact=h.sum_exact,
        sum_dyadic_lower=h.sum_dyadic_lower,
        lines_counted=h.lines_counted,
    )


class CheckRequest(BaseModel):
    p: int
    name: Literal[
        "q_asymptotic",
        "qabab_upper",
        "t_support",
        "energy",
        "intersection",
        "sigma_product",
        "aa_shift",
    ]
    d: Optional[int] = None
    a: Optional[list[int]] = None
    b: Optional[list[int]] = None
    shifts: Optional[list[int]] = None
    xi: Optional[int] = None
    eta1: int = 1
    eta2: int = 1
    omega1: list[int] = Field(default_factory=lambda: [0])
    omega2: list[int] = Field(default_factory=lambda: [0])
    max_clique_budget: int = decompose.DEFAULT_BUDGET


class BoundReportModel(BaseModel):
    name: str
    lhs: float
    rhs: float
    ratio: float
    preconditions_met: bool
    hard: bool
    passed: Optional[bool] = None
    note: str = ""
    instance: dict = Field(default_factory=dict)
    extras: dict = Field(default_factory=dict)


class CheckResponse(BaseModel):
    p: int
    reports: list[BoundReportModel]
    hard_failures: int


def _to_report_models(reports) -> list[BoundReportModel]:
    out = []
    for r in reports:
        d = r.to_json()
        # starlette's JSON encoder rejects inf/nan; -1 marks "undefined"
        for key in ("lhs", "rhs", "ratio"):
            if not math.isfinite(d[key]):
                d[key] = -1.0
        out.append(BoundReportModel(**d))
    return out


@app.post("/check", response_model=CheckResponse)
def check_endpoint(req: CheckRequest) -> CheckResponse:
    fld = _field(req.p)
    needs_subgroup = req.name in ("energy", "intersection", "sigma_product",
                                  "aa_shift", "qabab_upper")
    sub = None
    if needs_subgroup:
        if req.d is None:
            raise HTTPException(status_code=422,
                                detail=f"check {req.name} requires d")
        sub = _domain(subgroup, fld, req.d)

    if req.name == "q_asymptotic":
        a = _set(req.p, req.a) if req.a is not None else None
        if a is None:
            if req.d is None:
                raise HTTPException(status_code=422,
                                    detail="q_asymptotic requires a or d")
            a = _domain(subgroup, fld, req.d).elements
        reports = [_domain(bounds.check_Q_asymptotic, a)]
    elif req.name == "qabab_upper":
        if req.b is None:
            raise HTTPException(status_code=422, detail="qabab_upper requires b")
        reports = [_domain(bounds.check_QABAB_upper, sub.elements,
                           _set(req.p, req.b))]
    elif req.name == "t_support":
        a = _set(req.p, req.a) if req.a is not None else None
        if a is None:
            if req.d is None:
                raise HTTPException(status_code=422,
                                    detail="t_support requires a or d")
            a = _domain(subgroup, fld, req.d).elements
        reports = _domain(bounds.check_T_support_bounds, a)
    elif req.name == "energy":
        reports = _domain(bounds.check_energy_bounds, sub)
    elif req.name == "intersection":
        if not req.shifts:
            raise HTTPException(status_code=422,
                                detail="intersection requires shifts")
        reports = _domain(bounds.check_intersection_bounds, sub,
                          tuple(req.shifts))
    elif req.name == "sigma_product":
        if req.a is None or req.b is None:
            raise HTTPException(status_code=422,
                                detail="sigma_product requires a and b")
        reports = [_domain(bounds.check_sigma_product,
                           _set(req.p, req.a), _set(req.p, req.b), sub,
                           req.eta1, req.eta2,
                           _set(req.p, req.omega1), _set(req.p, req.omega2))]
    else:  # aa_shift
        if req.xi is None:
            raise HTTPException(status_code=422, detail="aa_shift requires xi")
        res = _domain(decompose.max_ratio_closed_set, fld, sub, req.xi,
                      req.max_clique_budget)
        reports = [_domain(bounds.check_AA_in_shift_bounds, res.best, sub,
                           req.xi)]
    models = _to_report_models(reports)
    return CheckResponse(
        p=req.p,
        reports=models,
        hard_failures=sum(1 for m in models if m.hard and m.passed is False),
    )


class IntersectRequest(BaseModel):
    p: int
    d: int
    shifts: list[int]


class IntersectResponse(BaseModel):
    p: int
    d: int
    shifts: list[int]
    elements: list[int]
    size: int


@app.post("/intersect", response_model=IntersectResponse)
def intersect_endpoint(req: IntersectRequest) -> IntersectResponse:
    fld = _field(req.p)
    sub = _domain(subgroup, fld, req.d)
    out = _domain(bounds.shifted_intersection, sub, tuple(req.shifts))
    return IntersectResponse(p=req.p, d=req.d, shifts=req.shifts,
                             elements=list(out.elements), size=len(out))


class DecomposeRequest(BaseModel):
    p: int
    elements: list[int]
    find_all: bool = False
    oracle: bool = False
    budget: int = decompose.DEFAULT_BUDGET


class WitnessModel(BaseModel):
    B: str
    C: str


class DecomposeResponse(BaseModel):
    target: str
    p: int
    witnesses: list[WitnessModel]
    exhaustive: bool
    nodes: int
    ms: float


def _decompose_response(res: decompose.DecompositionResult) -> DecomposeResponse:
    return DecomposeResponse(**res.to_json())


@app.post("/decompose", response_model=DecomposeResponse)
def decompose_endpoint(req: DecomposeRequest) -> DecomposeResponse:
    a = _set(req.p, req.elements)
    if req.oracle:
        res = _domain(decompose.sumset_decomposable_bruteforce, a)
    else:
        res = _domain(decompose.sumset_decompositions, a, req.find_all,
                      req.budget)
    return _decompose_response(res)


class RatioDecomposeRequest(BaseModel):
    p: int
    elements: list[int]
    budget: int = decompose.DEFAULT_BUDGET


@app.post("/ratio-decompose", response_model=DecomposeResponse)
def ratio_decompose_endpoint(req: RatioDecomposeRequest) -> DecomposeResponse:
    s = _set(req.p, req.elements)
    res = _domain(decompose.ratio_decompositions, s, req.budget)
    return _decompose_response(res)


class MaxSetRequest(BaseModel):
    p: int
    d: int
    xi: int
    budget: int = decompose.DEFAULT_BUDGET


class MaxSetResponse(BaseModel):
    p: int
    d: int
    xi: int
    elements: list[int]
    size: int
    exhaustive: bool
    nodes: int


@app.post("/maxset", response_model=MaxSetResponse)
def maxset_endpoint(req: MaxSetRequest) -> MaxSetResponse:
    fld = _field(req.p)
    if fld.p > 512:
        raise HTTPException(status_code=422,
                            detail="clique search limited to p <= 512")
    sub = _domain(subgroup, fld, req.d)
    res = _domain(decompose.max_ratio_closed_set, fld, sub, req.xi, req.budget)
    return MaxSetResponse(p=req.p, d=req.d, xi=req.xi,
                          elements=list(res.best.elements), size=len(res.best),
                          exhaustive=res.exhaustive, nodes=res.nodes_explored)


class DilateCheckRequest(BaseModel):
    p: int
    d: int
    arbitrary_sets: bool = False


class DilateCheckResponse(BaseModel):
    p: int
    d: int
    found: bool
    a: Optional[list[int]] = None
    xi: Optional[int] = None


@app.post("/dilate-check", response_model=DilateCheckResponse)
def dilate_check_endpoint(req: DilateCheckRequest) -> DilateCheckResponse:
    fld = _field(req.p)
    sub = _domain(subgroup, fld, req.d)
    got = _domain(decompose.small_subgroup_dilate_check, sub,
                  req.arbitrary_sets)
    if got is None:
        return DilateCheckResponse(p=req.p, d=req.d, found=False)
    a, xi = got
    return DilateCheckResponse(p=req.p, d=req.d, found=True,
                               a=list(a.elements), xi=xi)


class SurveyRequest(BaseModel):
    prime_range: tuple[int, int] = (5, 100)
    subgroup_size_range: tuple[int, int] = (2, 40)
    max_subgroup_vs_p_exponent: float = 1.0
    checks: list[str] = ["energy"]
    seed: str = "ffcomb"
    node_budget: int = decompose.DEFAULT_BUDGET
    shift_samples: int = 50
    output_path: str = "survey.jsonl"


class SurveyResponse(BaseModel):
    summary: dict


@app.post("/survey", response_model=SurveyResponse)
def survey_endpoint(req: SurveyRequest) -> SurveyResponse:
    cfg = survey.SurveyConfig(
        prime_range=tuple(req.prime_range),
        subgroup_size_range=tuple(req.subgroup_size_range),
        max_subgroup_vs_p_exponent=req.max_subgroup_vs_p_exponent,
        checks=tuple(req.checks),
        seed=req.seed,
        node_budget=req.node_budget,
        shift_samples=req.shift_samples,
        output_path=req.output_path,
    )
    try:
        cfg.validate()
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    return SurveyResponse(summary=_domain(survey.run_survey, cfg))
