"""Local HTTP JSON API for the planning calculators and scripted clients.

Stateless: every endpoint is a pure function of its request body, so
repeated identical requests produce identical responses.  Validation
failures return 400 with field-level messages; infeasible plans return 422
and name the smallest unlabeled pool that would work.  Unknown body fields
are rejected.
"""

from __future__ import annotations

from typing import Literal

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict

from . import __version__, api
from .calibration import PilotSample, estimate_moments
from .errors import DomainError, InfeasiblePlanError, PredPowerError
from .power import rule_of_thumb

app = FastAPI(title="predpower planning service", version=__version__)


@app.middleware("http")
async def _require_json(request: Request, call_next):
    if request.method == "POST":
        content_type = request.headers.get("content-type", "")
        if not content_type.lower().startswith("application/json"):
            return JSONResponse(
                status_code=415,
                content={
                    "error": {
                        "code": "unsupported_media_type",
                        "message": "Content-Type must be application/json",
                    }
                },
            )
    return await call_next(request)


class _Body(BaseModel):
    model_config = ConfigDict(extra="forbid")


class MeanPlanRequest(_Body):
    sigma2: float | None = None
    rho2: float | None = None
    mse: float | None = None
    p: float | None = None
    se: float | None = None
    sp: float | None = None
    N: float
    delta: float
    alpha: float = 0.05
    power: float = 0.8
    theta0: float = 0.0
    method: Literal["classical", "vanilla", "optimal"] = "optimal"


class TwoSamplePlanRequest(_Body):
    sigma2: float | None = None
    rho2: float | None = None
    mse: float | None = None
    p: float | None = None
    se: float | None = None
    sp: float | None = None
    sigma2_b: float | None = None
    rho2_b: float | None = None
    N: float
    N_b: float | None = None
    delta: float
    alpha: float = 0.05
    power: float = 0.8
    allocation: float = 1.0
    method: Literal["classical", "vanilla", "optimal"] = "optimal"


class TwoByTwoPlanRequest(_Body):
    p0: float
    p1: float
    rho0: float | None = None
    rho1: float | None = None
    se: float | None = None
    sp: float | None = None
    kappa: float = 1.0
    measure: Literal["RR", "OR"] = "RR"
    alpha: float = 0.05
    power: float = 0.8


class RegressionPlanRequest(_Body):
    v_yy: float
    v_ff: float
    v_yf: float
    N: float
    delta: float
    alpha: float = 0.05
    power: float = 0.8


class CalibrateRequest(_Body):
    p: float | None = None
    se: float | None = None
    sp: float | None = None
    var_y: float | None = None
    r2: float | None = None
    mse: float | None = None
    y: list[float] | None = None
    f: list[float] | None = None


@app.exception_handler(RequestValidationError)
async def _validation_handler(request: Request, exc: RequestValidationError):
    details = [
        {
            "field": ".".join(str(part) for part in err["loc"] if part != "body"),
            "message": err["msg"],
        }
        for err in exc.errors()
    ]
    return JSONResponse(
        status_code=400,
        content={"error": {"code": "validation_error", "details": details}},
    )


@app.exception_handler(InfeasiblePlanError)
async def _infeasible_handler(request: Request, exc: InfeasiblePlanError):
    return JSONResponse(
        status_code=422,
        content={
            "error": {
                "code": "infeasible",
                "message": str(exc),
                "min_N": exc.min_n_unlabeled,
            }
        },
    )


@app.exception_handler(PredPowerError)
async def _domain_handler(request: Request, exc: PredPowerError):
    return JSONResponse(
        status_code=400,
        content={"error": {"code": "domain_error", "message": str(exc)}},
    )


@app.get("/v1/healthz")
def healthz() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/v1/plan/mean")
def plan_mean(req: MeanPlanRequest) -> dict:
    return api.plan_mean(
        n_unlabeled=req.N,
        delta=req.delta,
        alpha=req.alpha,
        power=req.power,
        theta0=req.theta0,
        method=req.method,
        sigma2=req.sigma2,
        rho2=req.rho2,
        mse=req.mse,
        p=req.p,
        se=req.se,
        sp=req.sp,
    )


@app.post("/v1/plan/two-sample")
def plan_two_sample(req: TwoSamplePlanRequest) -> dict:
    return api.plan_two_sample(
        n_unlabeled=req.N,
        delta=req.delta,
        alpha=req.alpha,
        power=req.power,
        allocation=req.allocation,
        method=req.method,
        n_unlabeled_b=req.N_b,
        sigma2_b=req.sigma2_b,
        rho2_b=req.rho2_b,
        sigma2=req.sigma2,
        rho2=req.rho2,
        mse=req.mse,
        p=req.p,
        se=req.se,
        sp=req.sp,
    )


@app.post("/v1/plan/paired")
def plan_paired(req: MeanPlanRequest) -> dict:
    return api.plan_paired(
        n_unlabeled=req.N,
        delta=req.delta,
        alpha=req.alpha,
        power=req.power,
        method=req.method,
        sigma2=req.sigma2,
        rho2=req.rho2,
        mse=req.mse,
        p=req.p,
        se=req.se,
        sp=req.sp,
    )


@app.post("/v1/plan/two-by-two")
def plan_two_by_two(req: TwoByTwoPlanRequest) -> dict:
    return api.plan_two_by_two(
        p0=req.p0,
        p1=req.p1,
        rho0=req.rho0,
        rho1=req.rho1,
        se=req.se,
        sp=req.sp,
        kappa=req.kappa,
        measure=req.measure,
        alpha=req.alpha,
        power=req.power,
    )


@app.post("/v1/plan/regression")
def plan_regression(req: RegressionPlanRequest) -> dict:
    return api.plan_regression(
        v_yy=req.v_yy,
        v_ff=req.v_ff,
        v_yf=req.v_yf,
        n_unlabeled=req.N,
        delta=req.delta,
        alpha=req.alpha,
        power=req.power,
    )


@app.post("/v1/calibrate")
def calibrate(req: CalibrateRequest) -> dict:
    if req.y is not None or req.f is not None:
        if req.y is None or req.f is None:
            raise DomainError("pilot calibration needs both y and f arrays")
        if any(
            v is not None for v in (req.p, req.se, req.sp, req.var_y, req.r2, req.mse)
        ):
            raise DomainError("pilot arrays are exclusive with metric calibration")
        pilot = PilotSample(y=tuple(req.y), f=tuple(req.f))
        m = estimate_moments(pilot)
        return {
            "kind": "pilot",
            "n_pairs": len(pilot),
            "var_y": m.var_y,
            "var_f": m.var_f,
            "cov_yf": m.cov_yf,
            "rho": m.rho,
            "rho2": m.rho2,
            "var_eps": m.var_eps,
            "conservative": m.conservative,
            "rule_of_thumb_ratio": rule_of_thumb(m.rho2),
        }
    return api.calibrate_payload(
        p=req.p, se=req.se, sp=req.sp, var_y=req.var_y, r2=req.r2, mse=req.mse
    )
