import logging
import time
from contextlib import asynccontextmanager
from typing import Any, Callable, Dict, List, Optional

import uvicorn
from fastapi import FastAPI, File, HTTPException, UploadFile
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field, ValidationError

import polyenc.config as config
from polyenc.cli import (
    RunConfig,
    analysis_report,
    encoding_text,
    load_problem,
    run_check,
    run_encode,
    run_stats,
)
from polyenc.errors import InputError
from polyenc.logic import Problem
from polyenc.monomorph import monomorphise
from polyenc.pipeline import scheme_table
from polyenc.state import RunHistory
from polyenc.tptp import TptpLevel, print_problem, provenance

logging.basicConfig(level=getattr(logging, config.LOG_LEVEL.upper(), logging.INFO))
logger = logging.getLogger(__name__)


@asynccontextmanager
async def lifespan(app: FastAPI):
    logger.info("Service started. Corpus at %s, %d schemes", config.CORPUS_DIR, len(scheme_table()))
    yield


app = FastAPI(title="polyenc type-encoding service", openapi_url="/openapi.json", lifespan=lifespan)
app.add_middleware(
    CORSMiddleware,
    allow_origins=config.CORS_ORIGINS,
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

history = RunHistory(config.HISTORY_PATH or None, config.HISTORY_LIMIT)


class ProblemRequest(BaseModel):
    problem: Optional[str] = None
    problem_id: Optional[str] = None
    level: Optional[TptpLevel] = None
    infinite: List[str] = Field(default_factory=list)
    protect_extra: List[str] = Field(default_factory=list)


class EncodeRequest(ProblemRequest):
    scheme: str
    mono: bool = False
    cover_policy: str = config.COVER_POLICY
    witness_policy: str = config.WITNESS_POLICY
    mono_iterations: int = config.MONO_ITERATIONS
    mono_budget: int = config.MONO_BUDGET


class AnalyzeRequest(ProblemRequest):
    cover_policy: str = config.COVER_POLICY


class MonomorphiseRequest(ProblemRequest):
    mono_iterations: int = config.MONO_ITERATIONS
    mono_budget: int = config.MONO_BUDGET


class CheckRequest(ProblemRequest):
    expect: str
    scheme: Optional[str] = None
    mono: bool = False
    steps: int = config.STEP_LIMIT
    bound: int = config.MODEL_BOUND
    time_limit: Optional[float] = config.REFUTE_SECONDS


class StatsRequest(ProblemRequest):
    scheme: Optional[str] = None
    mono: bool = False
    clausify: bool = True


def _problem_text(body: ProblemRequest) -> str:
    if body.problem is not None:
        return body.problem
    if body.problem_id:
        item = history.upload(body.problem_id)
        if item is None:
            raise InputError(f"unknown problem id {body.problem_id}")
        return item["text"]
    raise InputError("request needs either 'problem' or 'problem_id'")


def _run(command: str, body: ProblemRequest, work: Callable[[Problem, RunConfig], Dict[str, Any]]) -> JSONResponse:
    """Validate, run and record one command; input errors become HTTP 400."""
    started = time.perf_counter()
    try:
        options = body.model_dump(exclude={"problem", "problem_id", "level"})
        cfg = RunConfig(command=command, **options)
        problem = load_problem(_problem_text(body), body.level)
        result = work(problem, cfg)
    except (InputError, ValidationError) as exc:
        history.record(command, False, {"error": str(exc)}, time.perf_counter() - started)
        raise HTTPException(status_code=400, detail=str(exc))
    summary = {k: v for k, v in result.items() if k in ("scheme", "verdict", "formulas", "clauses", "dropped")}
    history.record(command, True, summary, time.perf_counter() - started)
    return JSONResponse(result)


def _encode(problem: Problem, cfg: RunConfig) -> Dict[str, Any]:
    encoding = run_encode(problem, cfg)
    out = encoding.encoded.problem
    return {
        "scheme": encoding.scheme.name,
        "output": encoding_text(encoding),
        "provenance": provenance(out),
        "formulas": len(out.formulas),
        "added_axioms": len(encoding.encoded.added_axioms),
        "dropped": list(encoding.mono.dropped) if encoding.mono else [],
    }


def _monomorphise(problem: Problem, cfg: RunConfig) -> Dict[str, Any]:
    result = monomorphise(problem, cfg.mono_config)
    return {
        "output": print_problem(result.problem, TptpLevel.TFF0),
        "formulas": len(result.problem.formulas),
        "dropped": list(result.dropped),
        "rounds": result.rounds,
        "added": result.added,
    }


@app.post("/encode")
async def encode(body: EncodeRequest) -> JSONResponse:
    return _run("encode", body, _encode)


@app.post("/analyze")
async def analyze(body: AnalyzeRequest) -> JSONResponse:
    return _run("analyze", body, analysis_report)


@app.post("/monomorphise")
async def monomorphise_problem(body: MonomorphiseRequest) -> JSONResponse:
    return _run("monomorphise", body, _monomorphise)


@app.post("/check")
async def check(body: CheckRequest) -> JSONResponse:
    return _run("check", body, lambda problem, cfg: run_check(problem, cfg).to_dict())


@app.post("/stats")
async def stats(body: StatsRequest) -> JSONResponse:
    return _run("stats", body, lambda problem, cfg: run_stats(problem, cfg).to_dict())


@app.post("/upload")
async def upload(file: UploadFile = File(...)) -> JSONResponse:
    raw = await file.read()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError:
        raise HTTPException(status_code=400, detail="problem files must be UTF-8 text")
    problem_id = history.store_upload(file.filename or "problem.p", text)
    logger.info("Stored upload %s as %s", file.filename, problem_id)
    return JSONResponse({"problem_id": problem_id, "filename": file.filename})


@app.get("/runs")
async def runs(limit: Optional[int] = None) -> JSONResponse:
    return JSONResponse({"runs": history.runs(limit)})


@app.get("/schemes")
async def schemes() -> JSONResponse:
    return JSONResponse({"schemes": scheme_table()})


def run() -> None:
    uvicorn.run("polyenc.main:app", host="0.0.0.0", port=8000, reload=True)


if __name__ == "__main__":
    run()
