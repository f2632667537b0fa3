"""HTTP JSON service exposing ask, verify, and revise."""

from __future__ import annotations

import hashlib
import logging
import threading
import time
from collections import OrderedDict

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import __version__
from .errors import (
    BackendUnavailable,
    BudgetExceeded,
    FixtureMiss,
    NoCandidateCorrection,
    ValidationError,
)
from .llm import ask
from .model import VerdictLabel, VerificationReport, canonical_json
from .pipeline import PipelineConfig, build_components, verify_passage
from .revise import propose_revisions, revision_result_to_dict

logger = logging.getLogger(__name__)

_CACHE_LIMIT = 64


class AskBody(BaseModel):
    query: str


class VerifyBody(BaseModel):
    text: str
    overrides: dict | None = None


class ReviseBody(BaseModel):
    report: dict | None = None
    report_digest: str | None = None


def report_digest(report_dict: dict) -> str:
    return hashlib.sha256(canonical_json(report_dict).encode("utf-8")).hexdigest()


def create_app(config: PipelineConfig) -> FastAPI:
    """Build the service. Stateless across requests except a bounded
    in-memory report cache keyed by report digest (clients may resend
    the report instead)."""
    app = FastAPI(title="factforge", version=__version__)
    if config.cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(config.cors_origins),
            allow_methods=["*"],
            allow_headers=["*"],
        )
    components = build_components(config)
    cache: OrderedDict[str, dict] = OrderedDict()
    cache_lock = threading.Lock()

    def remember(digest: str, report: dict) -> None:
        with cache_lock:
            cache[digest] = report
            cache.move_to_end(digest)
            while len(cache) > _CACHE_LIMIT:
                cache.popitem(last=False)

    @app.get("/api/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__, "config_digest": config.digest()}

    @app.post("/api/ask")
    def api_ask(body: AskBody) -> dict:
        if not body.query.strip():
            raise HTTPException(400, "query must be non-empty")
        try:
            return {"response_text": ask(body.query, components.backend)}
        except BackendUnavailable as exc:
            raise HTTPException(502, {"error": str(exc), "retriable": exc.retriable})
        except FixtureMiss as exc:
            raise HTTPException(502, {"error": str(exc), "retriable": False})

    @app.post("/api/verify")
    def api_verify(body: VerifyBody) -> JSONResponse:
        if not body.text.strip():
            raise HTTPException(400, "text must be non-empty")
        run_config = config
        if body.overrides:
            try:
                run_config = config.apply_overrides(body.overrides)
            except (ValidationError, TypeError) as exc:
                raise HTTPException(400, f"bad overrides: {exc}")
        deadline = time.monotonic() + run_config.budget_s
        try:
            report = verify_passage(body.text, run_config, components, deadline)
        except BudgetExceeded:
            raise HTTPException(504, {"error": "verification budget exceeded",
                                      "partial": False})
        except (BackendUnavailable, FixtureMiss) as exc:
            raise HTTPException(502, {"error": str(exc)})
        payload = report.to_dict()
        digest = report_digest(payload)
        remember(digest, payload)
        return JSONResponse(payload, headers={"X-Report-Digest": digest})

    @app.post("/api/revise")
    def api_revise(body: ReviseBody) -> dict:
        if body.report is None and body.report_digest is None:
            raise HTTPException(400, "send a report or a report_digest")
        report_dict = body.report
        if report_dict is None:
            with cache_lock:
                report_dict = cache.get(body.report_digest)
            if report_dict is None:
                raise HTTPException(404, "report digest not in cache; resend the report")
        try:
            report = VerificationReport.from_dict(report_dict)
        except (KeyError, TypeError, ValueError, ValidationError) as exc:
            raise HTTPException(400, f"malformed report: {exc}")
        if report.provenance != config.digest():
            raise HTTPException(
                409, "report was produced under a different configuration"
            )
        if not any(v.label is VerdictLabel.QUESTIONABLE for v in report.verdicts()):
            raise HTTPException(422, "report contains no questionable facts")
        sentences = []
        for sentence in report.sentences:
            if not any(v.label is VerdictLabel.QUESTIONABLE for v in sentence.verdicts):
                continue
            try:
                result = propose_revisions(sentence.text, sentence.verdicts,
                                           components.backend, components.tasks)
            except NoCandidateCorrection as exc:
                sentences.append({
                    "text": sentence.text,
                    "revisions": [],
                    "no_candidate": [v.triple.to_dict() for v in sentence.verdicts
                                     if v.label is VerdictLabel.QUESTIONABLE],
                    "failed": [],
                    "rejected": 0,
                    "note": str(exc),
                })
                continue
            except (BackendUnavailable, FixtureMiss) as exc:
                raise HTTPException(502, {"error": str(exc)})
            sentences.append(revision_result_to_dict(result))
        return {"sentences": sentences}

    return app
