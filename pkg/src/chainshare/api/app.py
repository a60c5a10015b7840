"""HTTP facade over the ledger: the consortium-formation workflow as routes.

Every mutating endpoint translates its body into exactly one transaction and
appends it; reads render canonical JSON so that equal state produces
byte-identical responses.  Domain errors map onto the ApiError shape
(httpStatus, code, detail, path).

Configuration comes from the environment unless passed explicitly:

- ``CHAINSHARE_LEDGER``: path of the append-only log (default: in-memory);
- ``CHAINSHARE_AUTH_TOKENS``: path of a JSON object mapping bearer tokens to
  actor ids; when unset, requests act as "anonymous".
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Any

from fastapi import Depends, FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from starlette.exceptions import HTTPException as StarletteHTTPException

from ..canonical import canonical_bytes
from ..errors import (
    ChainShareError,
    CorruptLog,
    DegenerateSupply,
    DuplicateKey,
    EmptyGroup,
    IllegalTransition,
    MalformedDocument,
    MissingOriginatorNode,
    SchemaViolation,
    UnknownRequest,
    ValidationFailed,
    ZeroTotalIncome,
)
from ..ledger import Ledger, Phase, Transaction, TransactionKind
from .schemas import (
    CreateRequestBody,
    EmptyBody,
    FinancialServiceBody,
    ItServiceBody,
    ResourceGroupBody,
    SharingOptionsBody,
    SupplyBody,
)

_STATUS_BY_ERROR: list[tuple[type[ChainShareError], int]] = [
    (MalformedDocument, 400),
    (SchemaViolation, 400),
    (UnknownRequest, 404),
    (IllegalTransition, 409),
    (DuplicateKey, 409),
    (ValidationFailed, 422),
    (DegenerateSupply, 422),
    (EmptyGroup, 422),
    (MissingOriginatorNode, 422),
    (ZeroTotalIncome, 422),
    (CorruptLog, 500),
]


def _canonical_response(tree: Any, status_code: int = 200) -> Response:
    return Response(
        content=canonical_bytes(tree),
        status_code=status_code,
        media_type="application/json",
    )


def _error_response(status: int, code: str, detail: str, path: str | None = None,
                    extra: dict | None = None) -> Response:
    tree: dict[str, Any] = {"httpStatus": status, "code": code, "detail": detail}
    if path is not None:
        tree["path"] = path
    if extra:
        tree.update(extra)
    return _canonical_response(tree, status_code=status)


def _load_auth_tokens(path: str | Path | None) -> dict[str, str] | None:
    if path is None:
        return None
    with open(path, "rb") as handle:
        mapping = json.load(handle)
    if not isinstance(mapping, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in mapping.items()
    ):
        raise ValueError("auth token file must map token strings to actor ids")
    return mapping


class _Unauthorized(Exception):
    pass


def create_app(
    ledger_path: str | Path | None = None,
    auth_tokens_path: str | Path | None = None,
) -> FastAPI:
    """Build the service; falls back to CHAINSHARE_* environment variables."""
    if ledger_path is None:
        ledger_path = os.environ.get("CHAINSHARE_LEDGER") or None
    if auth_tokens_path is None:
        auth_tokens_path = os.environ.get("CHAINSHARE_AUTH_TOKENS") or None

    ledger = Ledger(ledger_path)
    tokens = _load_auth_tokens(auth_tokens_path)
    app = FastAPI(title="chainshare", version="0.1.0")
    app.state.ledger = ledger

    def actor_of(request: Request) -> str:
        header = request.headers.get("authorization", "")
        token = header.removeprefix("Bearer ").strip() if header.startswith("Bearer ") else ""
        if tokens is None:
            return token or "anonymous"
        if token and token in tokens:
            return tokens[token]
        raise _Unauthorized

    @app.exception_handler(_Unauthorized)
    async def unauthorized_handler(_request: Request, _exc: _Unauthorized) -> Response:
        return _error_response(401, "UNAUTHORIZED", "missing or unknown bearer token")

    @app.exception_handler(ChainShareError)
    async def domain_error_handler(_request: Request, exc: ChainShareError) -> Response:
        status = 500
        for error_type, error_status in _STATUS_BY_ERROR:
            if isinstance(exc, error_type):
                status = error_status
                break
        extra: dict[str, Any] = {}
        path = exc.path
        if isinstance(exc, ValidationFailed):
            report = exc.report.to_dict()
            extra["violations"] = report["violations"]
            if report["violations"]:
                path = report["violations"][0]["path"]
        return _error_response(status, exc.code, exc.detail, path, extra)

    @app.exception_handler(RequestValidationError)
    async def body_error_handler(_request: Request, exc: RequestValidationError) -> Response:
        first = exc.errors()[0] if exc.errors() else {}
        loc = [str(part) for part in first.get("loc", ()) if part != "body"]
        path = "$" + "".join(f".{part}" for part in loc)
        return _error_response(400, "SCHEMA_VIOLATION", first.get("msg", "invalid body"), path)

    @app.exception_handler(StarletteHTTPException)
    async def http_error_handler(_request: Request, exc: StarletteHTTPException) -> Response:
        code = {404: "NOT_FOUND", 405: "BAD_REQUEST"}.get(exc.status_code, "BAD_REQUEST")
        return _error_response(exc.status_code, code, str(exc.detail))

    def submit(kind: TransactionKind, request_id: int, actor: str,
               payload: dict, timestamp: int) -> Response:
        block = ledger.append(
            Transaction(
                kind=kind,
                request_id=request_id,
                actor_id=actor,
                payload=payload,
                timestamp=timestamp,
            )
        )
        return _canonical_response(
            {"sequence": block.sequence, "blockHash": block.block_hash.hex()},
            status_code=201,
        )

    @app.post("/requests", status_code=201)
    def create_request(body: CreateRequestBody, actor: str = Depends(actor_of)) -> Response:
        payload = {
            "originator": body.originator,
            "p": body.p,
            "d": body.d,
            "levs": body.levs,
            "ress": body.ress,
            "sups": body.sups,
        }
        return submit(TransactionKind.CREATE_REQUEST, body.requestId, actor, payload, body.timestamp)

    @app.post("/requests/{request_id}/options", status_code=201)
    def set_options(request_id: int, body: SharingOptionsBody,
                    actor: str = Depends(actor_of)) -> Response:
        payload: dict[str, Any] = {"scheme": body.scheme, "costPolicy": body.costPolicy}
        if body.platformQuota is not None:
            payload["platformQuota"] = body.platformQuota
        if body.originatorNode is not None:
            node = body.originatorNode
            payload["originatorNode"] = {"i": node.i, "k": node.k, "m": node.m}
        return submit(TransactionKind.SET_SHARING_OPTIONS, request_id, actor, payload, body.timestamp)

    @app.post("/requests/{request_id}/levels/{level}/resources/{resource}", status_code=201)
    def add_resource_group(request_id: int, level: int, resource: int,
                           body: ResourceGroupBody, actor: str = Depends(actor_of)) -> Response:
        payload = {
            "i": level,
            "k": resource,
            "resourceName": body.resourceName,
            "g": body.g,
            "BOM": body.BOM,
        }
        return submit(TransactionKind.ADD_RESOURCE_GROUP, request_id, actor, payload, body.timestamp)

    @app.post(
        "/requests/{request_id}/levels/{level}/resources/{resource}/supplies",
        status_code=201,
    )
    def add_supply(request_id: int, level: int, resource: int,
                   body: SupplyBody, actor: str = Depends(actor_of)) -> Response:
        payload = {
            "i": level,
            "k": resource,
            "m": body.m,
            "supplierName": body.supplierName,
            "supplierId": body.supplierId,
            "cf": body.cf,
            "cv": body.cv,
            "additionalData": dict(body.additionalData),
            "q": body.q,
            "tp": body.tp,
        }
        return submit(TransactionKind.ADD_SUPPLY, request_id, actor, payload, body.timestamp)

    @app.post("/requests/{request_id}/services/financial", status_code=201)
    def add_financial_service(request_id: int, body: FinancialServiceBody,
                              actor: str = Depends(actor_of)) -> Response:
        payload = {
            "serviceName": body.serviceName,
            "uri": body.uri,
            "providerId": body.providerId,
            "invested": body.invested,
            "ratio": body.ratio,
        }
        return submit(TransactionKind.ADD_FINANCIAL_SERVICE, request_id, actor, payload, body.timestamp)

    @app.post("/requests/{request_id}/services/it", status_code=201)
    def add_it_service(request_id: int, body: ItServiceBody,
                       actor: str = Depends(actor_of)) -> Response:
        payload = {
            "serviceName": body.serviceName,
            "uri": body.uri,
            "providerId": body.providerId,
            "access": body.access,
            "cost": body.cost,
        }
        return submit(TransactionKind.ADD_IT_SERVICE, request_id, actor, payload, body.timestamp)

    @app.post("/requests/{request_id}/seal", status_code=201)
    def seal_request(request_id: int, body: EmptyBody | None = None,
                     actor: str = Depends(actor_of)) -> Response:
        timestamp = body.timestamp if body is not None else 0
        return submit(TransactionKind.SEAL_REQUEST, request_id, actor, {}, timestamp)

    @app.post("/requests/{request_id}/run", status_code=201)
    def run_request(request_id: int, body: EmptyBody | None = None,
                    actor: str = Depends(actor_of)) -> Response:
        timestamp = body.timestamp if body is not None else 0
        return submit(TransactionKind.RUN_SHARING, request_id, actor, {}, timestamp)

    @app.get("/requests/{request_id}")
    def get_request_view(request_id: int) -> Response:
        from ..descriptor import chain_to_tree
        from ..engine import result_to_tree

        state = ledger.request_state(request_id)
        tree = {
            "phase": state.phase.value,
            "chain": chain_to_tree(state.chain),
            "result": None if state.result is None else result_to_tree(state.result),
        }
        return _canonical_response(tree)

    @app.get("/requests/{request_id}/result")
    def get_result(request_id: int) -> Response:
        from ..engine import result_to_tree

        state = ledger.request_state(request_id)
        if state.phase is not Phase.COMPUTED or state.result is None:
            return _error_response(
                404, "NOT_FOUND", f"request {request_id} has no computed result"
            )
        return _canonical_response(result_to_tree(state.result))

    @app.get("/ledger/integrity")
    def ledger_integrity() -> Response:
        return _canonical_response(
            {
                "ok": ledger.verify(),
                "blocks": len(ledger),
                "stateHash": ledger.state_hash().hex(),
            }
        )

    return app
