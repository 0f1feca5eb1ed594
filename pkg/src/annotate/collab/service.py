"""HTTP face of the project store.

Plain HTTP/1.1 with UTF-8 JSON bodies; clients poll for changes, there is no
push channel.  Responses that carry a project document return the canonical
bytes unmodified, so document equality can be checked byte-for-byte across
clients.

  POST /projects                     register a canonical document
  GET  /projects/{pid}[?since=rev]   full document, or ops after ``rev``
  POST /projects/{pid}/changes       apply a changeset, per-op statuses back
  GET  /projects/{pid}/export?format=csv
  GET  /healthz
"""

from __future__ import annotations

import contextlib
import json

from fastapi import FastAPI, Request, Response
from starlette.concurrency import run_in_threadpool

from ..errors import (
    DuplicateProject,
    InvalidProject,
    MalformedChangeSet,
    ParseError,
    RevisionAhead,
    SchemaVersionUnsupported,
    StaleSince,
    UnknownProject,
)
from .store import ProjectStore, parse_changeset

_COMPACT = {"separators": (",", ":"), "ensure_ascii": False, "allow_nan": False}


def _json_bytes(obj: object) -> bytes:
    return json.dumps(obj, **_COMPACT).encode("utf-8")


def _json_response(obj: object, status_code: int = 200) -> Response:
    return Response(
        content=_json_bytes(obj),
        status_code=status_code,
        media_type="application/json",
    )


def _error(status_code: int, code: str, detail: str, **extra) -> Response:
    body = {"error": code, "detail": detail}
    body.update(extra)
    return _json_response(body, status_code)


def create_app(store: ProjectStore) -> FastAPI:
    """Build the service over a store; closing happens on lifespan shutdown."""

    @contextlib.asynccontextmanager
    async def lifespan(_app):
        yield
        await run_in_threadpool(store.close)

    app = FastAPI(title="annotate sync service", lifespan=lifespan)

    @app.get("/healthz")
    async def healthz() -> Response:
        return _json_response({"status": "ok"})

    @app.post("/projects")
    async def create_project(request: Request) -> Response:
        body = await request.body()
        try:
            pid, revision = await run_in_threadpool(store.create, body)
        except ParseError as e:
            return _error(400, "parse_error", str(e), position=e.position)
        except SchemaVersionUnsupported as e:
            return _error(400, "schema_version_unsupported", str(e))
        except InvalidProject as e:
            return _error(
                400,
                "invalid_project",
                str(e),
                violations=[
                    {"code": v.code, "subject": v.subject, "message": v.message}
                    for v in e.violations
                ],
            )
        except DuplicateProject as e:
            return _error(409, "duplicate_project", str(e))
        return _json_response({"pid": pid, "revision": revision}, 201)

    @app.get("/projects/{pid}")
    async def get_project(pid: str, since: str | None = None) -> Response:
        try:
            if since is None:
                document = await run_in_threadpool(store.document, pid)
                return Response(content=document, media_type="application/json")
            try:
                since_rev = int(since)
            except ValueError:
                return _error(400, "bad_since", f"since must be an integer, got {since!r}")
            if since_rev < 0:
                return _error(400, "bad_since", "since must be >= 0")
            try:
                revision, records = await run_in_threadpool(store.ops_since, pid, since_rev)
            except StaleSince:
                document = await run_in_threadpool(store.document, pid)
                return Response(content=document, media_type="application/json")
            return _json_response(
                {
                    "pid": pid,
                    "revision": revision,
                    "ops": [record.to_obj() for record in records],
                }
            )
        except UnknownProject as e:
            return _error(404, "unknown_project", str(e))
        except RevisionAhead as e:
            return _error(409, "revision_ahead", str(e))

    @app.post("/projects/{pid}/changes")
    async def post_changes(pid: str, request: Request) -> Response:
        body = await request.body()
        try:
            payload = json.loads(body)
        except json.JSONDecodeError as e:
            return _error(400, "parse_error", e.msg, position=e.pos)
        try:
            changeset = parse_changeset(payload)
            revision, statuses = await run_in_threadpool(
                store.apply_changeset, pid, changeset
            )
        except MalformedChangeSet as e:
            return _error(400, "malformed_changeset", str(e))
        except UnknownProject as e:
            return _error(404, "unknown_project", str(e))
        return _json_response({"revision": revision, "accepted": statuses})

    @app.get("/projects/{pid}/export")
    async def export_project(pid: str, format: str | None = None) -> Response:
        if format != "csv":
            return _error(400, "unknown_format", f"format must be 'csv', got {format!r}")
        try:
            data = await run_in_threadpool(store.export_csv, pid)
        except UnknownProject as e:
            return _error(404, "unknown_project", str(e))
        return Response(content=data, media_type="text/csv; charset=utf-8")

    return app
