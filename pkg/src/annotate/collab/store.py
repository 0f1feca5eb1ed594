"""Shared-project store: serialized writes, a revision log, and durability.

Each project gets one logical writer: every mutation happens under the
project's lock and lands in an append-only log of (revision, client_id, op)
records before the call returns.  Reads serialize the in-memory snapshot.

On disk a project is a directory of three files:

  base.json      canonical document as first posted (written once)
  log.jsonl      one JSON record per applied op, appended and flushed
  snapshot.json  periodic canonical document, atomically replaced

Recovery loads the snapshot (or the base) and replays the log tail.  A torn
final log line — the footprint of a crash mid-write — parses as garbage and
is discarded, so an op is either fully applied or absent; replaying from the
base across the whole log must reproduce the live state byte for byte.

Conflict policy is optimistic concurrency per entry: an op whose
base_revision predates the last write to the same entry id is SUPERSEDED
(first writer wins); everything else applies in server arrival order.
Entries present in the posted base document count as last written at the
base's revision.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import threading
from dataclasses import dataclass
from pathlib import Path

from ..errors import (
    AnnotationError,
    DuplicateProject,
    MalformedChangeSet,
    ReplayMismatch,
    RevisionAhead,
    StaleSince,
    UnknownProject,
)
from ..model import MetadataEntry, Project
from ..serialization import (
    export_csv as _export_csv,
    load_project,
    save_project,
    shape_from_obj,
    shape_to_obj,
    value_from_obj,
    value_to_obj,
)

_COMPACT = {"separators": (",", ":"), "ensure_ascii": False, "allow_nan": False}


@dataclass(frozen=True)
class LogRecord:
    """One applied op: the revision it produced, who sent it, and what it did."""

    revision: int
    client_id: str
    op: dict

    def to_obj(self) -> dict:
        return {"revision": self.revision, "client_id": self.client_id, "op": self.op}


@dataclass
class ChangeSet:
    """A client's batch of entry upserts/deletes against a base revision."""

    client_id: str
    base_revision: int
    ops: list[dict]


def parse_changeset(obj: object) -> ChangeSet:
    """Validate the wire form of a changeset; structure only, not semantics."""
    if not isinstance(obj, dict):
        raise MalformedChangeSet("changeset must be an object")
    client_id = obj.get("client_id")
    if not isinstance(client_id, str) or not client_id:
        raise MalformedChangeSet("client_id is mandatory")
    base = obj.get("base_revision")
    if not isinstance(base, int) or isinstance(base, bool) or base < 0:
        raise MalformedChangeSet(f"base_revision must be a non-negative int, got {base!r}")
    ops = obj.get("ops")
    if not isinstance(ops, list) or not ops:
        raise MalformedChangeSet("ops must be a non-empty array")
    for i, op in enumerate(ops):
        if not isinstance(op, dict):
            raise MalformedChangeSet(f"op {i} must be an object")
        t = op.get("type")
        if t == "upsert":
            entry_kwargs_from_obj(op.get("entry"))
        elif t == "delete":
            if not isinstance(op.get("mid"), str) or not op["mid"]:
                raise MalformedChangeSet(f"op {i}: delete needs a mid")
        else:
            raise MalformedChangeSet(f"op {i}: unknown type {t!r}")
    return ChangeSet(client_id, base, list(ops))


def entry_kwargs_from_obj(obj: object) -> dict:
    """Wire entry -> kwargs for Project.upsert_metadata (plus 'mid').

    Raises MalformedChangeSet for structural problems; semantic checks happen
    when the op is applied against the live project.
    """
    if not isinstance(obj, dict):
        raise MalformedChangeSet("entry must be an object")
    file_id = obj.get("file_id")
    if not isinstance(file_id, str) or not file_id:
        raise MalformedChangeSet("entry.file_id must be a non-empty string")
    mid = obj.get("mid")
    if mid is not None and (not isinstance(mid, str) or not mid):
        raise MalformedChangeSet("entry.mid must be a non-empty string when present")
    z_raw = obj.get("z", [])
    if not isinstance(z_raw, list) or not all(
        isinstance(t, (int, float)) and not isinstance(t, bool) for t in z_raw
    ):
        raise MalformedChangeSet(f"entry.z must be a numeric array, got {z_raw!r}")
    xy_raw = obj.get("xy")
    xy = None
    if xy_raw is not None:
        try:
            xy = shape_from_obj(xy_raw)
        except ValueError as e:
            raise MalformedChangeSet(str(e)) from None
    av_raw = obj.get("av", {})
    if not isinstance(av_raw, dict):
        raise MalformedChangeSet("entry.av must be an object")
    av = {}
    for aid, raw in av_raw.items():
        try:
            av[aid] = value_from_obj(raw)
        except ValueError as e:
            raise MalformedChangeSet(str(e)) from None
    return {
        "file_id": file_id,
        "z": tuple(float(t) for t in z_raw),
        "xy": xy,
        "av": av,
        "mid": mid,
    }


def entry_to_wire(mid: str, e: MetadataEntry) -> dict:
    return {
        "mid": mid,
        "file_id": e.file_id,
        "z": list(e.z),
        "xy": shape_to_obj(e.xy) if e.xy is not None else None,
        "av": {aid: value_to_obj(e.av[aid]) for aid in sorted(e.av)},
    }


def apply_logged_op(project: Project, op: dict) -> None:
    """Apply one revision-log op to a project replica.

    Inserts re-mint their id from the replica's counter, which must agree
    with the recorded one — if it does not, the replica has diverged.
    Used both for server recovery and for client-side replay.
    """
    t = op.get("type")
    if t in ("insert", "update"):
        kwargs = entry_kwargs_from_obj(op.get("entry"))
        mid = kwargs.pop("mid")
        if t == "insert":
            minted = project.upsert_metadata(**kwargs)
            if minted != mid:
                raise ReplayMismatch(f"insert minted {minted}, log says {mid}")
        else:
            if mid is None:
                raise ReplayMismatch("update op without a mid")
            project.upsert_metadata(mid=mid, **kwargs)
    elif t == "delete":
        project.delete_metadata(op["mid"])
    else:
        raise ReplayMismatch(f"unknown logged op type {t!r}")


def _op_mid(op: dict) -> str:
    return op["mid"] if op["type"] == "delete" else op["entry"]["mid"]


class _StoredProject:
    __slots__ = (
        "project",
        "initial_revision",
        "base_bytes",
        "log",
        "entry_versions",
        "lock",
        "dirpath",
        "log_fh",
        "ops_since_snapshot",
    )

    def __init__(self, project: Project, initial_revision: int, dirpath: Path | None):
        self.project = project
        self.initial_revision = initial_revision
        self.base_bytes = b""
        self.log: list[LogRecord] = []
        self.entry_versions: dict[str, int] = {
            mid: initial_revision for mid in project.metadata
        }
        self.lock = threading.RLock()
        self.dirpath = dirpath
        self.log_fh = None
        self.ops_since_snapshot = 0


class ProjectStore:
    """All shared projects of one service instance.

    ``data_dir=None`` runs fully in memory (handy for tests and demos);
    otherwise every applied op is flushed to the project's log before the
    changeset call returns, and ``fsync=True`` (the default) additionally
    syncs once per changeset.
    """

    def __init__(
        self,
        data_dir: str | Path | None = None,
        snapshot_interval: int = 100,
        fsync: bool = True,
    ):
        self.data_dir = Path(data_dir) if data_dir is not None else None
        self.snapshot_interval = max(1, int(snapshot_interval))
        self.fsync = fsync
        self._states: dict[str, _StoredProject] = {}
        self._registry_lock = threading.Lock()
        if self.data_dir is not None:
            self.data_dir.mkdir(parents=True, exist_ok=True)
            for child in sorted(self.data_dir.iterdir()):
                if child.is_dir() and (child / "base.json").exists():
                    self._recover(child)

    # -- public API -----------------------------------------------------------

    def pids(self) -> list[str]:
        with self._registry_lock:
            return list(self._states)

    def create(self, document: bytes) -> tuple[str, int]:
        """Register a project from its canonical document; pid must be new."""
        project = load_project(document)
        with self._registry_lock:
            if project.pid in self._states:
                raise DuplicateProject(f"project {project.pid!r} already exists")
            dirpath = self._project_dir(project.pid)
            state = _StoredProject(project, project.revision, dirpath)
            state.base_bytes = save_project(project)
            if dirpath is not None:
                dirpath.mkdir(parents=True, exist_ok=True)
                _write_atomic(dirpath / "base.json", state.base_bytes)
                state.log_fh = open(dirpath / "log.jsonl", "ab")
            self._states[project.pid] = state
        return project.pid, project.revision

    def document(self, pid: str) -> bytes:
        """Canonical bytes of the current snapshot."""
        state = self._state(pid)
        with state.lock:
            return save_project(state.project)

    def project_copy(self, pid: str) -> Project:
        """An isolated copy of the live project (reads never share state)."""
        state = self._state(pid)
        with state.lock:
            return load_project(save_project(state.project))

    def revision(self, pid: str) -> int:
        state = self._state(pid)
        with state.lock:
            return state.project.revision

    def ops_since(self, pid: str, since: int) -> tuple[int, list[LogRecord]]:
        """All ops with revision > ``since``, in log order.

        Raises RevisionAhead when the client claims a future revision and
        StaleSince when ``since`` predates this server's log (client must
        refetch the full document).
        """
        state = self._state(pid)
        with state.lock:
            current = state.project.revision
            if since > current:
                raise RevisionAhead(f"since={since} is ahead of server revision {current}")
            if since < state.initial_revision:
                raise StaleSince(
                    f"since={since} predates the log (starts at {state.initial_revision})"
                )
            return current, list(state.log[since - state.initial_revision :])

    def apply_changeset(self, pid: str, changeset: ChangeSet) -> tuple[int, list[dict]]:
        """Apply ops in order, each atomically; returns per-op statuses.

        Status is ``applied`` (with the entry id and new revision),
        ``superseded`` (stale base for an entry someone else wrote since), or
        ``rejected`` (semantic failure; other ops are unaffected).
        """
        state = self._state(pid)
        with state.lock:
            if changeset.base_revision > state.project.revision:
                raise MalformedChangeSet(
                    f"base_revision {changeset.base_revision} is ahead of server "
                    f"revision {state.project.revision}"
                )
            statuses = []
            applied = 0
            for op in changeset.ops:
                status = self._apply_op(state, changeset, op)
                if status["status"] == "applied":
                    applied += 1
                statuses.append(status)
            if applied:
                if state.log_fh is not None and self.fsync:
                    os.fsync(state.log_fh.fileno())
                state.ops_since_snapshot += applied
                if state.ops_since_snapshot >= self.snapshot_interval:
                    self._write_snapshot(state)
            return state.project.revision, statuses

    def export_csv(self, pid: str) -> bytes:
        state = self._state(pid)
        with state.lock:
            return _export_csv(state.project)

    def log_records(self, pid: str) -> list[LogRecord]:
        state = self._state(pid)
        with state.lock:
            return list(state.log)

    def base_document(self, pid: str) -> bytes:
        """The canonical document as first posted — the replay starting point."""
        return self._state(pid).base_bytes

    def flush(self, pid: str | None = None) -> None:
        """Write snapshots now (all projects, or one)."""
        targets = [pid] if pid is not None else self.pids()
        for target in targets:
            state = self._state(target)
            with state.lock:
                self._write_snapshot(state)

    def close(self) -> None:
        self.flush()
        for state in self._states.values():
            with state.lock:
                if state.log_fh is not None:
                    state.log_fh.close()
                    state.log_fh = None

    # -- internals ---------------------------------------------------------------

    def _state(self, pid: str) -> _StoredProject:
        with self._registry_lock:
            state = self._states.get(pid)
        if state is None:
            raise UnknownProject(f"project {pid!r} does not exist")
        return state

    def _project_dir(self, pid: str) -> Path | None:
        if self.data_dir is None:
            return None
        safe = re.sub(r"[^A-Za-z0-9._-]+", "_", pid)[:64]
        digest = hashlib.sha1(pid.encode("utf-8")).hexdigest()[:8]
        return self.data_dir / f"{safe}-{digest}"

    def _apply_op(self, state: _StoredProject, cs: ChangeSet, op: dict) -> dict:
        project = state.project
        if op["type"] == "upsert":
            kwargs = entry_kwargs_from_obj(op["entry"])
            mid = kwargs.pop("mid")
            if mid is not None:
                last = state.entry_versions.get(mid)
                if last is not None and last > cs.base_revision:
                    return {"status": "superseded", "mid": mid}
                try:
                    project.upsert_metadata(mid=mid, **kwargs)
                except AnnotationError as e:
                    return {"status": "rejected", "mid": mid, "cause": type(e).__name__}
                logged = {"type": "update", "entry": entry_to_wire(mid, project.metadata[mid])}
            else:
                try:
                    mid = project.upsert_metadata(**kwargs)
                except AnnotationError as e:
                    return {"status": "rejected", "mid": None, "cause": type(e).__name__}
                logged = {"type": "insert", "entry": entry_to_wire(mid, project.metadata[mid])}
        else:
            mid = op["mid"]
            last = state.entry_versions.get(mid)
            if last is not None and last > cs.base_revision:
                return {"status": "superseded", "mid": mid}
            try:
                project.delete_metadata(mid)
            except AnnotationError as e:
                return {"status": "rejected", "mid": mid, "cause": type(e).__name__}
            logged = {"type": "delete", "mid": mid}

        revision = project.revision
        state.entry_versions[mid] = revision
        record = LogRecord(revision, cs.client_id, logged)
        state.log.append(record)
        if state.log_fh is not None:
            line = json.dumps(record.to_obj(), **_COMPACT) + "\n"
            state.log_fh.write(line.encode("utf-8"))
            state.log_fh.flush()
        return {"status": "applied", "mid": mid, "revision": revision}

    def _write_snapshot(self, state: _StoredProject) -> None:
        if state.dirpath is None:
            state.ops_since_snapshot = 0
            return
        _write_atomic(state.dirpath / "snapshot.json", save_project(state.project))
        state.ops_since_snapshot = 0

    def _recover(self, dirpath: Path) -> None:
        base_bytes = (dirpath / "base.json").read_bytes()
        base = load_project(base_bytes)
        initial = base.revision
        records, good_end, raw_len = _read_log(dirpath / "log.jsonl", initial)
        if good_end != raw_len:
            with open(dirpath / "log.jsonl", "r+b") as fh:
                fh.truncate(good_end)

        project = None
        snap_path = dirpath / "snapshot.json"
        snapshot_revision = initial
        if snap_path.exists():
            try:
                candidate = load_project(snap_path.read_bytes())
            except AnnotationError:
                candidate = None
            if (
                candidate is not None
                and candidate.pid == base.pid
                and initial <= candidate.revision <= initial + len(records)
            ):
                project = candidate
                snapshot_revision = candidate.revision
        if project is None:
            project = base

        state = _StoredProject(base, initial, dirpath)
        state.project = project
        state.base_bytes = base_bytes
        for record in records:
            if record.revision > project.revision:
                apply_logged_op(project, record.op)
            state.entry_versions[_op_mid(record.op)] = record.revision
        state.log = records
        state.ops_since_snapshot = (initial + len(records)) - snapshot_revision
        state.log_fh = open(dirpath / "log.jsonl", "ab")
        with self._registry_lock:
            self._states[project.pid] = state


def _read_log(path: Path, initial_revision: int) -> tuple[list[LogRecord], int, int]:
    """Parse complete, contiguous log lines; report where good data ends."""
    if not path.exists():
        return [], 0, 0
    raw = path.read_bytes()
    records: list[LogRecord] = []
    pos = 0
    good_end = 0
    expected = initial_revision + 1
    while True:
        newline = raw.find(b"\n", pos)
        if newline == -1:
            break
        line = raw[pos:newline]
        try:
            obj = json.loads(line.decode("utf-8"))
            record = LogRecord(obj["revision"], obj["client_id"], obj["op"])
            if record.revision != expected or not isinstance(record.op, dict):
                break
            _op_mid(record.op)  # structural sanity; raises KeyError if torn
        except (ValueError, KeyError, TypeError, UnicodeDecodeError):
            break
        records.append(record)
        expected += 1
        pos = newline + 1
        good_end = pos
    return records, good_end, len(raw)


def _write_atomic(path: Path, data: bytes) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(data)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)
