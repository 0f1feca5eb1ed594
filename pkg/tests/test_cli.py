import json
import os
import signal
import socket
import subprocess
import sys
import time
from pathlib import Path

import httpx
import pytest
from click.testing import CliRunner

from annotate import Anchor, InputType, Media, Rect, create_project, export_csv, load_project, save_project
from annotate.cli import main


@pytest.fixture
def runner():
    return CliRunner()


def write_fixture(tmp_path, name="atc") -> Path:
    p = create_project("cli fixture", pid="p-cli")
    fid = p.add_file("atc.wav", Media.AUDIO, duration=60.0)
    spk = p.add_attribute("speaker", Anchor.TEMPORAL_SEGMENT, InputType.TEXT)
    p.upsert_metadata(fid, z=[3.1, 9.2], av={spk: "pilot"})
    path = tmp_path / f"{name}.json"
    path.write_bytes(save_project(p))
    return path


# -- validate ------------------------------------------------------------------


def test_validate_ok(tmp_path, runner):
    path = write_fixture(tmp_path)
    result = runner.invoke(main, ["validate", str(path)])
    assert result.exit_code == 0
    assert result.output == "OK\n"


def test_validate_reports_violations_exit_1(tmp_path, runner):
    path = write_fixture(tmp_path)
    doc = json.loads(path.read_bytes())
    del doc["attributes"]["a2"]  # dangle the speaker reference
    path.write_bytes(json.dumps(doc).encode())
    result = runner.invoke(main, ["validate", str(path)])
    assert result.exit_code == 1
    lines = [l for l in result.output.splitlines() if l]
    assert len(lines) == 1
    assert "dangling_attribute" in lines[0]


def test_validate_missing_file_exit_3(tmp_path, runner):
    result = runner.invoke(main, ["validate", str(tmp_path / "missing.json")])
    assert result.exit_code == 3


def test_validate_corrupt_file_exit_3(tmp_path, runner):
    path = tmp_path / "corrupt.json"
    path.write_bytes(b'{"schema_version"')
    result = runner.invoke(main, ["validate", str(path)])
    assert result.exit_code == 3


def test_validate_strict_upgrades_unknown_keys(tmp_path, runner):
    path = write_fixture(tmp_path)
    doc = json.loads(path.read_bytes())
    doc["surprise"] = 1
    path.write_bytes(json.dumps(doc).encode())
    assert runner.invoke(main, ["validate", str(path)]).exit_code == 0
    assert runner.invoke(main, ["validate", str(path), "--strict"]).exit_code == 1


# -- export ---------------------------------------------------------------------


def test_export_csv_to_stdout(tmp_path, runner):
    path = write_fixture(tmp_path)
    result = runner.invoke(main, ["export", "--format", "csv", str(path)])
    assert result.exit_code == 0
    assert result.stdout_bytes == export_csv(load_project(path.read_bytes()))


def test_export_csv_to_file(tmp_path, runner):
    path = write_fixture(tmp_path)
    out = tmp_path / "out.csv"
    result = runner.invoke(main, ["export", "--format", "csv", str(path), "-o", str(out)])
    assert result.exit_code == 0
    assert out.read_bytes() == export_csv(load_project(path.read_bytes()))


def test_export_unknown_format_exit_2(tmp_path, runner):
    path = write_fixture(tmp_path)
    result = runner.invoke(main, ["export", "--format", "xml", str(path)])
    assert result.exit_code == 2


def test_export_invalid_project_exit_1(tmp_path, runner):
    path = write_fixture(tmp_path)
    doc = json.loads(path.read_bytes())
    doc["metadata"]["m3"]["z"] = [9.2, 3.1]
    path.write_bytes(json.dumps(doc).encode())
    result = runner.invoke(main, ["export", "--format", "csv", str(path)])
    assert result.exit_code == 1


def test_export_empty_project_header_only(tmp_path, runner):
    path = tmp_path / "empty.json"
    path.write_bytes(save_project(create_project("empty", pid="p-e")))
    result = runner.invoke(main, ["export", "--format", "csv", str(path)])
    assert result.exit_code == 0
    assert result.stdout_bytes == b"filename,media,metadata_id,z,shape,attributes\n"


def test_export_output_is_byte_identical_across_runs(tmp_path, runner):
    path = write_fixture(tmp_path)
    a = runner.invoke(main, ["export", "--format", "csv", str(path)]).stdout_bytes
    b = runner.invoke(main, ["export", "--format", "csv", str(path)]).stdout_bytes
    assert a == b


# -- stats -----------------------------------------------------------------------


def test_stats_diarisation_totals(tmp_path, runner):
    path = write_fixture(tmp_path)
    result = runner.invoke(main, ["stats", str(path)])
    assert result.exit_code == 0
    lines = result.output.splitlines()
    assert lines[0] == "attribute\tvalue\tcount\tseconds"
    assert "speaker\tpilot\t1\t6.1" in lines[1]


def test_stats_by_attribute_group_counts(tmp_path, runner):
    p = create_project("tracks", pid="p-t")
    vid = p.add_file("ep1.mp4", Media.VIDEO)
    good = p.add_attribute(
        "is_good_track", Anchor.SPATIAL_REGION, InputType.RADIO, {1: "Yes", 2: "No"}
    )
    for i in range(4):
        p.upsert_metadata(vid, xy=Rect(i, 0, 5, 5), av={good: "1"})
    for i in range(2):
        p.upsert_metadata(vid, xy=Rect(i, 10, 5, 5), av={good: "2"})
    path = tmp_path / "tracks.json"
    path.write_bytes(save_project(p))
    result = runner.invoke(main, ["stats", str(path), "--by", "is_good_track"])
    assert result.exit_code == 0
    assert "is_good_track\tYes\t4" in result.output
    assert "is_good_track\tNo\t2" in result.output


def test_stats_unknown_attribute_exit_2(tmp_path, runner):
    path = write_fixture(tmp_path)
    result = runner.invoke(main, ["stats", str(path), "--by", "nope"])
    assert result.exit_code == 2


def test_stats_empty_project_empty_table(tmp_path, runner):
    path = tmp_path / "empty.json"
    path.write_bytes(save_project(create_project("empty", pid="p-e")))
    result = runner.invoke(main, ["stats", str(path)])
    assert result.exit_code == 0
    assert result.output == ""


# -- serve -----------------------------------------------------------------------


def free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


def start_server(port: int, data_dir: Path) -> subprocess.Popen:
    proc = subprocess.Popen(
        [sys.executable, "-m", "annotate", "serve", "--port", str(port), "--data", str(data_dir)],
        stdout=subprocess.PIPE,
        stderr=subprocess.PIPE,
    )
    deadline = time.time() + 15
    while time.time() < deadline:
        if proc.poll() is not None:
            raise AssertionError(f"server died: {proc.stderr.read().decode()}")
        try:
            r = httpx.get(f"http://127.0.0.1:{port}/healthz", timeout=0.5)
            if r.status_code == 200:
                return proc
        except httpx.HTTPError:
            time.sleep(0.05)
    proc.kill()
    raise AssertionError("server did not come up")


def stop(proc: subprocess.Popen) -> None:
    if proc.poll() is None:
        proc.kill()
        proc.wait(timeout=10)


def test_serve_occupied_port_exit_3(tmp_path, runner):
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        port = s.getsockname()[1]
        result = runner.invoke(main, ["serve", "--port", str(port), "--data", str(tmp_path)])
        assert result.exit_code == 3


def test_serve_restart_keeps_documents(tmp_path):
    port = free_port()
    doc = save_project(_server_fixture())
    proc = start_server(port, tmp_path)
    try:
        r = httpx.post(f"http://127.0.0.1:{port}/projects", content=doc, timeout=5)
        assert r.status_code == 201
        before = httpx.get(f"http://127.0.0.1:{port}/projects/p-srv", timeout=5).content
    finally:
        stop(proc)
    port = free_port()
    proc = start_server(port, tmp_path)
    try:
        after = httpx.get(f"http://127.0.0.1:{port}/projects/p-srv", timeout=5).content
        assert after == before == doc
    finally:
        stop(proc)


def test_serve_sigkill_mid_write_recovers_cleanly(tmp_path):
    port = free_port()
    p = _server_fixture()
    doc = save_project(p)
    fid = next(iter(p.files))
    spk = next(iter(p.attributes))
    proc = start_server(port, tmp_path)
    try:
        httpx.post(f"http://127.0.0.1:{port}/projects", content=doc, timeout=5)
        base = 2
        for i in range(40):
            ops = [
                {"type": "upsert", "entry": {"file_id": fid, "z": [i + j, i + j + 0.5], "av": {spk: "x"}}}
                for j in range(3)
            ]
            body = {"client_id": "storm", "base_revision": base, "ops": ops}
            try:
                r = httpx.post(
                    f"http://127.0.0.1:{port}/projects/p-srv/changes",
                    content=json.dumps(body),
                    timeout=5,
                )
                base = r.json()["revision"]
            except httpx.HTTPError:
                break
            if i == 20:
                os.kill(proc.pid, signal.SIGKILL)  # mid-storm, quite possibly mid-write
    finally:
        stop(proc)

    from annotate.collab import ProjectStore, apply_logged_op

    store = ProjectStore(tmp_path)
    recovered = load_project(store.document("p-srv"))
    assert recovered.validate() == []
    replica = load_project(store.base_document("p-srv"))
    for record in store.log_records("p-srv"):
        apply_logged_op(replica, record.op)
    assert save_project(replica) == store.document("p-srv")
    revisions = [r.revision for r in store.log_records("p-srv")]
    assert revisions == list(range(3, 3 + len(revisions)))


def _server_fixture():
    p = create_project("served", pid="p-srv")
    p.add_file("clip.mp4", Media.VIDEO, duration=600.0)
    p.add_attribute("speaker", Anchor.TEMPORAL_SEGMENT, InputType.TEXT)
    return p
