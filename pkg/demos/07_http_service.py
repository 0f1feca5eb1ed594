"""The sync service over real HTTP.

Spawns `annotate serve` on a spare port, talks to it the way the browser UI
does, then kills the process outright and restarts it to show that the
append-only log brings every byte back.
"""

import json
import signal
import subprocess
import sys
import tempfile
import time
import urllib.request

from annotate import Anchor, InputType, Media, create_project, save_project

PORT = 8743
BASE = f"http://127.0.0.1:{PORT}"
data_dir = tempfile.mkdtemp(prefix="annotate-demo-")


def request(method, path, body=None):
    req = urllib.request.Request(BASE + path, data=body, method=method)
    with urllib.request.urlopen(req) as resp:
        return resp.read()


def start_server():
    proc = subprocess.Popen(
        [sys.executable, "-m", "annotate", "serve", "--port", str(PORT), "--data", data_dir],
        stdout=subprocess.DEVNULL,
        stderr=subprocess.DEVNULL,
    )
    for _ in range(100):
        try:
            request("GET", "/healthz")
            return proc
        except OSError:
            time.sleep(0.1)
    raise RuntimeError("service did not come up")


p = create_project("field recordings", pid="p-field")
clip = p.add_file("day1/morning.wav", Media.AUDIO, duration=3600.0)
species = p.add_attribute("species", Anchor.TEMPORAL_SEGMENT, InputType.TEXT)

server = start_server()
print(f"service up on {BASE}, storing under {data_dir}")
try:
    created = json.loads(request("POST", "/projects", save_project(p)))
    print(f"POST /projects -> {created}")

    changes = {
        "client_id": "field-laptop",
        "base_revision": created["revision"],
        "ops": [
            {"type": "upsert", "entry": {"file_id": clip, "z": [61.2, 64.9], "av": {species: "wren"}}},
            {"type": "upsert", "entry": {"file_id": clip, "z": [130.0, 142.5], "av": {species: "blackbird"}}},
        ],
    }
    accepted = json.loads(request("POST", f"/projects/p-field/changes", json.dumps(changes).encode()))
    print(f"POST changes -> revision {accepted['revision']}, statuses {[s['status'] for s in accepted['accepted']]}")

    before = request("GET", "/projects/p-field")
    print(f"GET document: {len(before)} bytes")
    print(request("GET", "/projects/p-field/export?format=csv").decode())
finally:
    # No clean shutdown: SIGKILL, exactly what a crash looks like.
    server.send_signal(signal.SIGKILL)
    server.wait()
print("killed the service without warning...")

server = start_server()
try:
    after = request("GET", "/projects/p-field")
    print(f"restarted; document identical after recovery: {after == before}")
finally:
    server.terminate()
    server.wait()
