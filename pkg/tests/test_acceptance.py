"""Acceptance suite: every top-level criterion, one pass/fail line each.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines as they
print.  Tolerances are pinned here and nowhere else.
"""

import contextlib
import random
import time

from helpers import (
    clone_schema,
    csv_signature,
    even_odd_contains,
    mc_polygon_area,
    random_project,
    star_polygon,
)

from annotate import (
    Anchor,
    InputType,
    Media,
    Polygon,
    Rect,
    Segment,
    create_project,
    export_csv,
    import_csv,
    load_project,
    save_project,
)
from annotate.collab import ChangeSet, ProjectStore, apply_logged_op
from annotate.geometry import area, bbox, hit_test
from annotate.gridview import bulk_set, filter_groups, group_by, remove_members
from annotate.timeline import diarisation_stats, merge_same_label, overlaps


@contextlib.contextmanager
def criterion(name):
    started = time.time()
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {name}: FAIL ({time.time() - started:.1f}s)", flush=True)
        raise
    print(f"ACCEPTANCE {name}: PASS ({time.time() - started:.1f}s)", flush=True)


def test_round_trip_suite():
    # 1,000 randomized valid projects: exact JSON round-trip and CSV multiset
    # preservation, in under 30 seconds.
    rng = random.Random(0xC0FFEE)
    started = time.time()
    with criterion("round-trip suite"):
        for i in range(1000):
            p = random_project(rng, pid=f"p-acc{i}")
            assert load_project(save_project(p)) == p
            target = clone_schema(p, pid=f"p-acc{i}-in")
            result = import_csv(export_csv(p), target)
            assert result.errors == []
            assert csv_signature(target) == csv_signature(p)
        assert time.time() - started < 30, "round-trip suite exceeded 30 s"


def test_geometry_oracle_suite():
    # hit_test against an independently coded even-odd oracle on 10,000
    # random (polygon, point) pairs; shoelace area within 1% of a 1e6-sample
    # Monte Carlo estimate on 100 random simple polygons.  Under 2 minutes.
    rng = random.Random(0x6E0)
    started = time.time()
    with criterion("geometry oracle suite"):
        for i in range(10_000):
            if rng.random() < 0.7:
                poly = star_polygon(rng, rng.randint(3, 10))
            else:
                poly = Polygon(
                    tuple((rng.uniform(0, 100), rng.uniform(0, 100)) for _ in range(rng.randint(3, 8)))
                )
            box = bbox(poly)
            p = (
                rng.uniform(box.xmin - 10, box.xmax + 10),
                rng.uniform(box.ymin - 10, box.ymax + 10),
            )
            assert hit_test(poly, p, 0) == even_odd_contains(poly.vertices, *p)

        for i in range(100):
            poly = star_polygon(rng, rng.randint(3, 10), rmin=50, rmax=100)
            exact = area(poly)
            estimate = mc_polygon_area(poly.vertices, 1_000_000, seed=0xA5EA + i)
            assert abs(estimate - exact) / exact <= 0.01, (
                f"polygon {i}: shoelace {exact} vs MC {estimate}"
            )
        assert time.time() - started < 120, "geometry suite exceeded 2 min"


def test_timeline_suite():
    # merge_same_label idempotence and no-overlap/no-touch postconditions on
    # 10,000 random segment sets; the fixture from the diarisation walkthrough
    # totals exactly 6.1 s for the pilot.
    rng = random.Random(0x71ED)
    with criterion("timeline suite"):
        for _ in range(10_000):
            segs = []
            for _ in range(rng.randint(0, 14)):
                start = rng.uniform(0, 50)
                segs.append(
                    Segment(start, start + rng.uniform(0.001, 10), rng.choice(["A", "B", "C", None]))
                )
            merged = merge_same_label(segs)
            assert merge_same_label(merged) == merged
            by_label = {}
            for s in merged:
                by_label.setdefault(s.label, []).append(s)
            for group in by_label.values():
                for a, b in zip(group, group[1:]):
                    assert not overlaps(a, b)
                    assert a.end < b.start

        stats = diarisation_stats([Segment(3.1, 9.2, "pilot")], 60.0)
        assert stats["pilot"].total_seconds == 6.1  # exact
        assert stats["pilot"].segment_count == 1


def test_face_track_scenario():
    # A generated 165-entry face track groups into one track group; bulk
    # naming updates all 165; rejecting the track and filtering to "Yes"
    # leaves zero groups; removing 3 members leaves 162.  All counts exact.
    with criterion("face-track review scenario"):
        p = create_project("sherlock faces", pid="p-fig")
        track = p.add_attribute("track_id", Anchor.SPATIAL_REGION, InputType.TEXT)
        name = p.add_attribute(
            "name", Anchor.SPATIAL_REGION, InputType.DROPDOWN, {1: "Sherlock", 2: "John"}
        )
        good = p.add_attribute(
            "is_good_track", Anchor.SPATIAL_REGION, InputType.RADIO, {1: "Yes", 2: "No"}
        )
        vid = p.add_file("sherlock_ep1.mp4", Media.VIDEO, dims=(1280, 720), duration=3600.0)
        for i in range(165):
            p.upsert_metadata(
                vid, z=[i / 25.0], xy=Rect(200 + 0.5 * i, 180, 60, 80), av={track: "17"}
            )

        groups = group_by(p, track)
        assert len(groups) == 1 and len(groups[0].members) == 165

        bulk_set(p, groups[0], name, "1")  # name="Sherlock"
        assert sum(1 for e in p.metadata.values() if e.av.get(name) == "1") == 165

        [fresh] = group_by(p, track)
        bulk_set(p, fresh, good, "2")  # is_good_track="No"
        yes_groups = filter_groups(group_by(p, good), lambda k: k == "1")
        assert yes_groups == []

        [fresh] = group_by(p, track)
        remove_members(p, fresh, fresh.members[:3])
        assert len(p.metadata) == 162
        assert p.validate() == []


def _convergence_base():
    p = create_project("convergence", pid="p-conv")
    fid = p.add_file("clip.mp4", Media.VIDEO, duration=10_000.0)
    spk = p.add_attribute("speaker", Anchor.TEMPORAL_SEGMENT, InputType.TEXT)
    return save_project(p), fid, spk


def test_collaboration_convergence():
    # 4 simulated clients x 100 ops on disjoint entry ids converge to
    # byte-identical snapshots; same-mid conflicts resolve deterministically
    # (first writer wins on stale base) across 100 random arrival orders; log
    # replay from the base reproduces every final snapshot.  Under 1 minute,
    # in process.
    started = time.time()
    with criterion("collaboration convergence"):
        doc, fid, spk = _convergence_base()
        store = ProjectStore()
        pid, initial = store.create(doc)
        rng = random.Random(0x5EED)
        clients = [
            {"id": f"client{i}", "replica": load_project(doc), "rev": initial, "mids": [], "done": 0}
            for i in range(4)
        ]
        while any(c["done"] < 100 for c in clients):
            c = rng.choice([c for c in clients if c["done"] < 100])
            if c["mids"] and rng.random() < 0.4:
                mid = rng.choice(c["mids"])
                if rng.random() < 0.3:
                    op = {"type": "delete", "mid": mid}
                    c["mids"].remove(mid)
                else:
                    start = rng.uniform(0, 9000)
                    op = {
                        "type": "upsert",
                        "entry": {
                            "mid": mid,
                            "file_id": fid,
                            "z": [start, start + 1],
                            "av": {spk: f"edit-{c['id']}"},
                        },
                    }
            else:
                start = rng.uniform(0, 9000)
                op = {
                    "type": "upsert",
                    "entry": {"file_id": fid, "z": [start, start + 1], "av": {spk: c["id"]}},
                }
            revision, statuses = store.apply_changeset(pid, ChangeSet(c["id"], c["rev"], [op]))
            assert statuses[0]["status"] == "applied", statuses
            if "entry" in op and "mid" not in op["entry"]:
                c["mids"].append(statuses[0]["mid"])
            c["done"] += 1
            current, records = store.ops_since(pid, c["rev"])
            for record in records:
                apply_logged_op(c["replica"], record.op)
            c["rev"] = current

        head = store.document(pid)
        for c in clients:
            current, records = store.ops_since(pid, c["rev"])
            for record in records:
                apply_logged_op(c["replica"], record.op)
            assert save_project(c["replica"]) == head

        replica = load_project(store.base_document(pid))
        for record in store.log_records(pid):
            apply_logged_op(replica, record.op)
        assert save_project(replica) == head

        # -- deliberate same-mid conflicts, 100 random arrival orders ---------
        base_p = create_project("conflict", pid="p-conf")
        cfid = base_p.add_file("clip.mp4", Media.VIDEO, duration=100.0)
        cspk = base_p.add_attribute("speaker", Anchor.TEMPORAL_SEGMENT, InputType.TEXT)
        shared_mid = base_p.upsert_metadata(cfid, z=[1, 2], av={cspk: "original"})
        conflict_doc = save_project(base_p)
        base_rev = base_p.revision

        def run(order_seed: int):
            order_rng = random.Random(order_seed)
            changesets = [
                ChangeSet(
                    f"writer{w}",
                    base_rev,
                    [
                        {
                            "type": "upsert",
                            "entry": {
                                "mid": shared_mid,
                                "file_id": cfid,
                                "z": [1, 2 + w],
                                "av": {cspk: f"writer{w}"},
                            },
                        },
                        {
                            "type": "upsert",
                            "entry": {"file_id": cfid, "z": [10 + w, 11 + w], "av": {cspk: f"w{w}"}},
                        },
                    ],
                )
                for w in range(4)
            ]
            order = list(range(4))
            order_rng.shuffle(order)
            trial_store = ProjectStore()
            trial_pid, _ = trial_store.create(conflict_doc)
            outcome = []
            for w in order:
                _, statuses = trial_store.apply_changeset(trial_pid, changesets[w])
                outcome.append((w, tuple(s["status"] for s in statuses)))
            final = trial_store.document(trial_pid)
            replay = load_project(trial_store.base_document(trial_pid))
            for record in trial_store.log_records(trial_pid):
                apply_logged_op(replay, record.op)
            assert save_project(replay) == final
            return order, outcome, final

        for seed in range(100):
            order, outcome, final = run(seed)
            order2, outcome2, final2 = run(seed)
            assert (order, outcome, final) == (order2, outcome2, final2)  # pure fn of order
            first, *rest = outcome
            assert first[1] == ("applied", "applied")  # first writer wins
            for _, statuses in rest:
                assert statuses == ("superseded", "applied")
            winner = load_project(final).metadata[shared_mid].av[cspk]
            assert winner == f"writer{order[0]}"
        assert time.time() - started < 60, "convergence suite exceeded 1 min"


def test_durability_crash_recovery(tmp_path_factory):
    # Kill the service mid-changeset in 50 randomized trials (simulated as a
    # torn log tail, exactly the footprint a SIGKILL leaves); recovery never
    # exposes a partially applied op and the project always validates clean.
    rng = random.Random(0xD1ED)
    with criterion("durability crash recovery"):
        for trial in range(50):
            data_dir = tmp_path_factory.mktemp(f"crash{trial}")
            store = ProjectStore(data_dir, snapshot_interval=10**9, fsync=False)
            doc, fid, spk = _convergence_base()
            pid, rev = store.create(doc)

            for i in range(rng.randint(0, 4)):
                ops = [
                    {
                        "type": "upsert",
                        "entry": {"file_id": fid, "z": [10 * i + j, 10 * i + j + 1], "av": {spk: "pre"}},
                    }
                    for j in range(rng.randint(1, 3))
                ]
                store.apply_changeset(pid, ChangeSet("steady", store.revision(pid), ops))

            dirpath = next(d for d in data_dir.iterdir() if d.is_dir())
            log_path = dirpath / "log.jsonl"
            size_before = log_path.stat().st_size if log_path.exists() else 0
            final_ops = [
                {
                    "type": "upsert",
                    "entry": {"file_id": fid, "z": [1000 + j, 1001 + j], "av": {spk: "final"}},
                }
                for j in range(3)
            ]
            store.apply_changeset(pid, ChangeSet("victim", store.revision(pid), final_ops))
            full_log = store.log_records(pid)
            store.close()

            raw = log_path.read_bytes()
            cut = rng.randrange(size_before, len(raw))  # mid-changeset, maybe mid-op
            with open(log_path, "r+b") as fh:
                fh.truncate(cut)

            recovered = ProjectStore(data_dir)
            kept = recovered.log_records(pid)
            assert len(kept) < len(full_log)
            assert [r.revision for r in kept] == [r.revision for r in full_log[: len(kept)]]

            replica = load_project(recovered.base_document(pid))
            for record in kept:
                apply_logged_op(replica, record.op)
            assert save_project(replica) == recovered.document(pid)
            assert replica.validate() == []
            recovered.close()
