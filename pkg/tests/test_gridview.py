import pytest
from helpers import random_project

from annotate import Anchor, InputType, Media, Rect, create_project
from annotate.errors import InvalidValue, NotMember, StaleGroup, UnknownAttribute
from annotate.gridview import UNSET, Group, bulk_set, filter_groups, group_by, remove_members
from annotate.model import entry_kind


def face_track_project(n_frames=165, track_id="17"):
    """A machine-seeded face track: one rect per consecutive video frame."""
    p = create_project("sherlock faces", pid="p-track")
    p.track = p.add_attribute("track_id", Anchor.SPATIAL_REGION, InputType.TEXT)
    p.name = p.add_attribute(
        "name", Anchor.SPATIAL_REGION, InputType.DROPDOWN, {1: "Sherlock", 2: "John"}
    )
    p.good = p.add_attribute(
        "is_good_track", Anchor.SPATIAL_REGION, InputType.RADIO, {1: "Yes", 2: "No"}
    )
    p.video = p.add_file("sherlock_ep1.mp4", Media.VIDEO, dims=(1280, 720), duration=3600.0)
    for i in range(n_frames):
        p.upsert_metadata(
            p.video,
            z=[i / 25.0],
            xy=Rect(200 + i * 0.5, 180, 60, 80),
            av={p.track: track_id},
        )
    return p


# -- group_by ---------------------------------------------------------------


def test_one_track_one_group_of_165():
    p = face_track_project()
    groups = group_by(p, p.track)
    assert len(groups) == 1
    assert groups[0].key == "17"
    assert len(groups[0].members) == 165


def test_attribute_set_nowhere_gives_single_unset_group():
    p = face_track_project(n_frames=10)
    groups = group_by(p, p.name)  # nobody named yet
    assert len(groups) == 1
    assert groups[0].key is UNSET
    assert len(groups[0].members) == 10


def test_unknown_attribute_rejected():
    with pytest.raises(UnknownAttribute):
        group_by(face_track_project(5), "a999")


def test_groups_ordered_by_key_unset_last():
    p = create_project("t")
    fid = p.add_file("x.jpg", Media.IMAGE)
    aid = p.add_attribute("grade", Anchor.SPATIAL_REGION, InputType.TEXT)
    for value in ["b", None, "a", "b", None]:
        av = {} if value is None else {aid: value}
        p.upsert_metadata(fid, xy=Rect(0, 0, 1, 1), av=av)
    groups = group_by(p, aid)
    assert [g.key for g in groups] == ["a", "b", UNSET]
    assert [len(g.members) for g in groups] == [1, 2, 2]


def test_group_by_partitions_matching_entries(rng):
    for trial in range(30):
        p = random_project(rng, pid=f"p-part{trial}")
        for aid, attr in p.attributes.items():
            groups = group_by(p, aid)
            anchored = [m for m, e in p.metadata.items() if entry_kind(e) is attr.anchor]
            seen = [m for g in groups for m in g.members]
            assert sorted(seen) == sorted(anchored)  # covering
            assert len(seen) == len(set(seen))  # disjoint
            for g in groups:
                assert g.members  # never empty
                for m in g.members:
                    assert p.metadata[m].av.get(aid, UNSET) == g.key


def test_checkbox_groups_key_on_sorted_option_sets():
    p = create_project("t")
    fid = p.add_file("x.jpg", Media.IMAGE)
    aid = p.add_attribute("tags", Anchor.SPATIAL_REGION, InputType.CHECKBOX, {1: "a", 2: "b"})
    p.upsert_metadata(fid, xy=Rect(0, 0, 1, 1), av={aid: ("2", "1")})
    p.upsert_metadata(fid, xy=Rect(1, 1, 1, 1), av={aid: {"1", "2"}})
    groups = group_by(p, aid)
    assert len(groups) == 1
    assert groups[0].key == ("1", "2")


# -- bulk_set ----------------------------------------------------------------------


def test_bulk_name_assignment_updates_all_members():
    p = face_track_project()
    [track_group] = group_by(p, p.track)
    bulk_set(p, track_group, p.name, "1")
    assert all(e.av[p.name] == "1" for e in p.metadata.values())


def test_bulk_set_ticks_revision_once_per_member():
    p = face_track_project(n_frames=10)
    [g] = group_by(p, p.track)
    before = p.revision
    bulk_set(p, g, p.good, "2")
    assert p.revision == before + 10


def test_bulk_set_with_already_present_value_changes_only_revision():
    p = face_track_project(n_frames=5)
    [g] = group_by(p, p.track)
    bulk_set(p, g, p.track, "17")  # same value everywhere already
    p2 = face_track_project(n_frames=5)
    assert {m: e.av for m, e in p.metadata.items()} == {m: e.av for m, e in p2.metadata.items()}
    assert p.revision == p2.revision + 5


def test_bulk_set_rejects_invalid_value():
    p = face_track_project(n_frames=3)
    [g] = group_by(p, p.track)
    with pytest.raises(InvalidValue):
        bulk_set(p, g, p.name, "999")
    assert all(p.name not in e.av for e in p.metadata.values())


def test_stale_group_rejected():
    p = face_track_project(n_frames=3)
    [g] = group_by(p, p.track)
    p.upsert_metadata(p.video, z=[500.0], xy=Rect(0, 0, 5, 5), av={p.track: "17"})
    with pytest.raises(StaleGroup):
        bulk_set(p, g, p.name, "1")


def test_regrouping_after_bulk_set_moves_the_group():
    p = face_track_project(n_frames=8)
    [g] = group_by(p, p.track)
    bulk_set(p, g, p.good, "2")  # mark whole track rejected
    groups = group_by(p, p.good)
    assert [x.key for x in groups] == ["2"]
    assert set(groups[0].members) >= set(g.members)


# -- filter_groups --------------------------------------------------------------------


def test_filter_keeps_matching_keys():
    p = face_track_project(n_frames=6)
    [g] = group_by(p, p.track)
    bulk_set(p, g, p.good, "1")
    groups = group_by(p, p.good)
    kept = filter_groups(groups, lambda k: k == "1")
    assert len(kept) == 1
    assert filter_groups(groups, lambda k: k == "2") == []


def test_filter_true_predicate_is_identity():
    p = face_track_project(n_frames=4)
    groups = group_by(p, p.track)
    assert filter_groups(groups, lambda k: True) == groups


def test_filter_preserves_order_and_never_invents(rng):
    groups = [Group(key=str(i), members=[f"m{i}"], source_attribute="a1", revision=0) for i in range(20)]
    for _ in range(50):
        keep = {str(i) for i in rng.sample(range(20), rng.randint(0, 20))}
        got = filter_groups(groups, lambda k: k in keep)
        assert got == [g for g in groups if g.key in keep]


# -- remove_members ---------------------------------------------------------------------


def test_remove_erroneous_members():
    p = face_track_project()
    [g] = group_by(p, p.track)
    remove_members(p, g, g.members[10:13])
    assert len(p.metadata) == 162


def test_remove_empty_set_is_a_no_op():
    p = face_track_project(n_frames=4)
    [g] = group_by(p, p.track)
    before = p.revision
    remove_members(p, g, [])
    assert p.revision == before
    assert len(p.metadata) == 4


def test_remove_all_members_dissolves_group():
    p = face_track_project(n_frames=4)
    [g] = group_by(p, p.track)
    remove_members(p, g, list(g.members))
    assert group_by(p, p.track) == []


def test_remove_nonmember_rejected():
    p = face_track_project(n_frames=4)
    [g] = group_by(p, p.track)
    with pytest.raises(NotMember):
        remove_members(p, g, ["m999"])
    assert len(p.metadata) == 4


def test_remove_decrements_by_exactly_the_subset(rng):
    p = face_track_project(n_frames=30)
    [g] = group_by(p, p.track)
    subset = rng.sample(g.members, 7)
    before = len(p.metadata)
    remove_members(p, g, subset)
    assert len(p.metadata) == before - 7
