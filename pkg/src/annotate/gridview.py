"""Group-by/bulk-update machinery behind the grid review workflow.

Machine-seeded annotations arrive in bulk (face tracks, classifier output);
reviewers group entries by an attribute value, then accept, relabel, or prune
whole groups at once.  Groups are snapshots: any project mutation invalidates
them (tracked by revision), so a stale group can never bulk-write over
concurrent edits.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .errors import NotMember, StaleGroup, UnknownAttribute
from .model import Project, Value, entry_kind


class _Unset:
    """Sentinel key for entries that do not carry the grouping attribute."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "UNSET"


UNSET = _Unset()

GroupKey = Value | _Unset


@dataclass
class Group:
    """Entries sharing one value of ``source_attribute`` at a point in time."""

    key: GroupKey
    members: list[str]
    source_attribute: str
    revision: int


def group_by(p: Project, aid: str) -> list[Group]:
    """Partition the entries anchored like ``aid`` by their value for it.

    Every entry whose kind matches the attribute's anchor lands in exactly
    one group; entries without the attribute form the UNSET group.  Groups
    come out sorted by key with UNSET last, members in project order.
    """
    attr = p.attributes.get(aid)
    if attr is None:
        raise UnknownAttribute(f"attribute {aid!r} does not exist")
    buckets: dict[GroupKey, list[str]] = {}
    for mid, e in p.metadata.items():
        if entry_kind(e) is not attr.anchor:
            continue
        buckets.setdefault(e.av.get(aid, UNSET), []).append(mid)
    keys = sorted((k for k in buckets if k is not UNSET), key=_key_order)
    if UNSET in buckets:
        keys.append(UNSET)
    return [Group(k, buckets[k], aid, p.revision) for k in keys]


def _key_order(k: GroupKey):
    # Checkbox keys are tuples, everything else strings; never mixed within
    # one attribute, but keep them comparable just in case.
    return (isinstance(k, tuple), k)


def bulk_set(p: Project, group: Group, aid: str, value: Value) -> None:
    """Write ``value`` into ``av[aid]`` of every member entry.

    The group must be fresh (taken at the project's current revision); the
    revision ticks once per member, so re-group before chaining bulk edits.
    """
    if group.revision != p.revision:
        raise StaleGroup(
            f"group was taken at revision {group.revision}, project is at {p.revision}"
        )
    if aid not in p.attributes:
        raise UnknownAttribute(f"attribute {aid!r} does not exist")
    for mid in group.members:
        e = p.metadata[mid]
        av = dict(e.av)
        av[aid] = value
        p.upsert_metadata(e.file_id, e.z, e.xy, av, mid=mid)


def filter_groups(
    groups: list[Group], predicate: Callable[[GroupKey], bool]
) -> list[Group]:
    """Keep the groups whose key satisfies ``predicate``, order preserved."""
    return [g for g in groups if predicate(g.key)]


def remove_members(p: Project, group: Group, mids: list[str] | set[str]) -> None:
    """Delete the given member entries from the project.

    Rejects ids that are not members of the group; an erroneous face in a
    track is pruned by id, not by guessing.
    """
    mids = list(mids)
    member_set = set(group.members)
    for mid in mids:
        if mid not in member_set:
            raise NotMember(f"{mid!r} is not a member of this group")
    for mid in mids:
        p.delete_metadata(mid)
