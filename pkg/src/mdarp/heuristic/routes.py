"""Key-stop route drafts used while searching.

A draft route lists only the stops that matter (pickups, dropoffs, joins,
splits).  Between keys the vehicle follows the stored shortest path unless the
key carries an explicit ``via`` path, which is how platoon paths are pinned.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from ..instance import Instance
from ..schedule import (DROPOFF, JOIN, PICKUP, SPLIT, Plan, PlanError, PlatoonSegment, Stop,
                        TransferRecord)


@dataclass(frozen=True)
class Key:
    node: int
    actions: tuple[tuple[str, int], ...] = ()
    via: tuple[int, ...] | None = None  # full node path from the previous key, both ends included

    def with_actions(self, actions) -> "Key":
        return Key(self.node, tuple(actions), self.via)

    def service(self) -> list[tuple[str, int]]:
        return [a for a in self.actions if a[0] in (PICKUP, DROPOFF)]

    def platoon_refs(self) -> set[int]:
        return {a[1] for a in self.actions if a[0] in (JOIN, SPLIT)}


@dataclass
class Draft:
    routes: dict[int, list[Key]]
    platoons: dict[int, PlatoonSegment] = field(default_factory=dict)
    transfers: list[TransferRecord] = field(default_factory=list)

    def copy(self) -> "Draft":
        return Draft({k: list(v) for k, v in self.routes.items()}, dict(self.platoons),
                     list(self.transfers))

    @property
    def vehicles(self) -> list[int]:
        return sorted(self.routes)

    def requests(self) -> list[int]:
        out = []
        for keys in self.routes.values():
            for key in keys:
                out.extend(r for kind, r in key.actions if kind == PICKUP)
        return sorted(out)

    def join_index(self, k: int, pid: int) -> int:
        for i, key in enumerate(self.routes[k]):
            if (JOIN, pid) in key.actions:
                return i
        raise KeyError((k, pid))

    def split_index(self, k: int, pid: int) -> int:
        for i, key in enumerate(self.routes[k]):
            if (SPLIT, pid) in key.actions:
                return i
        raise KeyError((k, pid))

    def to_plan(self, inst: Instance) -> Plan:
        routes = {k: expand(inst, inst.vehicle_by_id[k].start, keys)
                  for k, keys in self.routes.items()}
        return Plan(routes, dict(self.platoons), tuple(self.transfers))


def expand(inst: Instance, start: int, keys: list[Key]) -> tuple[Stop, ...]:
    tables = inst.tables
    nodes = [start]
    acts: list[list] = [[]]
    for key in keys:
        cur = nodes[-1]
        if key.via is not None:
            if key.via[0] != cur or key.via[-1] != key.node:
                raise PlanError(f"via path {key.via} does not connect {cur} to {key.node}")
            for n in key.via[1:]:
                nodes.append(n)
                acts.append([])
        elif key.node != cur:
            for n in tables.path(cur, key.node)[1:]:
                nodes.append(n)
                acts.append([])
        acts[-1].extend(key.actions)
    return tuple(Stop(n, tuple(a)) for n, a in zip(nodes, acts))


def keys_from_solo(seq: list[tuple[int, str, int]]) -> list[Key]:
    return [Key(n, ((kind, r),)) for n, kind, r in seq]


def solo_sequence(keys: list[Key]) -> list[tuple[int, str, int]]:
    """Service keys as ``(node, kind, request)`` triples, dropping platoon keys."""
    out = []
    for key in keys:
        for kind, r in key.service():
            out.append((key.node, kind, r))
    return out


def path_of(inst: Instance, prev: int, key: Key) -> tuple[int, ...]:
    if key.via is not None:
        return key.via
    if key.node == prev:
        return (prev,)
    return inst.tables.path(prev, key.node)


def key_nodes(inst: Instance, k: int, keys: list[Key]) -> list[int]:
    """Node of each key position, with the start node prepended (index 0)."""
    return [inst.vehicle_by_id[k].start] + [key.node for key in keys]
