"""Append-only snapshot log: one length-prefixed JSON record per applied
snapshot. Replaying the file through the version-gated apply path rebuilds
node state; duplicate or stale records replay as no-ops."""

from __future__ import annotations

import json
import struct
from pathlib import Path
from typing import Iterator

from .edge_types import Snapshot
from .wire import dumps, snapshot_from_wire, snapshot_to_wire

_LEN = struct.Struct(">I")


class SnapshotLog:
    """Durable, append-only record of every snapshot an edge node applied."""

    def __init__(self, path: Path | str):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._fh = open(self.path, "ab")

    def append(self, snapshot: Snapshot) -> None:
        payload = dumps(snapshot_to_wire(snapshot)).encode("utf-8")
        self._fh.write(_LEN.pack(len(payload)))
        self._fh.write(payload)
        self._fh.flush()

    def close(self) -> None:
        self._fh.close()

    @classmethod
    def replay(cls, path: Path | str) -> Iterator[Snapshot]:
        """Yield logged snapshots in append order; a trailing torn record
        (partial final write) is ignored."""
        path = Path(path)
        if not path.exists():
            return
        with open(path, "rb") as fh:
            while True:
                header = fh.read(_LEN.size)
                if len(header) < _LEN.size:
                    return
                (length,) = _LEN.unpack(header)
                payload = fh.read(length)
                if len(payload) < length:
                    return
                yield snapshot_from_wire(json.loads(payload.decode("utf-8")))
