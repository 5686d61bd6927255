"""Event stream ingestion: CSV/NDJSON parsing, validation, dataset assembly.

Two input schemas are supported (see README for examples):

* network events — ``timestamp,subscriber_id,cell_id,tech``
* CDR events — ``timestamp,subscriber_id,cell_id,tech,charging``

Tech values are ``2G|3G|4G`` and charging values ``Prepaid|Postpaid``.
NDJSON files carry the same field names, one JSON object per line.
Malformed rows are collected as :class:`Reject` entries (never raised);
a file whose header does not match the schema is a fatal :class:`SchemaError`.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

from .errors import SchemaError


class Tech(Enum):
    G2 = "2G"
    G3 = "3G"
    G4 = "4G"


class Charging(Enum):
    PREPAID = "Prepaid"
    POSTPAID = "Postpaid"


NETWORK_HEADER = ("timestamp", "subscriber_id", "cell_id", "tech")
CDR_HEADER = ("timestamp", "subscriber_id", "cell_id", "tech", "charging")

# widest real-world UTC offsets: -12:00 .. +14:00
UTC_OFFSET_MIN = -43200
UTC_OFFSET_MAX = 50400

_TECH_BY_VALUE = {t.value: t for t in Tech}
_CHARGING_BY_VALUE = {c.value: c for c in Charging}


@dataclass(frozen=True, slots=True)
class NetworkEvent:
    timestamp: int
    subscriber_id: str
    cell_id: str
    tech: Tech


@dataclass(frozen=True, slots=True)
class CdrEvent:
    timestamp: int
    subscriber_id: str
    cell_id: str
    tech: Tech
    charging: Charging


@dataclass(frozen=True, slots=True)
class Reject:
    line: int
    reason: str


@dataclass(frozen=True)
class EventDataset:
    """Both event streams sorted by (subscriber_id, timestamp), plus the fixed
    UTC offset used to turn epoch seconds into local time of day."""

    network: tuple[NetworkEvent, ...]
    cdr: tuple[CdrEvent, ...]
    utc_offset_seconds: int


def _parse_timestamp(value) -> int:
    """Integer epoch seconds; sub-second values are truncated toward zero."""
    if isinstance(value, bool):
        raise ValueError("bad timestamp")
    if isinstance(value, int):
        ts = value
    elif isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError("bad timestamp")
        ts = int(value)
    elif isinstance(value, str):
        text = value.strip()
        try:
            ts = int(text)
        except ValueError:
            try:
                f = float(text)
            except ValueError:
                raise ValueError("bad timestamp") from None
            if not math.isfinite(f):
                raise ValueError("bad timestamp") from None
            ts = int(f)
    else:
        raise ValueError("bad timestamp")
    if ts < 0:
        raise ValueError("negative timestamp")
    return ts


def _validate_fields(timestamp, subscriber_id, cell_id, tech) -> tuple[int, str, str, Tech]:
    ts = _parse_timestamp(timestamp)
    if not isinstance(subscriber_id, str) or not subscriber_id:
        raise ValueError("empty subscriber_id")
    if not isinstance(cell_id, str) or not cell_id:
        raise ValueError("empty cell_id")
    if tech not in _TECH_BY_VALUE:
        raise ValueError("unknown tech")
    return ts, subscriber_id, cell_id, _TECH_BY_VALUE[tech]


def _validate_charging(charging) -> Charging:
    if charging is None or charging == "":
        raise ValueError("missing charging")
    if charging not in _CHARGING_BY_VALUE:
        raise ValueError("unknown charging")
    return _CHARGING_BY_VALUE[charging]


def _network_from_row(row: Sequence) -> NetworkEvent:
    if len(row) != len(NETWORK_HEADER):
        raise ValueError("wrong field count")
    ts, sub, cell, tech = _validate_fields(row[0], row[1], row[2], row[3])
    return NetworkEvent(ts, sub, cell, tech)


def _cdr_from_row(row: Sequence) -> CdrEvent:
    if len(row) != len(CDR_HEADER):
        raise ValueError("wrong field count")
    ts, sub, cell, tech = _validate_fields(row[0], row[1], row[2], row[3])
    charging = _validate_charging(row[4])
    return CdrEvent(ts, sub, cell, tech, charging)


def _network_from_obj(obj) -> NetworkEvent:
    if not isinstance(obj, dict):
        raise ValueError("not a JSON object")
    for key in NETWORK_HEADER:
        if key not in obj:
            raise ValueError(f"missing {key}")
    ts, sub, cell, tech = _validate_fields(
        obj["timestamp"], obj["subscriber_id"], obj["cell_id"], obj["tech"]
    )
    return NetworkEvent(ts, sub, cell, tech)


def _cdr_from_obj(obj) -> CdrEvent:
    if not isinstance(obj, dict):
        raise ValueError("not a JSON object")
    for key in NETWORK_HEADER:
        if key not in obj:
            raise ValueError(f"missing {key}")
    ts, sub, cell, tech = _validate_fields(
        obj["timestamp"], obj["subscriber_id"], obj["cell_id"], obj["tech"]
    )
    charging = _validate_charging(obj.get("charging"))
    return CdrEvent(ts, sub, cell, tech, charging)


def _parse_csv(path: Path, header, from_row):
    events = []
    rejects = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            first = next(reader)
        except StopIteration:
            return events, rejects  # zero-byte file: vacuous input
        if tuple(first) != header:
            raise SchemaError(
                f"{path}: expected header {','.join(header)!r}, got {','.join(first)!r}"
            )
        for row in reader:
            if not row:
                continue
            try:
                events.append(from_row(row))
            except ValueError as exc:
                rejects.append(Reject(reader.line_num, str(exc)))
    return events, rejects


def _parse_ndjson(path: Path, from_obj):
    events = []
    rejects = []
    with open(path, encoding="utf-8") as fh:
        for line_num, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError:
                rejects.append(Reject(line_num, "invalid json"))
                continue
            try:
                events.append(from_obj(obj))
            except ValueError as exc:
                rejects.append(Reject(line_num, str(exc)))
    return events, rejects


def parse_network_events(path, format="csv"):
    """Parse a network-event file.

    Returns ``(events, rejects)``: every well-formed row becomes one
    :class:`NetworkEvent`, every malformed row one :class:`Reject` with its
    line number and reason.  Row order in the file carries no meaning.
    """
    path = Path(path)
    fmt = format.strip().lower()
    if fmt == "csv":
        return _parse_csv(path, NETWORK_HEADER, _network_from_row)
    if fmt == "ndjson":
        return _parse_ndjson(path, _network_from_obj)
    raise ValueError(f"unknown format {format!r} (expected csv or ndjson)")


def parse_cdr_events(path, format="csv"):
    """Parse a CDR-event file; same contract as :func:`parse_network_events`."""
    path = Path(path)
    fmt = format.strip().lower()
    if fmt == "csv":
        return _parse_csv(path, CDR_HEADER, _cdr_from_row)
    if fmt == "ndjson":
        return _parse_ndjson(path, _cdr_from_obj)
    raise ValueError(f"unknown format {format!r} (expected csv or ndjson)")


def build_dataset(network, cdr, utc_offset_seconds=0) -> EventDataset:
    """Assemble an immutable dataset, sorting both streams by
    (subscriber_id, timestamp) with input order preserved on ties."""
    if not UTC_OFFSET_MIN <= utc_offset_seconds <= UTC_OFFSET_MAX:
        raise ValueError(
            f"utc_offset_seconds must be in [{UTC_OFFSET_MIN}, {UTC_OFFSET_MAX}],"
            f" got {utc_offset_seconds}"
        )
    key = lambda e: (e.subscriber_id, e.timestamp)
    return EventDataset(
        network=tuple(sorted(network, key=key)),
        cdr=tuple(sorted(cdr, key=key)),
        utc_offset_seconds=int(utc_offset_seconds),
    )


def write_network_csv(events: Iterable[NetworkEvent], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(NETWORK_HEADER)
        for e in events:
            writer.writerow([e.timestamp, e.subscriber_id, e.cell_id, e.tech.value])


def write_cdr_csv(events: Iterable[CdrEvent], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CDR_HEADER)
        for e in events:
            writer.writerow(
                [e.timestamp, e.subscriber_id, e.cell_id, e.tech.value, e.charging.value]
            )


def write_rejects_csv(rejects: Iterable[Reject], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["line", "reason"])
        for r in rejects:
            writer.writerow([r.line, r.reason])
