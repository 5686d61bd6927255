"""Backward same-subscriber same-cell association of CDR to network events.

For each CDR event the matched network event is the latest one with the same
subscriber and cell at a timestamp t' <= t (a network event at exactly the
CDR timestamp is eligible, giving error 0).  CDR events with no such network
event are counted, not raised.
"""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels
from .errors import SchemaError
from .ingest import Charging, EventDataset, Tech

ERRORS_HEADER = ("cdr_timestamp", "error_seconds", "cell_id", "tech", "charging", "subscriber_id")

_TECH_BY_VALUE = {t.value: t for t in Tech}
_CHARGING_BY_VALUE = {c.value: c for c in Charging}


@dataclass(frozen=True, slots=True)
class ErrorRecord:
    """One matched CDR: its timestamp error and the CDR's grouping keys."""

    cdr_timestamp: int
    error_seconds: int
    cell_id: str
    tech: Tech
    charging: Charging
    subscriber_id: str


@dataclass(frozen=True)
class MatchReport:
    matched_count: int
    unmatched_count: int
    per_cell_counts: dict[str, int]


def _pair_codes(net_sub, net_cell, cdr_sub, cdr_cell):
    """Dense integer codes for subscribers and (subscriber, cell) pairs,
    consistent across both streams."""
    n_net = net_sub.shape[0]
    subs, sub_inv = np.unique(np.concatenate((net_sub, cdr_sub)), return_inverse=True)
    cells, cell_inv = np.unique(np.concatenate((net_cell, cdr_cell)), return_inverse=True)
    combined = sub_inv.astype(np.int64) * len(cells) + cell_inv
    _, pair_inv = np.unique(combined, return_inverse=True)
    n_pairs = int(pair_inv.max()) + 1
    return (
        sub_inv[:n_net].astype(np.int64),
        sub_inv[n_net:].astype(np.int64),
        pair_inv[:n_net].astype(np.int64),
        pair_inv[n_net:].astype(np.int64),
        n_pairs,
    )


def match_backward(dataset: EventDataset) -> tuple[list[ErrorRecord], MatchReport]:
    """Match every CDR event backward in time within its cell.

    Requires the dataset's sort contract (build_dataset provides it).  Output
    records follow the CDR stream order: subscriber_id, then cdr_timestamp.
    """
    cdr = dataset.cdr
    net = dataset.network
    if not cdr:
        return [], MatchReport(0, 0, {})
    if not net:
        return [], MatchReport(0, len(cdr), {})

    net_sub = np.array([e.subscriber_id for e in net])
    net_cell = np.array([e.cell_id for e in net])
    net_ts = np.array([e.timestamp for e in net], dtype=np.int64)
    cdr_sub = np.array([e.subscriber_id for e in cdr])
    cdr_cell = np.array([e.cell_id for e in cdr])
    cdr_ts = np.array([e.timestamp for e in cdr], dtype=np.int64)

    ns, cs, np_pair, cd_pair, n_pairs = _pair_codes(net_sub, net_cell, cdr_sub, cdr_cell)
    matched, err = kernels.backward_match(ns, net_ts, np_pair, cs, cdr_ts, cd_pair, n_pairs)

    records = [
        ErrorRecord(
            cdr_timestamp=e.timestamp,
            error_seconds=int(err[i]),
            cell_id=e.cell_id,
            tech=e.tech,
            charging=e.charging,
            subscriber_id=e.subscriber_id,
        )
        for i, e in enumerate(cdr)
        if matched[i]
    ]
    per_cell = Counter(r.cell_id for r in records)
    report = MatchReport(
        matched_count=len(records),
        unmatched_count=len(cdr) - len(records),
        per_cell_counts=dict(sorted(per_cell.items())),
    )
    return records, report


def write_errors_csv(records, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(ERRORS_HEADER)
        for r in records:
            writer.writerow(
                [
                    r.cdr_timestamp,
                    r.error_seconds,
                    r.cell_id,
                    r.tech.value,
                    r.charging.value,
                    r.subscriber_id,
                ]
            )


def read_errors_csv(path) -> list[ErrorRecord]:
    path = Path(path)
    records = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            first = next(reader)
        except StopIteration:
            return records
        if tuple(first) != ERRORS_HEADER:
            raise SchemaError(
                f"{path}: expected header {','.join(ERRORS_HEADER)!r}, got {','.join(first)!r}"
            )
        for row in reader:
            if not row:
                continue
            records.append(
                ErrorRecord(
                    cdr_timestamp=int(row[0]),
                    error_seconds=int(row[1]),
                    cell_id=row[2],
                    tech=_TECH_BY_VALUE[row[3]],
                    charging=_CHARGING_BY_VALUE[row[4]],
                    subscriber_id=row[5],
                )
            )
    return records
