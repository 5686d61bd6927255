"""Synthetic trace generator with planted delay laws and cell groups.

Stands in for real operator data: every CDR's true parent event and true
delay are recorded, so the matcher and the downstream statistics can be
checked against ground truth instead of eyeballed.

Determinism contract: one ``numpy.random.default_rng(seed)`` generator,
single-threaded, with a fixed draw order —

    per subscriber:            home group        (1 uniform integer)
      per day:                 event count       (1 Poisson)
                               event seconds     (count uniform integers, then sorted)
                               event cells       (count uniform integers)
        per event, in time order:
                               emit coin         (1 uniform)
          if emitted:          delay             (1 normal, then 1 exponential)
                               charging          (1 uniform)

Any change to this order is a breaking change to trace reproducibility.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .ingest import Charging, CdrEvent, NetworkEvent, Tech, write_cdr_csv, write_network_csv
from .stats import N_BINS, ExGaussianParams, assign_bin

PARENT_MAP_HEADER = (
    "cdr_row",
    "subscriber_id",
    "cell_id",
    "cdr_timestamp",
    "network_timestamp",
    "true_delay",
)

SECONDS_PER_DAY = 86400


@dataclass(frozen=True, slots=True)
class CellGroupSpec:
    group_id: str
    cell_count: int
    delay_laws: tuple  # one ExGaussianParams per time bin
    tech: Tech
    charging_mix: float  # prepaid fraction

    def __post_init__(self):
        if self.cell_count < 1:
            raise ValueError(f"cell_count must be >= 1, got {self.cell_count}")
        if len(self.delay_laws) != N_BINS:
            raise ValueError(f"expected {N_BINS} delay laws, got {len(self.delay_laws)}")
        if not 0.0 <= self.charging_mix <= 1.0:
            raise ValueError(f"charging_mix must be in [0,1], got {self.charging_mix}")

    def cell_ids(self) -> list[str]:
        return [f"{self.group_id}-C{i:02d}" for i in range(self.cell_count)]


@dataclass(frozen=True, slots=True)
class SynthConfig:
    groups: tuple
    subscribers: int
    days: int
    events_per_subscriber_day: float
    seed: int
    utc_offset_seconds: int = 0
    cdr_probability: float = 0.8

    def __post_init__(self):
        if not self.groups:
            raise ValueError("at least one cell group required")
        if self.subscribers < 1 or self.days < 1:
            raise ValueError("subscribers and days must be >= 1")
        if not self.events_per_subscriber_day > 0.0:
            raise ValueError("events_per_subscriber_day must be > 0")
        if not 0.0 <= self.cdr_probability <= 1.0:
            raise ValueError(f"cdr_probability must be in [0,1], got {self.cdr_probability}")


@dataclass(frozen=True, slots=True)
class ParentRecord:
    cdr_row: int  # 0-based data-row index into the emitted CDR file
    subscriber_id: str
    cell_id: str
    cdr_timestamp: int
    network_timestamp: int
    true_delay: float


@dataclass(frozen=True, slots=True)
class TraceArtifacts:
    network_path: str
    cdr_path: str
    manifest_path: str
    parent_map_path: str
    network_count: int
    cdr_count: int


def sample_exgaussian(params: ExGaussianParams, rng, size=None):
    """Normal(mu, sigma) plus Exponential(mean tau); scalar or array."""
    if size is None:
        return rng.normal(params.mu, params.sigma) + rng.exponential(params.tau)
    return rng.normal(params.mu, params.sigma, size) + rng.exponential(params.tau, size)


def default_scenario(seed: int = 42) -> SynthConfig:
    """Two planted groups of 10 cells, delay laws separated by a tau ratio of 3.

    Group A's law is deliberately narrow (delays span about a dozen distinct
    integer seconds) while group B's is wide: the two groups then differ not
    only in location but in how coarsely integer truncation discretizes their
    errors, which keeps the similarity ordering's group split stable instead
    of leaving it to sampling noise.  The supports are disjoint, so every
    cross-group comparison saturates the Fisher index.
    """
    laws_a = tuple(ExGaussianParams(10.0 + 0.5 * b, 0.5, 1.5) for b in range(N_BINS))
    laws_b = tuple(ExGaussianParams(400.0 + 5.0 * b, 5.0, 4.5) for b in range(N_BINS))
    return SynthConfig(
        groups=(
            CellGroupSpec("A", 10, laws_a, Tech.G4, 0.5),
            CellGroupSpec("B", 10, laws_b, Tech.G4, 0.5),
        ),
        subscribers=500,
        days=5,
        events_per_subscriber_day=120.0,
        seed=seed,
    )


def generate_trace(config: SynthConfig, out_dir) -> TraceArtifacts:
    """Write network.csv, cdr.csv, manifest.json and parent_map.csv.

    Events arrive per subscriber-day as a Poisson count at the configured
    rate, uniformly placed in the day, each on a uniformly chosen cell of
    the subscriber's home group.  Each event spawns a CDR with probability
    ``cdr_probability`` at floor(event_time + delay), delay drawn from the
    group's law for the event's local time bin; the resulting timestamp is
    clamped at zero to stay schema-valid.
    """
    rng = np.random.default_rng(config.seed)
    os.makedirs(out_dir, exist_ok=True)
    network: list[NetworkEvent] = []
    cdrs: list[CdrEvent] = []
    parents: list[ParentRecord] = []

    n_groups = len(config.groups)
    for s in range(config.subscribers):
        sub_id = f"S{s:04d}"
        group = config.groups[int(rng.integers(0, n_groups))]
        cells = group.cell_ids()
        for day in range(config.days):
            n = int(rng.poisson(config.events_per_subscriber_day))
            if n == 0:
                continue
            secs = rng.integers(0, SECONDS_PER_DAY, size=n)
            secs.sort()
            cell_idx = rng.integers(0, group.cell_count, size=n)
            for k in range(n):
                ts = int(secs[k]) + day * SECONDS_PER_DAY
                cell = cells[int(cell_idx[k])]
                network.append(
                    NetworkEvent(timestamp=ts, subscriber_id=sub_id, cell_id=cell, tech=group.tech)
                )
                if rng.random() >= config.cdr_probability:
                    continue
                b = assign_bin(ts, config.utc_offset_seconds)
                delay = float(sample_exgaussian(group.delay_laws[b], rng))
                cdr_ts = max(math.floor(ts + delay), 0)
                charging = (
                    Charging.PREPAID if rng.random() < group.charging_mix else Charging.POSTPAID
                )
                parents.append(
                    ParentRecord(
                        cdr_row=len(cdrs),
                        subscriber_id=sub_id,
                        cell_id=cell,
                        cdr_timestamp=cdr_ts,
                        network_timestamp=ts,
                        true_delay=delay,
                    )
                )
                cdrs.append(
                    CdrEvent(
                        timestamp=cdr_ts,
                        subscriber_id=sub_id,
                        cell_id=cell,
                        tech=group.tech,
                        charging=charging,
                    )
                )

    network_path = os.path.join(out_dir, "network.csv")
    cdr_path = os.path.join(out_dir, "cdr.csv")
    parent_map_path = os.path.join(out_dir, "parent_map.csv")
    manifest_path = os.path.join(out_dir, "manifest.json")

    write_network_csv(network, network_path)
    write_cdr_csv(cdrs, cdr_path)
    write_parent_map(parents, parent_map_path)

    manifest = {
        "seed": config.seed,
        "parent_map_path": "parent_map.csv",
        "planted_laws": [
            {
                "group_id": g.group_id,
                "tech": g.tech.value,
                "charging_mix": g.charging_mix,
                "cell_ids": g.cell_ids(),
                "laws": [
                    {"bin": b, "mu": law.mu, "sigma": law.sigma, "tau": law.tau}
                    for b, law in enumerate(g.delay_laws)
                ],
            }
            for g in config.groups
        ],
    }
    with open(manifest_path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")

    return TraceArtifacts(
        network_path=network_path,
        cdr_path=cdr_path,
        manifest_path=manifest_path,
        parent_map_path=parent_map_path,
        network_count=len(network),
        cdr_count=len(cdrs),
    )


def write_parent_map(parents: Sequence[ParentRecord], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(PARENT_MAP_HEADER)
        for p in parents:
            writer.writerow(
                [
                    p.cdr_row,
                    p.subscriber_id,
                    p.cell_id,
                    p.cdr_timestamp,
                    p.network_timestamp,
                    format(p.true_delay, ".6f"),
                ]
            )


def read_parent_map(path) -> list[ParentRecord]:
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            out.append(
                ParentRecord(
                    cdr_row=int(row["cdr_row"]),
                    subscriber_id=row["subscriber_id"],
                    cell_id=row["cell_id"],
                    cdr_timestamp=int(row["cdr_timestamp"]),
                    network_timestamp=int(row["network_timestamp"]),
                    true_delay=float(row["true_delay"]),
                )
            )
    return out


def recovery_fraction(records, parents: Sequence[ParentRecord]) -> float:
    """Fraction of generated CDRs whose matched parent is the true parent.

    Matched parent timestamp is cdr_timestamp - error_seconds.  CDRs the
    matcher dropped count as not recovered.  Duplicate (subscriber, cell,
    cdr_timestamp) keys are joined as sorted multisets, which counts the
    maximal consistent pairing.
    """
    if not parents:
        raise ValueError("empty parent map")
    truth: dict[tuple, list[int]] = {}
    for p in parents:
        truth.setdefault((p.subscriber_id, p.cell_id, p.cdr_timestamp), []).append(
            p.network_timestamp
        )
    matched: dict[tuple, list[int]] = {}
    for r in records:
        matched.setdefault((r.subscriber_id, r.cell_id, r.cdr_timestamp), []).append(
            r.cdr_timestamp - r.error_seconds
        )
    hits = 0
    for key, true_ts in truth.items():
        got = sorted(matched.get(key, []))
        want = sorted(true_ts)
        i = j = 0
        while i < len(want) and j < len(got):
            if got[j] == want[i]:
                hits += 1
                i += 1
                j += 1
            elif got[j] < want[i]:
                j += 1
            else:
                i += 1
    return hits / len(parents)
