"""Cell-to-cell similarity: per-bin KS tests combined per pair, matrix + seriation."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .hypotests import fisher_combine, ks_two_sample
from .stats import N_BINS, assign_bin

DEFAULT_MIN_PER_BIN = 50


@dataclass(frozen=True, slots=True)
class CellProfile:
    """Per-cell error samples split into the seven daily bins (each sorted)."""

    cell_id: str
    per_bin_samples: tuple  # 7 float64 arrays

    def __post_init__(self):
        if len(self.per_bin_samples) != N_BINS:
            raise ValueError(f"expected {N_BINS} bins, got {len(self.per_bin_samples)}")


@dataclass(frozen=True, slots=True)
class SimilarityMatrix:
    cells: tuple  # cell_id, ascending
    entries: np.ndarray  # square, symmetric; NaN = insufficient data
    min_per_bin: int

    def index_of(self, cell_id: str) -> int:
        return self.cells.index(cell_id)


def build_profiles(records, utc_offset_seconds: int, stratum=None) -> list[CellProfile]:
    """One profile per cell, errors routed to bins by CDR local time.

    ``stratum`` — optional (charging, tech) pair; records outside it are
    dropped before profiling.  Profiles come back sorted by cell_id.
    """
    per_cell: dict[str, list[list[float]]] = {}
    for r in records:
        if stratum is not None and (r.charging, r.tech) != stratum:
            continue
        b = assign_bin(r.cdr_timestamp, utc_offset_seconds)
        per_cell.setdefault(r.cell_id, [[] for _ in range(N_BINS)])[b].append(r.error_seconds)
    out = []
    for cell_id in sorted(per_cell):
        bins = tuple(np.sort(np.asarray(v, dtype=np.float64)) for v in per_cell[cell_id])
        out.append(CellProfile(cell_id=cell_id, per_bin_samples=bins))
    return out


def pair_index(a: CellProfile, b: CellProfile, min_per_bin: int = DEFAULT_MIN_PER_BIN):
    """Fisher-combined KS index across bins where both cells have enough data.

    Lower = more similar.  Returns None when no bin has ``min_per_bin``
    samples on both sides.
    """
    if min_per_bin < 2:
        raise ValueError(f"min_per_bin must be >= 2, got {min_per_bin}")
    pvals = []
    for k in range(N_BINS):
        xa = a.per_bin_samples[k]
        xb = b.per_bin_samples[k]
        if len(xa) >= min_per_bin and len(xb) >= min_per_bin:
            pvals.append(ks_two_sample(xa, xb).p_value)
    if not pvals:
        return None
    return fisher_combine(pvals).index


def build_matrix(profiles: Sequence[CellProfile], min_per_bin: int = DEFAULT_MIN_PER_BIN) -> SimilarityMatrix:
    """Evaluate every unordered pair (diagonal included); NaN marks missing.

    Pairs are independent, so evaluation order cannot change the result; we
    fill the upper triangle sequentially and mirror it.
    """
    if len(profiles) < 2:
        raise ValueError(f"need at least 2 profiles, got {len(profiles)}")
    n = len(profiles)
    m = np.full((n, n), np.nan)
    for i in range(n):
        for j in range(i, n):
            v = pair_index(profiles[i], profiles[j], min_per_bin)
            if v is not None:
                m[i, j] = v
                m[j, i] = v
    return SimilarityMatrix(
        cells=tuple(p.cell_id for p in profiles), entries=m, min_per_bin=min_per_bin
    )


def row_means(matrix: SimilarityMatrix) -> np.ndarray:
    """Mean of each cell's defined off-diagonal entries; NaN when none defined."""
    m = matrix.entries
    n = m.shape[0]
    out = np.full(n, np.nan)
    for i in range(n):
        row = np.delete(m[i], i)
        defined = row[~np.isnan(row)]
        if defined.size:
            out[i] = defined.mean()
    return out


def order_by_row_sum(matrix: SimilarityMatrix) -> tuple:
    """Cells ascending by mean defined off-diagonal index; all-missing last.

    Ties (including among all-missing cells) break on cell_id, so the
    permutation is deterministic.  With no missing entries this is the same
    ordering as the raw row sum.
    """
    means = row_means(matrix)
    keyed = [
        (np.isnan(means[i]), means[i] if not np.isnan(means[i]) else 0.0, matrix.cells[i])
        for i in range(len(matrix.cells))
    ]
    return tuple(c for _, _, c in sorted(keyed))


def reorder(matrix: SimilarityMatrix, order: Sequence[str]) -> SimilarityMatrix:
    """Row/column permutation of the matrix following ``order``."""
    if sorted(order) != sorted(matrix.cells):
        raise ValueError("order must be a permutation of the matrix cells")
    idx = np.array([matrix.cells.index(c) for c in order])
    return SimilarityMatrix(
        cells=tuple(order), entries=matrix.entries[np.ix_(idx, idx)], min_per_bin=matrix.min_per_bin
    )


def extract_groups(matrix: SimilarityMatrix) -> tuple[tuple, tuple]:
    """Experimental two-way split of the seriated cells.

    Cuts the ordered row-mean sequence at its largest consecutive gap;
    cells with no defined entries are left out of both groups.  A heuristic
    stand-in for eyeballing the heatmap's block structure.
    """
    order = order_by_row_sum(matrix)
    means = row_means(matrix)
    by_cell = dict(zip(matrix.cells, means))
    ranked = [c for c in order if not np.isnan(by_cell[c])]
    if len(ranked) < 2:
        return tuple(ranked), ()
    vals = np.array([by_cell[c] for c in ranked])
    cut = int(np.argmax(np.diff(vals))) + 1
    return tuple(ranked[:cut]), tuple(ranked[cut:])


def subsample_cells(profiles: Sequence[CellProfile], k: int, seed: int) -> list[CellProfile]:
    """Seeded choice of k profiles (order preserved); presentation helper."""
    if k >= len(profiles):
        return list(profiles)
    rng = np.random.default_rng(seed)
    idx = np.sort(rng.choice(len(profiles), size=k, replace=False))
    return [profiles[i] for i in idx]


def write_matrix_csv(matrix: SimilarityMatrix, path) -> None:
    """Ordered matrix as CSV: leading label row/column, missing = empty field."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([""] + list(matrix.cells))
        for i, cell in enumerate(matrix.cells):
            row = [cell]
            for v in matrix.entries[i]:
                row.append("" if np.isnan(v) else format(v, ".12g"))
            writer.writerow(row)


def _ramp(t: float) -> str:
    # blue (low / similar) to red (high / dissimilar)
    r = int(round(255 * t))
    return f"#{r:02x}00{255 - r:02x}"


def render_heatmap_svg(matrix: SimilarityMatrix, path, cell_px: int = 10) -> None:
    """Fixed-size heatmap: color spans the 5th-95th percentile, white = missing."""
    m = matrix.entries
    n = m.shape[0]
    defined = m[~np.isnan(m)]
    if defined.size:
        lo = float(np.percentile(defined, 5))
        hi = float(np.percentile(defined, 95))
    else:
        lo = hi = 0.0
    span = hi - lo
    side = n * cell_px
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{side}" height="{side}" '
        f'viewBox="0 0 {side} {side}">'
    ]
    for i in range(n):
        for j in range(n):
            v = m[i, j]
            if np.isnan(v):
                fill = "#ffffff"
            else:
                t = 0.5 if span <= 0.0 else min(max((v - lo) / span, 0.0), 1.0)
                fill = _ramp(t)
            parts.append(
                f'<rect x="{j * cell_px}" y="{i * cell_px}" '
                f'width="{cell_px}" height="{cell_px}" fill="{fill}"/>'
            )
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts) + "\n")
