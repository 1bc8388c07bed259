"""Delay embedding of scalar time series into Hankel matrices.

A length-L series f sampled every dt seconds embeds into an m x (n+1)
Hankel matrix H with H[i][j] = f[i + j], together with its one-step
shift UH[i][j] = f[i + j + 1]. Columns are successive delayed copies of
the series; rows index time along the trajectory. Multiple observables
embed into separate blocks that are scaled and concatenated column-wise
into one composite data matrix pair (X, Y) for the DMD stage.

Several trajectories of the same system can be interleaved sample-wise
into a single series; the embedding then steps all trajectories together,
so one column holds every trajectory at one delay window and the one-step
shift advances each trajectory by one sample.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .ioutil import atomic_write_text, format_float

# Relative tolerance for the uniform-spacing check on CSV time columns.
SPACING_RTOL = 1e-6


@dataclass(frozen=True)
class TimeSeries:
    """Uniformly sampled scalar observable along one or more trajectories.

    values: flat sample vector. With channels == c > 1 the vector holds c
        interleaved trajectories: values[c*i + p] is trajectory p at time
        step i, and the length must be divisible by c.
    dt: sampling interval in seconds, > 0.
    label: column label used in CSV output (no commas).
    """

    values: np.ndarray
    dt: float
    label: str = "f"
    channels: int = 1

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size < 2:
            raise ValueError(f"series must be 1-D with at least 2 samples, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("series contains non-finite samples")
        if not (np.isfinite(self.dt) and self.dt > 0):
            raise ValueError(f"dt must be positive and finite, got {self.dt}")
        if self.channels < 1:
            raise ValueError(f"channels must be >= 1, got {self.channels}")
        if v.size % self.channels != 0:
            raise ValueError(
                f"series length {v.size} is not divisible by channels={self.channels}"
            )
        if "," in self.label or "\n" in self.label:
            raise ValueError(f"label must not contain commas or newlines: {self.label!r}")
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class HankelBlock:
    """Hankel matrix H and its one-step shift UH for one observable.

    For channels == 1: H is m x (n+1) with H[i][j] = f[i+j] and
    UH[i][j] = f[i+j+1], so UH[:, j] == H[:, j+1] and H[1:, :] == UH[:-1, :].
    For channels == c: H has m*c rows, row c*i+p holds trajectory p, and
    the shift relations hold with row offset c instead of 1.
    scale: multiplier applied when this block enters a composite matrix.
    """

    H: np.ndarray
    UH: np.ndarray
    m: int
    n: int
    dt: float
    channels: int = 1
    scale: float = 1.0
    label: str = "f"


@dataclass(frozen=True)
class CompositeData:
    """Column-concatenated scaled blocks: X = [s_1 H_1 | s_2 H_2 | ...].

    block_offsets[i] = (start, stop) column range of block i inside X and Y.
    """

    X: np.ndarray
    Y: np.ndarray
    block_offsets: tuple[tuple[int, int], ...]
    scales: tuple[float, ...]


def hankel(series: TimeSeries, m: int, n: int) -> HankelBlock:
    """Delay-embed a series into an m x (n+1) Hankel block plus its shift.

    Requires channels * (m + n + 1) samples: every trajectory must supply
    m + n + 1 samples so that both H and the shifted UH fit.
    """
    if m < 1 or n < 0:
        raise ValueError(f"need m >= 1 and n >= 0, got m={m}, n={n}")
    c = series.channels
    needed = c * (m + n + 1)
    if len(series) < needed:
        raise ValueError(
            f"series too short for m={m}, n={n}, channels={c}: "
            f"need {needed} samples, have {len(series)}"
        )
    v = series.values
    rows = np.arange(m * c)[:, None]
    cols = c * np.arange(n + 1)[None, :]
    H = v[rows + cols]
    UH = v[rows + cols + c]
    return HankelBlock(
        H=H, UH=UH, m=m, n=n, dt=series.dt, channels=c, scale=1.0, label=series.label
    )


def strided_series(series: TimeSeries, stride: int) -> TimeSeries:
    """Keep every stride-th sample; the interval becomes stride * dt.

    Striding an interleaved series would mix trajectories, so it is only
    defined for channels == 1 (stride first, interleave after).
    """
    if stride < 1:
        raise ValueError(f"stride must be >= 1, got {stride}")
    if series.channels != 1:
        raise ValueError("strided_series requires a single-channel series")
    if stride == 1:
        return series
    return replace(series, values=series.values[::stride], dt=series.dt * stride)


def interleave(series_list: list[TimeSeries]) -> TimeSeries:
    """Merge equal-length, equal-dt trajectories sample-wise.

    Two series (a0, a1), (b0, b1) merge to (a0, b0, a1, b1). The result has
    channels == len(series_list); a single series passes through unchanged.
    """
    if not series_list:
        raise ValueError("interleave needs at least one series")
    first = series_list[0]
    if len(series_list) == 1:
        return first
    for s in series_list:
        if s.channels != 1:
            raise ValueError("interleave inputs must be single-channel series")
        if len(s) != len(first):
            raise ValueError(
                f"length mismatch: {len(s)} vs {len(first)} (all series must align)"
            )
        if not math.isclose(s.dt, first.dt, rel_tol=1e-12, abs_tol=0.0):
            raise ValueError(f"dt mismatch: {s.dt} vs {first.dt}")
    stacked = np.column_stack([s.values for s in series_list])
    labels = {s.label for s in series_list}
    label = first.label if len(labels) == 1 else "|".join(s.label for s in series_list)
    return TimeSeries(
        values=stacked.ravel(), dt=first.dt, label=label, channels=len(series_list)
    )


def scale_factor(block: HankelBlock, reference: HankelBlock, mode: str = "last_column") -> float:
    """Relative scale of one observable's block against the reference block.

    mode="last_column": ratio of last-column norms ||H[:, -1]|| / ||Href[:, -1]||.
    mode="norm_balance": ratio of first-column (observation vector) norms
        ||Href[:, 0]|| / ||H[:, 0]||, which rescales the block to the
        reference block's sample norm.
    """
    if mode == "last_column":
        num = float(np.linalg.norm(block.H[:, -1]))
        den = float(np.linalg.norm(reference.H[:, -1]))
    elif mode == "norm_balance":
        num = float(np.linalg.norm(reference.H[:, 0]))
        den = float(np.linalg.norm(block.H[:, 0]))
    else:
        raise ValueError(f"unknown scale mode {mode!r} (use 'last_column' or 'norm_balance')")
    if den == 0.0:
        raise ValueError("scale_factor reference column has zero norm")
    if num == 0.0:
        raise ValueError("scale_factor block column has zero norm")
    return num / den


def composite(blocks: list[HankelBlock], scales: list[float] | None = None) -> CompositeData:
    """Concatenate scaled blocks column-wise into one (X, Y) pair.

    All blocks must share the same number of rows (same m and channels).
    scales defaults to each block's own scale attribute.
    """
    if not blocks:
        raise ValueError("composite needs at least one block")
    if scales is None:
        scales = [b.scale for b in blocks]
    if len(scales) != len(blocks):
        raise ValueError(f"got {len(scales)} scales for {len(blocks)} blocks")
    rows = blocks[0].H.shape[0]
    for b in blocks:
        if b.H.shape[0] != rows:
            raise ValueError(
                f"row mismatch: block has {b.H.shape[0]} rows, expected {rows} "
                "(all blocks must share m and channels)"
            )
    for s in scales:
        if not (np.isfinite(s) and s > 0):
            raise ValueError(f"scales must be positive and finite, got {s}")
    offsets = []
    start = 0
    for b in blocks:
        stop = start + b.H.shape[1]
        offsets.append((start, stop))
        start = stop
    X = np.hstack([s * b.H for s, b in zip(scales, blocks)])
    Y = np.hstack([s * b.UH for s, b in zip(scales, blocks)])
    return CompositeData(
        X=X, Y=Y, block_offsets=tuple(offsets), scales=tuple(float(s) for s in scales)
    )


def read_timeseries_csv(path) -> list[TimeSeries]:
    """Read 't,<label>[,<label>...]' CSV into one TimeSeries per column.

    The time column must be uniformly spaced to relative tolerance 1e-6;
    dt is taken as the mean spacing. At least two samples are required.
    """
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if ln.strip() != ""]
    if not lines:
        raise ValueError(f"{path}: empty file")
    header = [h.strip() for h in lines[0].split(",")]
    if len(header) < 2 or header[0] != "t":
        raise ValueError(
            f"{path}: header must be 't,<label>[,<label>...]', got {lines[0]!r}"
        )
    labels = header[1:]
    rows = []
    for ln_no, ln in enumerate(lines[1:], start=2):
        parts = ln.split(",")
        if len(parts) != len(header):
            raise ValueError(
                f"{path}:{ln_no}: expected {len(header)} fields, got {len(parts)}"
            )
        try:
            rows.append([float(p) for p in parts])
        except ValueError as exc:
            raise ValueError(f"{path}:{ln_no}: {exc}") from None
    data = np.asarray(rows, dtype=float)
    if data.shape[0] < 2:
        raise ValueError(f"{path}: need at least 2 samples, got {data.shape[0]}")
    if not np.all(np.isfinite(data)):
        raise ValueError(f"{path}: non-finite values present")
    t = data[:, 0]
    dt = (t[-1] - t[0]) / (data.shape[0] - 1)
    if dt <= 0:
        raise ValueError(f"{path}: time column must be strictly increasing")
    steps = np.diff(t)
    worst = np.max(np.abs(steps - dt))
    if worst > SPACING_RTOL * dt:
        raise ValueError(
            f"{path}: non-uniform time spacing (max deviation {worst:.3e} "
            f"vs dt={dt!r}, relative tolerance {SPACING_RTOL})"
        )
    return [
        TimeSeries(values=data[:, j + 1], dt=float(dt), label=labels[j])
        for j in range(len(labels))
    ]


def write_timeseries_csv(path, series_list: list[TimeSeries], t0: float = 0.0) -> None:
    """Write aligned single-channel series as 't,<label>...' CSV.

    Floats carry 17 significant digits, so a read-back reproduces the
    sample values bit-exactly.
    """
    if not series_list:
        raise ValueError("write_timeseries_csv needs at least one series")
    first = series_list[0]
    for s in series_list:
        if s.channels != 1:
            raise ValueError("CSV export is defined for single-channel series")
        if len(s) != len(first) or not math.isclose(s.dt, first.dt, rel_tol=1e-12):
            raise ValueError("all series in one CSV must share length and dt")
    header = "t," + ",".join(s.label for s in series_list)
    out = [header]
    for i in range(len(first)):
        t = t0 + i * first.dt
        cells = [format_float(t)] + [format_float(s.values[i]) for s in series_list]
        out.append(",".join(cells))
    atomic_write_text(path, "\n".join(out) + "\n")
