"""Start-stop coincidence histograms and peak-area extraction.

This emulates a time-interval analyzer: one detector provides start
signals, another provides stops, and every stop arriving within ``span``
after a start increments the histogram bin floor(delay / bin_width).
Multi-stop semantics are used (every stop after each start is counted, not
only the first), which keeps the cross-trial baseline unbiased.

Because trials repeat with the duty-cycle period, the histogram clusters
into peaks: the peak at zero lag collects same-trial coincidences and the
peaks at multiples of the cycle period collect accidental coincidences
between different trials.  ``peak_areas`` integrates the same-trial peak
(N) and the mean of the following baseline peaks (M); the normalized
correlation is their ratio (see :mod:`pairsim.analysis`).

For detector pairs whose gates are offset within the cycle (the Stokes to
anti-Stokes pair is delayed by the write-read delay), the peak windows are
shifted by ``peak_offset`` so that they track the actual peak positions.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .optics import DETECTOR_IDS, ClickEvent


class StreamOrderError(ValueError):
    """A timestamp stream violated its strictly-increasing contract."""


@dataclass
class TimestampStream:
    """Ordered click timestamps of one detector over a whole run."""

    detector_id: str
    timestamps: np.ndarray
    total_duration: float

    def __post_init__(self):
        self.timestamps = np.asarray(self.timestamps, dtype=np.float64)

    def __len__(self) -> int:
        return self.timestamps.size


@dataclass
class CoincidenceHistogram:
    """Binned start-stop delay counts for one detector pair."""

    pair_id: tuple[str, str]
    bin_width: float
    span: float
    bins: np.ndarray = field(repr=False)

    @property
    def n_bins(self) -> int:
        return self.bins.size

    def bin_starts(self) -> np.ndarray:
        """Left edge of every bin, in seconds of delay."""
        return np.arange(self.n_bins) * self.bin_width


@dataclass
class PeakAreas:
    """Same-trial peak area N and cross-trial baseline M for one pair."""

    n_same_trial: float
    m_baseline: float
    per_peak: tuple[float, ...]


def _require_sorted(stream: TimestampStream) -> None:
    ts = stream.timestamps
    if ts.size > 1 and not np.all(np.diff(ts) > 0):
        raise StreamOrderError(
            f"stream {stream.detector_id} is not strictly increasing")


def _bin_count(span: float, bin_width: float) -> int:
    if bin_width <= 0:
        raise ValueError(f"bin_width must be > 0, got {bin_width}")
    n = span / bin_width
    n_round = round(n)
    if n_round < 1 or abs(n - n_round) > 1e-9 * max(n, 1.0):
        raise ValueError(
            f"span {span} must be a positive integer multiple of bin_width {bin_width}")
    return int(n_round)


def histogram(start: TimestampStream, stop: TimestampStream,
              bin_width: float, span: float) -> CoincidenceHistogram:
    """Build the start-stop coincidence histogram for one detector pair.

    For every start time t_s and stop time t_p with 0 <= t_p - t_s < span
    the bin floor((t_p - t_s) / bin_width) is incremented.  Deterministic;
    negative delays are never recorded.
    """
    _require_sorted(start)
    _require_sorted(stop)
    n_bins = _bin_count(span, bin_width)
    counts = np.zeros(n_bins, dtype=np.int64)
    starts = start.timestamps
    stops = stop.timestamps
    if starts.size and stops.size:
        lo = np.searchsorted(stops, starts, side="left")
        hi = np.searchsorted(stops, starts + span, side="left")
        seg_len = hi - lo
        total = int(seg_len.sum())
        if total:
            excl = np.cumsum(seg_len) - seg_len
            idx = (np.arange(total) - np.repeat(excl, seg_len)
                   + np.repeat(lo, seg_len))
            delays = stops[idx] - np.repeat(starts, seg_len)
            bins = np.floor(delays / bin_width).astype(np.int64)
            good = (bins >= 0) & (bins < n_bins)
            counts = np.bincount(bins[good], minlength=n_bins).astype(np.int64)
    return CoincidenceHistogram(
        pair_id=(start.detector_id, stop.detector_id),
        bin_width=bin_width, span=span, bins=counts)


def _window_slice(hist: CoincidenceHistogram, lo: float, hi: float) -> slice:
    """Bins whose left edge lies in [lo, hi); exact at aligned edges."""
    bw = hist.bin_width

    def edge(x: float) -> int:
        q = x / bw
        r = round(q)
        return int(r) if abs(q - r) <= 1e-9 * max(abs(q), 1.0) else int(np.ceil(q))

    return slice(max(edge(lo), 0), min(edge(hi), hist.n_bins))


def peak_areas(hist: CoincidenceHistogram, cycle_period: float,
               gate_width: float, baseline_peaks: int,
               peak_offset: float = 0.0) -> PeakAreas:
    """Integrate the same-trial peak and the cross-trial baseline peaks.

    N sums the bins in [peak_offset, peak_offset + gate_width); peak j
    (j = 1..baseline_peaks) sums [peak_offset + j * cycle_period,
    peak_offset + j * cycle_period + gate_width); M is the arithmetic mean
    of the baseline-peak areas.  ``peak_offset`` shifts all windows by the
    start-stop gate offset of the pair (zero for same-gate pairs).
    """
    if gate_width >= cycle_period:
        raise ValueError("gate_width must be smaller than cycle_period")
    if baseline_peaks < 1:
        raise ValueError(f"baseline_peaks must be >= 1, got {baseline_peaks}")
    needed = baseline_peaks * cycle_period + peak_offset + gate_width
    if hist.span < needed:
        raise ValueError(
            f"histogram span {hist.span} too small: needs >= {needed} to cover "
            f"{baseline_peaks} baseline peaks at offset {peak_offset}")
    areas = []
    for j in range(baseline_peaks + 1):
        lo = peak_offset + j * cycle_period
        areas.append(float(hist.bins[_window_slice(hist, lo, lo + gate_width)].sum()))
    baseline = tuple(areas[1:])
    return PeakAreas(n_same_trial=areas[0],
                     m_baseline=sum(baseline) / baseline_peaks,
                     per_peak=baseline)


def merge_pair_streams(events: list[ClickEvent],
                       total_duration: float) -> dict[str, TimestampStream]:
    """Sort click events into one stream per detector.

    Stable under input permutation: clicks are ordered by timestamp, and at
    most one click per (detector, trial) exists so the order is unique.
    """
    by_detector: dict[str, list[float]] = defaultdict(list)
    for event in events:
        if event.detector_id not in DETECTOR_IDS:
            raise ValueError(f"unknown detector id {event.detector_id!r}")
        by_detector[event.detector_id].append(event.timestamp)
    return {
        det: TimestampStream(detector_id=det,
                             timestamps=np.sort(np.asarray(by_detector.get(det, []),
                                                           dtype=np.float64)),
                             total_duration=total_duration)
        for det in DETECTOR_IDS
    }


def export_histogram(hist: CoincidenceHistogram, path) -> None:
    """Write the histogram as delimited text, one row per bin.

    Column order is fixed: delay_bin_start_seconds, count.
    """
    with open(path, "w") as fh:
        fh.write("delay_bin_start_seconds,count\n")
        for edge, count in zip(hist.bin_starts(), hist.bins):
            fh.write(f"{float(edge)!r},{int(count)}\n")


def load_histogram(path, pair_id: tuple[str, str] = ("?", "?")) -> CoincidenceHistogram:
    """Read a histogram written by :func:`export_histogram`."""
    edges: list[float] = []
    counts: list[int] = []
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "delay_bin_start_seconds,count":
            raise ValueError(f"unexpected histogram header: {header!r}")
        for line in fh:
            edge, _, count = line.partition(",")
            edges.append(float(edge))
            counts.append(int(count))
    if len(edges) < 2:
        raise ValueError("histogram file needs at least two bins to "
                         "recover the bin width")
    bin_width = edges[1] - edges[0]
    span = bin_width * len(edges)
    return CoincidenceHistogram(pair_id=pair_id, bin_width=bin_width,
                                span=span, bins=np.asarray(counts, dtype=np.int64))
