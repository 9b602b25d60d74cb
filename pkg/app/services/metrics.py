"""
Run metrics computed from a recorded time series
"""
import math
from typing import Dict, Optional

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from app.schemas.results import ConnectionSummary, RunSummary, TimeSeries
from app.schemas.scenario import LinkModel, ScenarioConfig
from app.services.fairness import satisfaction_ratio


def rate_matrix(series: TimeSeries):
    """
    Pivot the series into (times, conn_ids, rates) with NaN where a connection has no row

    Returns:
        Tuple of sorted times array, connection ids in first-seen order, and a
        (len(times), len(conn_ids)) matrix of send rates
    """
    times = np.unique(np.asarray(series.time, dtype=float))
    conn_ids = list(dict.fromkeys(series.conn_id))
    column = {conn: j for j, conn in enumerate(conn_ids)}
    matrix = np.full((len(times), len(conn_ids)), np.nan)
    rows = np.searchsorted(times, series.time)
    for row, conn, rate in zip(rows, series.conn_id, series.send_rate):
        matrix[row, column[conn]] = rate
    return times, conn_ids, matrix


def convergence_time(
    series: TimeSeries,
    band: float = 0.1,
    hold: float = 5.0,
    after: float = 0.0,
    until: float = math.inf,
    resolution: float = 1.0,
) -> Optional[float]:
    """
    Earliest time after which every connection stays within +-band of its window mean

    Rates are first averaged into resolution-second bins; a bin counts only if
    the connection has a row at every record instant inside it. A hold-second
    window is steady when each connection present in it lies within the band
    around its own window mean; a connection absent for the whole window is
    ignored, one present for only part of it fails the window.

    Args:
        series: Recorded time series
        band: Relative tolerance around each connection's mean over the window
        hold: Window length in seconds
        after: Ignore windows starting before this time
        until: Ignore windows ending after this time
        resolution: Bin width in seconds

    Returns:
        Start of the final run of steady windows, or None if the last window
        in [after, until] is not steady
    """
    if len(series) == 0:
        return None
    times, _, matrix = rate_matrix(series)
    spacing = float(np.min(np.diff(times))) if len(times) > 1 else resolution
    per_bin = max(1, int(round(resolution / spacing)))
    width = max(1, int(round(hold / resolution)))

    origin = math.floor(times[0] / resolution + 1e-9) * resolution
    bins = np.floor((times - times[0] + spacing / 2) / resolution).astype(int)
    n_bins = int(bins[-1]) + 1

    present = ~np.isnan(matrix)
    sums = np.zeros((n_bins, matrix.shape[1]))
    counts = np.zeros((n_bins, matrix.shape[1]))
    np.add.at(sums, bins, np.where(present, matrix, 0.0))
    np.add.at(counts, bins, present)
    rows = np.bincount(bins, minlength=n_bins)[:, None]
    complete = (rows == per_bin) & (counts == per_bin)
    binned = np.where(complete, sums / np.maximum(counts, 1), np.nan)
    # a trailing partial bin is still being filled
    while n_bins and rows[n_bins - 1, 0] < per_bin:
        n_bins -= 1
    binned = binned[:n_bins]
    if n_bins < width:
        return None

    windows = sliding_window_view(binned, width, axis=0)
    count = (~np.isnan(windows)).sum(axis=-1)
    mean = np.nansum(windows, axis=-1) / width
    highest = np.where(np.isnan(windows), -np.inf, windows).max(axis=-1)
    lowest = np.where(np.isnan(windows), np.inf, windows).min(axis=-1)
    slack = 1e-9 * np.abs(mean)

    steady = (count == width) & (highest <= mean * (1 + band) + slack) & (lowest >= mean * (1 - band) - slack)
    ok = ((count == 0) | steady).all(axis=1) & (count > 0).any(axis=1)

    starts = origin + np.arange(len(ok)) * resolution
    eligible = np.flatnonzero((starts >= after - 1e-9) & (starts + hold <= until + 1e-9))
    if len(eligible) == 0 or not ok[eligible[-1]]:
        return None
    failed = eligible[~ok[eligible]]
    first = eligible[0] if len(failed) == 0 else failed[-1] + 1
    return float(starts[first])


def rate_oscillation(series: TimeSeries, fraction: float = 1 / 3) -> Dict[str, float]:
    """Per-connection std/mean of the send rate over the final fraction of its rows"""
    result = {}
    for conn, (_, rates) in series.rates_by_connection().items():
        tail = np.asarray(rates[-max(1, int(math.ceil(len(rates) * fraction))):])
        mean = float(tail.mean())
        result[conn] = float(tail.std() / mean) if mean > 0 else math.nan
    return result


def utilization(series: TimeSeries, link: LinkModel, warmup: float = 0.0) -> float:
    """Mean over record instants (after warmup) of total send rate over capacity"""
    totals: Dict[float, float] = {}
    for t, rate in zip(series.time, series.send_rate):
        if t >= warmup:
            totals[t] = totals.get(t, 0.0) + rate
    if not totals:
        return 0.0
    return float(np.mean([total / link.capacity_at(t) for t, total in totals.items()]))


def summarize_run(series: TimeSeries, config: ScenarioConfig, seed: int) -> RunSummary:
    """
    Metrics of one run: satisfaction per connection, utilization and convergence

    Args:
        series: Recorded time series
        config: Scenario that produced it
        seed: Seed of the run

    Returns:
        RunSummary
    """
    oscillation = rate_oscillation(series)
    sums: Dict[str, float] = {}
    counts: Dict[str, int] = {}
    for t, conn, rate in zip(series.time, series.conn_id, series.send_rate):
        if t >= config.warmup:
            sums[conn] = sums.get(conn, 0.0) + rate
            counts[conn] = counts.get(conn, 0) + 1

    connections = []
    for spec in config.connections:
        avg = sums.get(spec.id, 0.0) / counts[spec.id] if counts.get(spec.id) else 0.0
        swing = oscillation.get(spec.id)
        connections.append(ConnectionSummary(
            conn_id=spec.id,
            protocol=spec.protocol.value,
            min_rate=spec.requirement.min_rate,
            max_rate=spec.requirement.max_rate,
            avg_rate=avg,
            satisfaction=satisfaction_ratio(avg, spec.requirement),
            oscillation=None if swing is None or math.isnan(swing) else swing,
        ))

    return RunSummary(
        seed=seed,
        utilization=utilization(series, config.link, config.warmup),
        convergence_time=convergence_time(series, after=config.warmup),
        connections=connections,
    )
