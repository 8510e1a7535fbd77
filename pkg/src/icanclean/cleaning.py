"""Reference-noise cleaning built on canonical correlation analysis.

Each cleaning pass runs the same four stages on a block of data: find the
variate pairs shared between the data block and the reference noise block,
select the pairs whose squared correlation meets the threshold, regress the
selected activity onto the data channels by least squares, and subtract the
reconstruction. The pass can cover the whole record (:func:`clean_batch`),
slide across it in windows (:func:`clean_sliding`), or be frozen into a
reusable channel-space map (:func:`fit_spatial_filter`).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .cca import as_matrix, canoncorr, least_squares_solve
from .errors import ConfigurationError, ShapeError, ValidationError
from .recording import Recording

__all__ = [
    "CleanConfig",
    "CleanReport",
    "ComponentSource",
    "Selection",
    "SpatialFilter",
    "WindowDiagnostics",
    "apply_spatial_filter",
    "clean_batch",
    "clean_sliding",
    "fit_spatial_filter",
    "min_window_samples",
    "project_noise",
    "select_bad_components",
]


class ComponentSource(enum.Enum):
    """Which variate set supplies the activity that gets regressed out."""

    DATA_VARIATES = "u"
    NOISE_VARIATES = "v"


@dataclass(frozen=True)
class CleanConfig:
    """Settings for one cleaning run.

    thresh : float
        Squared-correlation threshold in [0, 1]; components with
        ``correlation**2 >= thresh`` are removed. 0 removes every shared
        component (destructive), 1 removes only perfectly correlated ones.
    source : ComponentSource or str
        Variates to regress out: data-side ("u", the default) or
        reference-side ("v").
    window_len : int
        Samples per window; 0 means the whole record at once.
    window_hop : int or None
        Samples between window starts; defaults to ``window_len``
        (non-overlapping). Must satisfy ``1 <= window_hop <= window_len``.
    """

    thresh: float
    source: ComponentSource = ComponentSource.DATA_VARIATES
    window_len: int = 0
    window_hop: int | None = None

    def __post_init__(self):
        thresh = float(self.thresh)
        if not math.isfinite(thresh) or not 0.0 <= thresh <= 1.0:
            raise ConfigurationError(f"thresh must be in [0, 1], got {self.thresh}")
        source = ComponentSource(self.source)
        window_len = int(self.window_len)
        if window_len < 0:
            raise ConfigurationError(f"window_len must be >= 0, got {window_len}")
        hop = self.window_hop
        if hop is None:
            hop = window_len
        hop = int(hop)
        if window_len > 0 and not 1 <= hop <= window_len:
            raise ConfigurationError(
                f"window_hop must be in [1, window_len], got hop {hop} for window {window_len}"
            )
        object.__setattr__(self, "thresh", thresh)
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "window_len", window_len)
        object.__setattr__(self, "window_hop", hop)


@dataclass(frozen=True)
class Selection:
    """Components chosen for removal.

    ``bad_indices`` are 1-based component numbers (component 1 carries the
    largest correlation); ``bad_activity`` holds the matching variate
    columns, shape (n_samples, n_bad).
    """

    bad_indices: tuple[int, ...]
    bad_activity: np.ndarray

    @property
    def n_bad(self) -> int:
        return len(self.bad_indices)


@dataclass(frozen=True)
class SpatialFilter:
    """A fixed channel-space linear map plus its training means.

    Application is ``(x - train_mean) @ matrix + train_mean``; with no
    selected components the matrix is the identity.
    """

    matrix: np.ndarray
    train_mean: np.ndarray
    thresh: float
    n_bad: int
    correlations: np.ndarray

    @property
    def n_channels(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class WindowDiagnostics:
    """What one window of a cleaning run did."""

    start: int
    length: int
    n_comp: int
    bad_indices: tuple[int, ...]
    correlations: np.ndarray
    reused_filter: bool = False

    @property
    def n_bad(self) -> int:
        return len(self.bad_indices)


@dataclass(frozen=True)
class CleanReport:
    """Per-run diagnostics.

    ``correlations`` has one entry per component (for sliding runs, the
    per-index maximum across windows); ``bad_indices`` is the sorted union
    of removed component numbers; ``variance_removed_per_channel`` is the
    fraction of each channel's variance carried by the subtracted noise,
    clamped to [0, 1].
    """

    correlations: np.ndarray
    bad_indices: tuple[int, ...]
    variance_removed_per_channel: np.ndarray
    windows_processed: int
    n_comp: int
    windows: tuple[WindowDiagnostics, ...]

    @property
    def n_bad(self) -> int:
        return len(self.bad_indices)


def select_bad_components(cca, config):
    """Pick the components whose squared correlation meets the threshold.

    Returns their 1-based indices plus the matching variate columns: u
    variates for ``DATA_VARIATES``, v variates for ``NOISE_VARIATES``. An
    empty selection is a valid result.
    """
    r2 = np.square(cca.correlations)
    positions = np.flatnonzero(r2 >= config.thresh)
    if config.source is ComponentSource.DATA_VARIATES:
        activity = cca.u_variates[:, positions]
    else:
        activity = cca.v_variates[:, positions]
    return Selection(tuple(int(p) + 1 for p in positions), activity.copy())


def project_noise(selection, x_centered):
    """Least-squares projection of the selected activity onto the channels.

    Returns
    -------
    projection : ndarray, shape (n_bad, n_channels)
        Coefficients relating component space to channel space.
    projected_noise : ndarray, shape (n_samples, n_channels)
        ``bad_activity @ projection``; the orthogonal projection of each
        centered channel onto the span of the selected activity. All zeros
        when nothing is selected.
    """
    x_centered = as_matrix(x_centered, "x_centered")
    if selection.n_bad == 0:
        return (
            np.zeros((0, x_centered.shape[1])),
            np.zeros_like(x_centered),
        )
    if selection.bad_activity.shape[0] != x_centered.shape[0]:
        raise ShapeError(
            "bad_activity and x_centered must cover the same samples, got "
            f"{selection.bad_activity.shape[0]} and {x_centered.shape[0]} rows"
        )
    projection = least_squares_solve(selection.bad_activity, x_centered)
    return projection, selection.bad_activity @ projection


@dataclass(frozen=True)
class _BlockResult:
    # One full pipeline pass over a contiguous block.
    cca: object
    selection: Selection
    projection: np.ndarray
    projected_noise: np.ndarray
    cleaned: np.ndarray


def _clean_block(x_samples, y_samples, config):
    cca = canoncorr(x_samples, y_samples)
    selection = select_bad_components(cca, config)
    x_centered = x_samples - cca.x_mean
    projection, projected = project_noise(selection, x_centered)
    return _BlockResult(cca, selection, projection, projected, x_samples - projected)


def _check_aligned(x, y):
    if not isinstance(x, Recording) or not isinstance(y, Recording):
        raise ValidationError("clean operations take Recording inputs")
    if x.n_samples != y.n_samples:
        raise ShapeError(
            f"data and noise recordings are misaligned: {x.n_samples} vs {y.n_samples} samples"
        )
    if not math.isclose(x.sampling_rate_hz, y.sampling_rate_hz, rel_tol=1e-9):
        raise ValidationError(
            f"sampling rates differ: {x.sampling_rate_hz} vs {y.sampling_rate_hz} Hz"
        )


def _variance_fraction(x_samples, projected_noise):
    # Fraction of each channel's variance sitting in the subtracted noise.
    x_var = np.var(x_samples, axis=0, ddof=1)
    noise_var = np.var(projected_noise, axis=0, ddof=1)
    out = np.zeros_like(x_var)
    np.divide(noise_var, x_var, out=out, where=x_var > 0)
    return np.clip(out, 0.0, 1.0)


def clean_batch(x, y, config):
    """Clean a whole record in one pass.

    Channel labels, sampling rate, and per-channel means pass through
    unchanged (the subtracted noise is zero-mean by construction).

    Parameters
    ----------
    x : Recording
        Corrupted data; one sample per row.
    y : Recording
        Time-aligned reference noise recordings.
    config : CleanConfig
        ``window_len`` must be 0 or at least the record length.

    Returns
    -------
    (Recording, CleanReport)
    """
    _check_aligned(x, y)
    t = x.n_samples
    if config.window_len != 0 and config.window_len < t:
        raise ConfigurationError(
            f"window_len {config.window_len} is shorter than the record ({t} samples); "
            "use clean_sliding for windowed cleaning"
        )
    block = _clean_block(x.samples, y.samples, config)
    diag = WindowDiagnostics(
        start=0,
        length=t,
        n_comp=block.cca.n_comp,
        bad_indices=block.selection.bad_indices,
        correlations=block.cca.correlations.copy(),
    )
    report = CleanReport(
        correlations=block.cca.correlations.copy(),
        bad_indices=block.selection.bad_indices,
        variance_removed_per_channel=_variance_fraction(x.samples, block.projected_noise),
        windows_processed=1,
        n_comp=block.cca.n_comp,
        windows=(diag,),
    )
    return Recording(block.cleaned, x.channel_labels, x.sampling_rate_hz), report


def fit_spatial_filter(x, y, config):
    """Fit a reusable channel-space filter from a training record pair.

    The returned filter reproduces ``clean_batch(x, y, config)`` on its own
    training data and can then run on new data without reference channels.
    Only ``DATA_VARIATES`` sources are supported; a reference-variate filter
    would need the noise channels again at application time.
    """
    if config.source is not ComponentSource.DATA_VARIATES:
        raise ConfigurationError(
            "spatial filters require source=DATA_VARIATES; noise-variate cleaning "
            "cannot be expressed as a map on data channels alone"
        )
    _check_aligned(x, y)
    if config.window_len != 0 and config.window_len < x.n_samples:
        raise ConfigurationError(
            "fit_spatial_filter uses the whole record; window_len must be 0 or >= the record length"
        )
    block = _clean_block(x.samples, y.samples, config)
    n = x.n_channels
    matrix = np.eye(n)
    if block.selection.n_bad > 0:
        positions = np.asarray(block.selection.bad_indices) - 1
        a_bad = block.cca.a_unmix[:, positions]
        matrix = matrix - a_bad @ block.projection
    return SpatialFilter(
        matrix=matrix,
        train_mean=block.cca.x_mean.copy(),
        thresh=config.thresh,
        n_bad=block.selection.n_bad,
        correlations=block.cca.correlations.copy(),
    )


def apply_spatial_filter(x_new, f):
    """Apply a fitted filter to new data with matching channel count.

    Works row by row, so single-sample recordings (n_samples == 1) are valid
    input for streaming use.
    """
    if not isinstance(x_new, Recording):
        raise ValidationError("apply_spatial_filter takes a Recording input")
    if x_new.n_channels != f.n_channels:
        raise ShapeError(
            f"recording has {x_new.n_channels} channels but the filter was fit on {f.n_channels}"
        )
    out = (x_new.samples - f.train_mean) @ f.matrix + f.train_mean
    return Recording(out, x_new.channel_labels, x_new.sampling_rate_hz)


def min_window_samples(n_data_channels, n_noise_channels):
    """Smallest window length that keeps per-window CCA well posed."""
    return max(3, max(n_data_channels, n_noise_channels) + 1)


@dataclass(frozen=True)
class _WindowMap:
    """The cleaning map fitted on one window, reusable on later samples."""

    source: ComponentSource
    x_mean: np.ndarray
    y_mean: np.ndarray
    coeff_bad: np.ndarray  # unmixing columns of the selected components
    projection: np.ndarray
    n_comp: int
    bad_indices: tuple[int, ...]
    correlations: np.ndarray

    @classmethod
    def from_block(cls, block, source):
        positions = np.asarray(block.selection.bad_indices, dtype=int) - 1
        if source is ComponentSource.DATA_VARIATES:
            coeff = block.cca.a_unmix[:, positions]
        else:
            coeff = block.cca.b_unmix[:, positions]
        return cls(
            source=source,
            x_mean=block.cca.x_mean.copy(),
            y_mean=block.cca.y_mean.copy(),
            coeff_bad=coeff.copy(),
            projection=block.projection.copy(),
            n_comp=block.cca.n_comp,
            bad_indices=block.selection.bad_indices,
            correlations=block.cca.correlations.copy(),
        )

    def apply(self, x_samples, y_samples):
        if len(self.bad_indices) == 0:
            return x_samples.copy()
        if self.source is ComponentSource.DATA_VARIATES:
            activity = (x_samples - self.x_mean) @ self.coeff_bad
        else:
            activity = (y_samples - self.y_mean) @ self.coeff_bad
        return x_samples - activity @ self.projection


def _crossfade_weights(length):
    # Integer triangle 1, 2, ..., 2, 1: strictly positive so every covered
    # sample has nonzero total weight.
    ramp = np.arange(1, length + 1, dtype=np.float64)
    return np.minimum(ramp, ramp[::-1])


def clean_sliding(x, y, config):
    """Clean with a sliding window, re-fitting the pipeline per window.

    Every window ``[k * hop, k * hop + window_len)`` is cleaned independently
    with fresh per-window means, which tracks noise coupling that changes
    over the record. Non-overlapping windows (hop == window_len) concatenate
    exactly; overlapping windows blend with normalized triangular crossfade
    weights. A trailing block too short for its own decomposition is cleaned
    by reusing the previous window's fitted map.

    Returns
    -------
    (Recording, CleanReport)
        The report aggregates per-window diagnostics: per-index maximum
        correlations, the union of removed component numbers, and one
        :class:`WindowDiagnostics` entry per window.
    """
    _check_aligned(x, y)
    window_len = config.window_len
    if window_len <= 0:
        raise ConfigurationError("clean_sliding requires window_len > 0")
    hop = config.window_hop
    min_win = min_window_samples(x.n_channels, y.n_channels)
    if window_len < min_win:
        raise ConfigurationError(
            f"window_len {window_len} is below the minimum {min_win} for "
            f"{x.n_channels} data and {y.n_channels} reference channels"
        )

    t = x.n_samples
    xs, ys = x.samples, y.samples

    # (start, length, fresh-fit?) covering [0, t) contiguously.
    segments = []
    if t >= window_len:
        full_starts = range(0, t - window_len + 1, hop)
        for s in full_starts:
            segments.append((s, window_len, True))
        last_start = full_starts[-1]
        if last_start + window_len < t:
            tail_start = last_start + hop
            tail_len = t - tail_start
            segments.append((tail_start, tail_len, tail_len >= min_win))
    else:
        segments.append((0, t, True))

    overlap = hop < window_len
    if overlap:
        blended = np.zeros_like(xs)
        weight = np.zeros(t)
    else:
        out = np.empty_like(xs)

    diagnostics = []
    last_map = None
    for start, length, fresh in segments:
        xw = xs[start : start + length]
        yw = ys[start : start + length]
        if fresh:
            block = _clean_block(xw, yw, config)
            cleaned = block.cleaned
            last_map = _WindowMap.from_block(block, config.source)
            diagnostics.append(
                WindowDiagnostics(
                    start=start,
                    length=length,
                    n_comp=block.cca.n_comp,
                    bad_indices=block.selection.bad_indices,
                    correlations=block.cca.correlations.copy(),
                )
            )
        else:
            # tail shorter than a well-posed window: reuse the previous fit
            cleaned = last_map.apply(xw, yw)
            diagnostics.append(
                WindowDiagnostics(
                    start=start,
                    length=length,
                    n_comp=last_map.n_comp,
                    bad_indices=last_map.bad_indices,
                    correlations=last_map.correlations,
                    reused_filter=True,
                )
            )
        if overlap:
            w = _crossfade_weights(length)
            blended[start : start + length] += cleaned * w[:, None]
            weight[start : start + length] += w
        else:
            out[start : start + length] = cleaned

    if overlap:
        out = blended / weight[:, None]

    n_comp = max(d.n_comp for d in diagnostics)
    correlations = np.zeros(n_comp)
    for d in diagnostics:
        k = len(d.correlations)
        np.maximum(correlations[:k], d.correlations, out=correlations[:k])
    bad_union = sorted(set().union(*(d.bad_indices for d in diagnostics)))
    report = CleanReport(
        correlations=correlations,
        bad_indices=tuple(bad_union),
        variance_removed_per_channel=_variance_fraction(xs, xs - out),
        windows_processed=len(segments),
        n_comp=n_comp,
        windows=tuple(diagnostics),
    )
    return Recording(out, x.channel_labels, x.sampling_rate_hz), report
