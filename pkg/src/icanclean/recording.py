"""In-memory multichannel recording container."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class Recording:
    """A time-by-channel sample block with channel labels and a sampling rate.

    ``samples`` is coerced to a finite float64 array of shape
    (n_samples, n_channels); labels are unique non-empty strings, one per
    column, free of commas and line breaks so every recording stays CSV
    serializable.
    """

    samples: np.ndarray
    channel_labels: tuple[str, ...]
    sampling_rate_hz: float

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 2:
            raise ValidationError(
                f"samples must be 2-D (samples x channels), got {samples.ndim} dimension(s)"
            )
        if samples.shape[0] < 1 or samples.shape[1] < 1:
            raise ValidationError(
                f"samples must have at least one row and one column, got shape {samples.shape}"
            )
        if not np.isfinite(samples).all():
            row, col = np.argwhere(~np.isfinite(samples))[0]
            raise ValidationError(f"non-finite sample at row {row}, column {col}")

        labels = tuple(self.channel_labels)
        if len(labels) != samples.shape[1]:
            raise ValidationError(
                f"{len(labels)} channel labels for {samples.shape[1]} channels"
            )
        for label in labels:
            if not isinstance(label, str) or label == "":
                raise ValidationError(f"channel labels must be non-empty strings, got {label!r}")
            if "," in label or "\n" in label or "\r" in label:
                raise ValidationError(f"channel label {label!r} contains a comma or line break")
        seen = set()
        for label in labels:
            if label in seen:
                raise ValidationError(f"duplicate channel label {label!r}")
            seen.add(label)

        rate = float(self.sampling_rate_hz)
        if not np.isfinite(rate) or rate <= 0:
            raise ValidationError(f"sampling_rate_hz must be positive, got {rate}")

        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "channel_labels", labels)
        object.__setattr__(self, "sampling_rate_hz", rate)

    @property
    def n_samples(self) -> int:
        return self.samples.shape[0]

    @property
    def n_channels(self) -> int:
        return self.samples.shape[1]

    @property
    def duration_seconds(self) -> float:
        return self.n_samples / self.sampling_rate_hz
