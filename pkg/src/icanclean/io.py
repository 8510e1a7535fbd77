"""CSV reading and writing for recordings.

File contract: header ``time,<label1>,...,<labelN>``, one row per sample.
The time column must increase strictly and uniformly (relative jitter above
1e-6 is rejected); the sampling rate is inferred from the median time delta,
so files need at least two rows. Values are written with 17 significant
digits, which round-trips float64 bit-exactly; the inferred rate is exact to
the precision the time column can encode (~1e-12 relative).

Writes are atomic: output lands in a temporary file that is renamed into
place only on success, so failures never leave partial files behind.
"""

from __future__ import annotations

import os
import tempfile
from contextlib import contextmanager

import numpy as np

from .errors import ParseError, ValidationError
from .recording import Recording

__all__ = ["atomic_output", "read_recording", "write_recording"]

_MAX_RELATIVE_JITTER = 1e-6


def read_recording(path) -> Recording:
    """Parse a recording CSV, validating the full file contract.

    Any failure to open or parse the file raises :class:`ParseError`;
    malformed content is reported with its line number.
    """
    path = os.fspath(path)
    try:
        fh = open(path, "r", encoding="utf-8", newline="")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror or exc}") from exc
    with fh:
        header = fh.readline()
        if header == "":
            raise ParseError(f"{path}: empty file")
        labels = _parse_header(path, header)
        try:
            data = np.loadtxt(fh, delimiter=",", comments=None, ndmin=2)
        except ValueError as exc:
            _raise_located_body_error(path, len(labels), exc)

    if data.shape[0] < 2:
        raise ParseError(f"{path}: need at least 2 data rows to infer the sampling rate")
    if data.shape[1] != len(labels) + 1:
        raise ParseError(
            f"{path}, line 2: rows have {data.shape[1]} values but the header "
            f"names {len(labels) + 1} columns"
        )
    bad = np.argwhere(~np.isfinite(data))
    if bad.size:
        row, col = bad[0]
        name = "time" if col == 0 else labels[col - 1]
        raise ParseError(f"{path}, line {row + 2}: non-finite value in column '{name}'")

    times = data[:, 0]
    deltas = np.diff(times)
    nonpos = np.flatnonzero(deltas <= 0)
    if nonpos.size:
        raise ParseError(f"{path}, line {nonpos[0] + 3}: time column is not strictly increasing")
    median_delta = float(np.median(deltas))
    jitter = np.abs(deltas - median_delta)
    jittery = np.flatnonzero(jitter > _MAX_RELATIVE_JITTER * median_delta)
    if jittery.size:
        raise ParseError(
            f"{path}, line {jittery[0] + 3}: non-uniform sample spacing "
            f"({deltas[jittery[0]]:.9g} s vs median {median_delta:.9g} s)"
        )
    return Recording(data[:, 1:], labels, 1.0 / median_delta)


def write_recording(rec: Recording, path) -> None:
    """Write a recording to CSV atomically; see the module contract."""
    if not isinstance(rec, Recording):
        raise ValidationError("write_recording takes a Recording")
    if rec.n_samples < 2:
        raise ValidationError(
            "need at least 2 samples to encode the sampling rate in the time column"
        )
    times = np.arange(rec.n_samples, dtype=np.float64) / rec.sampling_rate_hz
    body = np.column_stack([times, rec.samples])
    with atomic_output(path) as fh:
        fh.write("time," + ",".join(rec.channel_labels) + "\n")
        np.savetxt(fh, body, delimiter=",", fmt="%.17g")


@contextmanager
def atomic_output(path):
    """Open a temp file that replaces ``path`` only if the body completes.

    The final file honors the process umask; on any failure the temp file is
    removed and nothing is left at ``path``.
    """
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".icanclean-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            yield fh
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp_path, 0o666 & ~umask)
        os.replace(tmp_path, path)
    except BaseException:
        try:
            os.unlink(tmp_path)
        except OSError:
            pass
        raise


def _parse_header(path, header):
    names = [c.strip() for c in header.rstrip("\r\n").split(",")]
    if len(names) < 2 or names[0] != "time":
        raise ParseError(f"{path}, line 1: header must be 'time,<label1>,...,<labelN>'")
    labels = names[1:]
    seen = set()
    for label in labels:
        if label == "":
            raise ParseError(f"{path}, line 1: empty channel label")
        if label in seen:
            raise ParseError(f"{path}, line 1: duplicate channel label '{label}'")
        seen.add(label)
    return tuple(labels)


def _raise_located_body_error(path, n_labels, original):
    """Re-scan a file loadtxt rejected to report the offending line and cell."""
    expected = n_labels + 1
    with open(path, "r", encoding="utf-8", newline="") as fh:
        fh.readline()
        for lineno, line in enumerate(fh, start=2):
            stripped = line.strip()
            if stripped == "":
                continue
            cells = stripped.split(",")
            if len(cells) != expected:
                raise ParseError(
                    f"{path}, line {lineno}: row has {len(cells)} values, expected {expected}"
                )
            for col, cell in enumerate(cells):
                try:
                    float(cell)
                except ValueError:
                    raise ParseError(
                        f"{path}, line {lineno}: non-numeric value '{cell.strip()}' in column {col + 1}"
                    ) from None
    raise ParseError(f"{path}: malformed data: {original}")
