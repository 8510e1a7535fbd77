"""CSV contract: round trips, validation, error reporting, atomic writes."""

import math

import numpy as np
import pytest

from icanclean import (
    ParseError,
    Recording,
    ValidationError,
    read_recording,
    write_recording,
)
from icanclean.io import atomic_output


def make_recording(samples, rate=500.0):
    labels = tuple(f"c{i + 1}" for i in range(samples.shape[1]))
    return Recording(samples, labels, rate)


def test_small_wellformed_file_parses(tmp_path):
    path = tmp_path / "r.csv"
    path.write_text(
        "time,left,right\n"
        "0.000,1.5,2.5\n"
        "0.004,-1.0,0.25\n"
        "0.008,3.25,-0.5\n"
    )
    rec = read_recording(path)
    assert rec.n_samples == 3
    assert rec.n_channels == 2
    assert rec.channel_labels == ("left", "right")
    assert math.isclose(rec.sampling_rate_hz, 250.0, rel_tol=1e-9)
    np.testing.assert_array_equal(rec.samples, [[1.5, 2.5], [-1.0, 0.25], [3.25, -0.5]])


def test_round_trip_is_exact(tmp_path):
    rng = np.random.default_rng(0)
    rec = make_recording(rng.standard_normal((50, 4)) * 1e3, rate=512.0)
    path = tmp_path / "rt.csv"
    write_recording(rec, path)
    back = read_recording(path)
    assert np.array_equal(back.samples, rec.samples)
    assert back.channel_labels == rec.channel_labels
    assert math.isclose(back.sampling_rate_hz, rec.sampling_rate_hz, rel_tol=1e-12)


def test_round_trip_extreme_values(tmp_path):
    samples = np.array(
        [
            [1e300, -1e-300, 5e-324],
            [-1.7976931348623157e308, 2.2250738585072014e-308, 0.0],
            [math.pi, -0.0, 1.0 + 2**-52],
        ]
    )
    rec = make_recording(samples, rate=100.0)
    path = tmp_path / "x.csv"
    write_recording(rec, path)
    assert np.array_equal(read_recording(path).samples, samples)


def test_round_trip_100k_rows_bit_exact(tmp_path):
    rng = np.random.default_rng(7)
    rec = make_recording(rng.standard_normal((100_000, 3)), rate=500.0)
    path = tmp_path / "big.csv"
    write_recording(rec, path)
    back = read_recording(path)
    assert np.array_equal(back.samples, rec.samples)
    assert math.isclose(back.sampling_rate_hz, 500.0, rel_tol=1e-12)


def test_round_trip_non_integer_rate(tmp_path):
    rec = make_recording(np.arange(20.0).reshape(10, 2), rate=333.25)
    path = tmp_path / "odd.csv"
    write_recording(rec, path)
    assert math.isclose(read_recording(path).sampling_rate_hz, 333.25, rel_tol=1e-12)


def test_nan_cell_reports_line(tmp_path):
    path = tmp_path / "nan.csv"
    path.write_text("time,a\n0.0,1.0\n0.002,nan\n0.004,2.0\n")
    with pytest.raises(ParseError, match="line 3"):
        read_recording(path)


def test_non_numeric_cell_reports_line_and_value(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("time,a,b\n0.0,1.0,2.0\n0.002,oops,2.0\n")
    with pytest.raises(ParseError, match=r"line 3.*oops"):
        read_recording(path)


def test_wrong_field_count_reports_line(tmp_path):
    path = tmp_path / "ragged.csv"
    path.write_text("time,a,b\n0.0,1.0,2.0\n0.002,1.0\n")
    with pytest.raises(ParseError, match="line 3"):
        read_recording(path)


def test_malformed_header_rejected(tmp_path):
    path = tmp_path / "h.csv"
    path.write_text("a,b\n0.0,1.0\n0.002,1.5\n")
    with pytest.raises(ParseError, match="line 1"):
        read_recording(path)


def test_duplicate_labels_rejected(tmp_path):
    path = tmp_path / "dup.csv"
    path.write_text("time,a,a\n0.0,1.0,2.0\n0.002,1.5,2.5\n")
    with pytest.raises(ParseError, match="duplicate"):
        read_recording(path)


def test_empty_label_rejected(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("time,a,\n0.0,1.0,2.0\n0.002,1.5,2.5\n")
    with pytest.raises(ParseError, match="empty channel label"):
        read_recording(path)


def test_time_must_increase(tmp_path):
    path = tmp_path / "t.csv"
    path.write_text("time,a\n0.0,1.0\n0.004,2.0\n0.002,3.0\n")
    with pytest.raises(ParseError, match="increasing"):
        read_recording(path)


def test_jittery_time_rejected(tmp_path):
    path = tmp_path / "j.csv"
    path.write_text("time,a\n0.0,1.0\n0.002,2.0\n0.0041,3.0\n0.0061,4.0\n")
    with pytest.raises(ParseError, match="non-uniform"):
        read_recording(path)


def test_single_data_row_rejected(tmp_path):
    path = tmp_path / "one.csv"
    path.write_text("time,a\n0.0,1.0\n")
    with pytest.raises(ParseError, match="sampling rate"):
        read_recording(path)


def test_missing_file_raises_parse_error():
    with pytest.raises(ParseError, match="cannot read"):
        read_recording("/nonexistent/место/file.csv")


def test_empty_file_rejected(tmp_path):
    path = tmp_path / "void.csv"
    path.write_text("")
    with pytest.raises(ParseError, match="empty file"):
        read_recording(path)


def test_write_single_sample_recording_rejected(tmp_path):
    rec = make_recording(np.ones((1, 2)))
    with pytest.raises(ValidationError, match="at least 2 samples"):
        write_recording(rec, tmp_path / "one.csv")


def test_write_to_missing_directory_raises_oserror(tmp_path):
    rec = make_recording(np.ones((4, 2)))
    with pytest.raises(OSError):
        write_recording(rec, tmp_path / "no" / "such" / "dir.csv")


def test_failed_write_leaves_no_file(tmp_path):
    target = tmp_path / "out.csv"
    with pytest.raises(RuntimeError):
        with atomic_output(target) as fh:
            fh.write("partial")
            raise RuntimeError("boom")
    assert not target.exists()
    assert list(tmp_path.iterdir()) == []


def test_write_replaces_existing_file_atomically(tmp_path):
    target = tmp_path / "out.csv"
    target.write_text("old contents")
    rec = make_recording(np.ones((3, 1)))
    write_recording(rec, target)
    assert read_recording(target).n_samples == 3


def test_recording_validation():
    with pytest.raises(ValidationError):
        Recording(np.ones((3, 2)), ("a",), 500.0)  # label count mismatch
    with pytest.raises(ValidationError):
        Recording(np.ones((3, 2)), ("a", "a"), 500.0)  # duplicate
    with pytest.raises(ValidationError):
        Recording(np.ones((3, 2)), ("a", "b,c"), 500.0)  # comma in label
    with pytest.raises(ValidationError):
        Recording(np.ones((3, 2)), ("a", "b"), 0.0)  # bad rate
    bad = np.ones((3, 2))
    bad[1, 0] = np.inf
    with pytest.raises(ValidationError):
        Recording(bad, ("a", "b"), 500.0)
