"""
Unit tests for the track file service.
"""

import numpy as np
import pytest

from src.services.track_io import TrackFormatError, infer_closed, read_track_csv, write_track_csv

HEADER = "s;x;y;n_left;n_right\n"


class TestReadTrack:
    """Test parsing track CSV files."""

    def test_read_open_track(self, tmp_path):
        """Test reading a simple open track."""
        path = tmp_path / "line.csv"
        path.write_text(HEADER + "0;0;0;3;3\n10;10;0;3;3\n20;20;0;3;4\n")

        track = read_track_csv(path)

        assert track.name == "line"
        assert not track.closed
        assert track.total_length == pytest.approx(20.0)
        np.testing.assert_allclose(track.width_right, [3.0, 3.0, 4.0])
        assert track.mu is None

    def test_read_mu_column(self, tmp_path):
        """Test the optional friction column."""
        path = tmp_path / "mu.csv"
        path.write_text("s;x;y;n_left;n_right;mu\n0;0;0;3;3;1.1\n10;10;0;3;3;0.9\n")
        track = read_track_csv(path)
        np.testing.assert_allclose(track.mu, [1.1, 0.9])

    def test_whitespace_and_blank_lines(self, tmp_path):
        """Test tolerance for spaces after delimiters and blank lines."""
        path = tmp_path / "spaced.csv"
        path.write_text("s; x; y; n_left; n_right\n0; 0; 0; 3; 3\n\n10; 10; 0; 3; 3\n")
        assert read_track_csv(path).s.shape == (2,)

    def test_missing_file(self, tmp_path):
        """Test that a missing file raises FileNotFoundError."""
        with pytest.raises(FileNotFoundError):
            read_track_csv(tmp_path / "nope.csv")

    def test_missing_column(self, tmp_path):
        """Test that the header must name all required columns."""
        path = tmp_path / "bad.csv"
        path.write_text("s;x;y;n_left\n0;0;0;3\n1;1;0;3\n")
        with pytest.raises(TrackFormatError) as exc_info:
            read_track_csv(path)
        assert exc_info.value.line == 1

    def test_not_a_number(self, tmp_path):
        """Test that the offending line and field are reported."""
        path = tmp_path / "bad.csv"
        path.write_text(HEADER + "0;0;0;3;3\n10;ten;0;3;3\n")
        with pytest.raises(TrackFormatError) as exc_info:
            read_track_csv(path)
        assert exc_info.value.line == 3
        assert exc_info.value.field == "x"

    def test_reference_outside_bounds(self, tmp_path):
        """Test that zero widths are rejected."""
        path = tmp_path / "bad.csv"
        path.write_text(HEADER + "0;0;0;3;0\n10;10;0;3;3\n")
        with pytest.raises(TrackFormatError):
            read_track_csv(path)

    def test_too_few_samples(self, tmp_path):
        """Test that one sample is not a track."""
        path = tmp_path / "short.csv"
        path.write_text(HEADER + "0;0;0;3;3\n")
        with pytest.raises(TrackFormatError):
            read_track_csv(path)


class TestClosedTracks:
    """Test circuit detection."""

    def test_infer_closed(self, circle):
        """Test that a sampled circle is detected as closed."""
        assert infer_closed(circle.reference)
        assert not infer_closed(np.array([[0.0, 0.0], [10.0, 0.0], [20.0, 0.0]]))

    def test_repeated_start_sample_dropped(self, tmp_path):
        """Test that an explicitly repeated start sample is removed."""
        path = tmp_path / "square.csv"
        path.write_text(
            HEADER + "0;0;0;1;1\n10;10;0;1;1\n20;10;10;1;1\n30;0;10;1;1\n40;0;0;1;1\n"
        )
        track = read_track_csv(path, closed=True)
        assert track.closed
        assert track.s.shape == (4,)
        assert track.total_length == pytest.approx(40.0)


class TestWriteTrack:
    """Test exporting tracks."""

    def test_round_trip(self, tmp_path, circle):
        """Test that a written track reads back identically."""
        path = write_track_csv(circle, tmp_path / "circle.csv")
        restored = read_track_csv(path, closed=True)
        np.testing.assert_array_equal(restored.reference, circle.reference)
        np.testing.assert_array_equal(restored.s, circle.s)
        assert restored.total_length == pytest.approx(circle.total_length)
