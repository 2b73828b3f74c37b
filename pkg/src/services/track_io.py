"""
Trajectory Supervisor - Track File Service

Reads and writes track CSV files: one row per reference-line sample,
``s;x;y;n_left;n_right`` with an optional sixth ``mu`` column, header
row required, semicolon separated, ``.`` as decimal point.
"""

import logging
from csv import DictReader, Error as CSVError
from pathlib import Path

import numpy as np

from src.models.track import TrackMap
from src.utils.helpers import format_float

logger = logging.getLogger(__name__)

REQUIRED_COLUMNS = ("s", "x", "y", "n_left", "n_right")
OPTIONAL_COLUMNS = ("mu",)
DELIMITER = ";"


class TrackFormatError(Exception):
    """
    Raised for malformed track files.
    """

    def __init__(self, message: str, line: int | None = None, field: str | None = None) -> None:
        """
        Initialize track format error.

        Args:
            message: Error message
            line: 1-based line number of the offending row
            field: Offending column name
        """
        self.message = message
        self.line = line
        self.field = field
        location = f" (line {line}" + (f", field '{field}'" if field else "") + ")" if line else ""
        super().__init__(f"{self.message}{location}")


def infer_closed(reference: np.ndarray) -> bool:
    """
    Guess whether a reference line forms a circuit.

    The line is closed when its last sample lies closer to the first than
    two median sample spacings.
    """
    if reference.shape[0] < 3:
        return False
    spacing = np.hypot(*np.diff(reference, axis=0).T)
    gap = float(np.hypot(*(reference[0] - reference[-1])))
    return gap < 2.0 * float(np.median(spacing))


def read_track_csv(
    file_path: str | Path,
    closed: bool | None = None,
    encoding: str = "utf-8",
) -> TrackMap:
    """
    Parse a track CSV file.

    Args:
        file_path: Path to the track file
        closed: Circuit flag; inferred from the geometry when None
        encoding: File encoding

    Returns:
        Track map with reconstructed bounds

    Raises:
        FileNotFoundError: If the file doesn't exist
        TrackFormatError: If the header, a value or the geometry is invalid
    """
    file_path = Path(file_path)
    if not file_path.exists():
        raise FileNotFoundError(f"Track file not found: {file_path}")

    rows: list[list[float]] = []
    try:
        with open(file_path, "r", encoding=encoding, newline="") as f:
            reader = DictReader(f, delimiter=DELIMITER, skipinitialspace=True)
            header = [name.strip() for name in (reader.fieldnames or [])]
            missing = [c for c in REQUIRED_COLUMNS if c not in header]
            if missing:
                raise TrackFormatError(
                    f"Track header must contain {';'.join(REQUIRED_COLUMNS)}; missing {', '.join(missing)}",
                    line=1,
                )
            unknown = [c for c in header if c not in REQUIRED_COLUMNS + OPTIONAL_COLUMNS]
            if unknown:
                raise TrackFormatError(f"Unknown track column(s): {', '.join(unknown)}", line=1)
            reader.fieldnames = header
            columns = [c for c in REQUIRED_COLUMNS + OPTIONAL_COLUMNS if c in header]

            for row_dict in reader:
                line = reader.line_num
                if all((v or "").strip() == "" for k, v in row_dict.items() if k is not None):
                    continue
                if None in row_dict:
                    raise TrackFormatError("Too many values in row", line=line)
                row: list[float] = []
                for column in columns:
                    text = (row_dict.get(column) or "").strip()
                    try:
                        value = float(text)
                    except ValueError:
                        raise TrackFormatError(f"Not a number: {text!r}", line=line, field=column)
                    if not np.isfinite(value):
                        raise TrackFormatError(f"Non-finite value: {text!r}", line=line, field=column)
                    row.append(value)
                rows.append(row)
    except UnicodeDecodeError as e:
        raise TrackFormatError(f"Failed to read track file with encoding '{encoding}': {e}") from e
    except CSVError as e:
        raise TrackFormatError(f"Invalid track CSV: {e}") from e

    if len(rows) < 2:
        raise TrackFormatError("Track needs at least two reference samples")

    table = np.asarray(rows, dtype=float)
    reference = table[:, 1:3]
    if closed is None:
        closed = infer_closed(reference)
    if closed and np.hypot(*(reference[0] - reference[-1])) < 1e-9:
        # Explicitly repeated start sample.
        table = table[:-1]
        reference = table[:, 1:3]

    try:
        track = TrackMap(
            s=np.ascontiguousarray(table[:, 0]),
            reference=np.ascontiguousarray(reference),
            width_left=np.ascontiguousarray(table[:, 3]),
            width_right=np.ascontiguousarray(table[:, 4]),
            closed=bool(closed),
            mu=np.ascontiguousarray(table[:, 5]) if table.shape[1] > 5 else None,
            name=file_path.stem,
        )
    except ValueError as e:
        raise TrackFormatError(str(e)) from e

    logger.info(
        f"Loaded track {track.name}: {table.shape[0]} samples, "
        f"{track.total_length:.1f} m, {'closed' if track.closed else 'open'}"
    )
    return track


def write_track_csv(track: TrackMap, file_path: str | Path) -> Path:
    """
    Write a track map as CSV.

    Args:
        track: Track to export
        file_path: Destination path

    Returns:
        The written path
    """
    file_path = Path(file_path)
    file_path.parent.mkdir(parents=True, exist_ok=True)

    header = list(REQUIRED_COLUMNS) + (["mu"] if track.mu is not None else [])
    columns = [track.s, track.reference[:, 0], track.reference[:, 1], track.width_left, track.width_right]
    if track.mu is not None:
        columns.append(track.mu)

    lines = [DELIMITER.join(header)]
    for row in np.column_stack(columns).tolist():
        lines.append(DELIMITER.join(format_float(v) for v in row))
    file_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return file_path
