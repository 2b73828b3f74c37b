"""
Trajectory Supervisor - Scenario File Service

Reads and writes scenario files. A scenario file is UTF-8 text made of a
header and frame records separated by a ``---`` line::

    # comment
    name = cut_off
    track = tracks/straight.csv
    expected = fire-in-envelope
    vehicle.a_brake_max = 10.0
    vehicle.a_accel_engine = 0.0:12.0|30.0:9.0|90.0:3.0
    rules.v_max = none
    ---
    t_abs; ego_x; ego_y; ego_psi; mu[|mu...]; objects=[id,x,y,psi,v,len,wid[,a_brake,a_accel];...]; driving=[t,x,y,psi,kappa,v,ax|...]; emergency=[...]

Header keys: ``name``, ``description``, ``track``, ``track.closed``,
``expected`` (``no-fire``, ``fire-in-envelope``, ``fire:<check>``),
``envelope`` (``t_earliest,t_latest``) and the parameter key space
``vehicle.*``, ``rss.*``, ``rules.*``, ``supervisor.*``. ``none`` disables
an optional value. ``mu`` is one track-wide value or one value per
trajectory point joined by ``|``.

The writer produces a canonical form: every header key in a fixed order,
defaults included, and numbers in shortest round-trip notation. Loading
any file and writing it back yields that canonical text, so
``write(load(f)) == f`` holds for canonical files and ``load(write(s))``
equals ``s`` for every scenario. Hand-authored files are normalised, not
reproduced: comments, key order and omitted defaults are not preserved.
"""

import logging
import os
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from src.config.settings import settings
from src.models.safety import RssParameters, RuleSet
from src.models.scenario import Expectation, SafetyEnvelope, Scenario, ScenarioFrame
from src.models.trajectory import Trajectory, TrajectoryKind, TrajectoryPoint
from src.models.vehicle import ObjectState, Pose, VehicleParameters
from src.models.verdict import PerceptionSnapshot, SupervisorConfig
from src.services.track_io import read_track_csv
from src.utils.helpers import format_float, parse_bool, parse_key_value

logger = logging.getLogger(__name__)

SCENARIO_SUFFIX = ".scenario"
SEPARATOR = "---"
PARAMETER_SECTIONS: dict[str, type] = {
    "vehicle": VehicleParameters,
    "rss": RssParameters,
    "rules": RuleSet,
    "supervisor": SupervisorConfig,
}
FRAME_FIELDS = ("t_abs", "ego_x", "ego_y", "ego_psi", "mu")
TRAJECTORY_FIELDS = ("t", "x", "y", "psi", "kappa", "v", "ax")
# Delimiters of the frame grammar; object ids cannot contain them.
OBJECT_ID_RESERVED = ",;|[]"


class ScenarioParseError(Exception):
    """
    Raised when a scenario file does not follow the format.
    """

    def __init__(self, message: str, line: int | None = None, field: str | None = None) -> None:
        """
        Initialize scenario parse error.

        Args:
            message: Error message
            line: 1-based line number
            field: Offending key or field
        """
        self.message = message
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(f"{self.message}{suffix}")


class ScenarioValidationError(Exception):
    """
    Raised when a parsed scenario breaks a scenario invariant.
    """

    def __init__(self, message: str, frame: int | None = None) -> None:
        """
        Initialize scenario validation error.

        Args:
            message: Error message
            frame: 0-based index of the offending frame
        """
        self.message = message
        self.frame = frame
        suffix = f" (frame {frame})" if frame is not None else ""
        super().__init__(f"{self.message}{suffix}")


def split_outside_brackets(text: str, delimiter: str = ";") -> list[str]:
    """Split on a delimiter, ignoring delimiters inside ``[...]``."""
    parts: list[str] = []
    depth = 0
    current: list[str] = []
    for char in text:
        if char == "[":
            depth += 1
        elif char == "]":
            depth -= 1
        if char == delimiter and depth == 0:
            parts.append("".join(current).strip())
            current = []
        else:
            current.append(char)
    parts.append("".join(current).strip())
    return parts


def _parse_float(text: str, line: int, field: str) -> float:
    try:
        return float(text.strip())
    except ValueError:
        raise ScenarioParseError(f"Not a number: {text.strip()!r}", line=line, field=field)


def _parse_mu(text: str, line: int) -> float | tuple[float, ...]:
    values = tuple(_parse_float(value, line, "mu") for value in text.split("|"))
    return values[0] if len(values) == 1 else values


def _parse_engine_curve(text: str) -> tuple[tuple[float, float], ...]:
    breakpoints = []
    for pair in text.split("|"):
        v, sep, a = pair.partition(":")
        if not sep:
            raise ValueError(f"Engine breakpoint must be v:a, got {pair!r}")
        breakpoints.append((float(v), float(a)))
    return tuple(breakpoints)


def _header_value(section: str, key: str, text: str) -> Any:
    """Convert header text for pydantic (which coerces the remaining strings)."""
    if text.lower() == "none":
        return None
    if section == "vehicle" and key == "a_accel_engine":
        return _parse_engine_curve(text)
    return text


def _bracket_body(text: str, name: str, line: int) -> str:
    prefix = f"{name}="
    compact = text.replace(" ", "")
    if not compact.startswith(prefix + "[") or not compact.endswith("]"):
        raise ScenarioParseError(f"Expected {name}=[...]", line=line, field=name)
    return compact[len(prefix) + 1 : -1]


def _parse_objects(body: str, line: int) -> tuple[ObjectState, ...]:
    objects = []
    for entry in filter(None, (e.strip() for e in body.split(";"))):
        values = entry.split(",")
        if len(values) not in (7, 9):
            raise ScenarioParseError(
                f"Object needs 7 or 9 values, got {len(values)}", line=line, field="objects"
            )
        numbers = [_parse_float(v, line, "objects") for v in values[1:7]]
        extra: dict[str, float | None] = {}
        if len(values) == 9:
            for key, text in zip(("a_brake_max", "a_accel_max"), values[7:]):
                extra[key] = None if text.lower() == "none" else _parse_float(text, line, "objects")
        try:
            objects.append(
                ObjectState(
                    id=values[0],
                    x=numbers[0],
                    y=numbers[1],
                    psi=numbers[2],
                    v=numbers[3],
                    length=numbers[4],
                    width=numbers[5],
                    **extra,
                )
            )
        except ValidationError as e:
            raise ScenarioParseError(f"Invalid object: {e.errors()[0]['msg']}", line=line, field="objects")
    return tuple(objects)


def _parse_trajectory(body: str, kind: TrajectoryKind, line: int) -> Trajectory:
    points = []
    for entry in filter(None, (e.strip() for e in body.split("|"))):
        values = entry.split(",")
        if len(values) != len(TRAJECTORY_FIELDS):
            raise ScenarioParseError(
                f"Trajectory point needs {len(TRAJECTORY_FIELDS)} values, got {len(values)}",
                line=line,
                field=kind.value,
            )
        numbers = [_parse_float(v, line, kind.value) for v in values]
        points.append(TrajectoryPoint(**dict(zip(TRAJECTORY_FIELDS, numbers))))
    return Trajectory(points=tuple(points), kind=kind)


def parse_frame(text: str, line: int) -> ScenarioFrame:
    """
    Parse one frame record.

    Raises:
        ScenarioParseError: If the record is malformed
    """
    parts = split_outside_brackets(text)
    if len(parts) != len(FRAME_FIELDS) + 3:
        raise ScenarioParseError(
            f"Frame record needs {len(FRAME_FIELDS) + 3} fields, got {len(parts)}", line=line
        )
    t_abs, ego_x, ego_y, ego_psi = (
        _parse_float(value, line, name) for value, name in zip(parts, FRAME_FIELDS[:4])
    )
    mu = _parse_mu(parts[4], line)
    objects = _parse_objects(_bracket_body(parts[5], "objects", line), line)
    driving = _parse_trajectory(_bracket_body(parts[6], "driving", line), TrajectoryKind.DRIVING, line)
    emergency = _parse_trajectory(
        _bracket_body(parts[7], "emergency", line), TrajectoryKind.EMERGENCY, line
    )
    try:
        snapshot = PerceptionSnapshot(
            t_abs=t_abs, ego_pose=Pose(x=ego_x, y=ego_y, psi=ego_psi), objects=objects, mu=mu
        )
    except ValidationError as e:
        raise ScenarioParseError(f"Invalid snapshot: {e.errors()[0]['msg']}", line=line, field="mu")
    return ScenarioFrame(t_abs=t_abs, snapshot=snapshot, driving=driving, emergency=emergency)


def resolve_track_path(track: str, scenario_dir: Path) -> Path:
    """
    Locate a track file: relative to the scenario, then under ``SUPERVISOR_SCENARIO_PATH``.

    Raises:
        FileNotFoundError: If the track exists in neither place
    """
    candidates = [scenario_dir / track]
    if settings.scenario_path:
        candidates.append(Path(settings.scenario_path) / track)
    for candidate in candidates:
        if candidate.exists():
            return candidate
    raise FileNotFoundError(f"Track file not found: {track}")


def resolve_scenario_path(path: str | Path) -> Path:
    """
    Locate a scenario file, falling back to ``SUPERVISOR_SCENARIO_PATH``.

    Raises:
        FileNotFoundError: If the scenario cannot be found
    """
    path = Path(path)
    if path.exists():
        return path
    if settings.scenario_path and not path.is_absolute():
        candidate = Path(settings.scenario_path) / path
        if candidate.exists():
            return candidate
    raise FileNotFoundError(f"Scenario file not found: {path}")


def _build_section(section: str, values: dict[str, Any], lines: dict[str, int | None]) -> Any:
    try:
        return PARAMETER_SECTIONS[section](**values)
    except (ValidationError, TypeError) as e:
        if isinstance(e, ValidationError):
            error = e.errors()[0]
            key = str(error["loc"][0]) if error["loc"] else None
            message = error["msg"]
        else:
            key, message = None, str(e)
        full_key = f"{section}.{key}" if key else section
        raise ScenarioParseError(
            f"Invalid {section} parameter: {message}", line=lines.get(full_key), field=full_key
        )


def load_scenario(
    path: str | Path,
    overrides: dict[str, str] | None = None,
) -> Scenario:
    """
    Load and validate a scenario file.

    Args:
        path: Scenario file path (also looked up under ``SUPERVISOR_SCENARIO_PATH``)
        overrides: Parameter overrides (``vehicle.*``, ``rss.*``, ``rules.*``, ``supervisor.*``)

    Returns:
        Fully validated scenario with its track resolved

    Raises:
        FileNotFoundError: If the scenario or its track cannot be found
        ScenarioParseError: If the file does not follow the format
        ScenarioValidationError: If a scenario invariant is broken
        TrackFormatError: If the track file is malformed
    """
    path = resolve_scenario_path(path)
    lines = path.read_text(encoding="utf-8").splitlines()

    header: dict[str, tuple[str, int | None]] = {}
    frame_start = None
    for number, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text or text.startswith("#"):
            continue
        if text == SEPARATOR:
            frame_start = number
            break
        try:
            key, value = parse_key_value(text)
        except ValueError as e:
            raise ScenarioParseError(str(e), line=number)
        if key in header:
            raise ScenarioParseError("Duplicate header key", line=number, field=key)
        header[key] = (value, number)
    if frame_start is None:
        raise ScenarioParseError(f"Missing '{SEPARATOR}' line between header and frames")

    for key, value in (overrides or {}).items():
        section = key.partition(".")[0]
        if section not in PARAMETER_SECTIONS or "." not in key:
            raise ScenarioParseError("Overrides must use vehicle./rss./rules./supervisor. keys", field=key)
        header[key] = (value, None)

    sections: dict[str, dict[str, Any]] = {name: {} for name in PARAMETER_SECTIONS}
    key_lines: dict[str, int | None] = {}
    scalars: dict[str, tuple[str, int | None]] = {}
    for key, (value, number) in header.items():
        section, dot, field = key.partition(".")
        key_lines[key] = number
        if dot and section in PARAMETER_SECTIONS:
            try:
                sections[section][field] = _header_value(section, field, value)
            except ValueError as e:
                raise ScenarioParseError(str(e), line=number, field=key)
        elif key in {"name", "description", "track", "track.closed", "expected", "envelope"}:
            scalars[key] = (value, number)
        else:
            raise ScenarioParseError("Unknown header key", line=number, field=key)

    for required in ("name", "track"):
        if required not in scalars:
            raise ScenarioParseError(f"Missing header key '{required}'", field=required)

    vehicle = _build_section("vehicle", sections["vehicle"], key_lines)
    rss = _build_section("rss", sections["rss"], key_lines)
    rules = _build_section("rules", sections["rules"], key_lines)
    supervisor = _build_section("supervisor", sections["supervisor"], key_lines)

    expected = Expectation.no_fire()
    if "expected" in scalars:
        value, number = scalars["expected"]
        try:
            expected = Expectation.parse(value)
        except (ValueError, ValidationError) as e:
            raise ScenarioParseError(f"Invalid expectation: {value!r}", line=number, field="expected") from e

    envelope = None
    if "envelope" in scalars:
        value, number = scalars["envelope"]
        bounds = [b.strip() for b in value.split(",")]
        if len(bounds) != 2:
            raise ScenarioParseError("Envelope must be t_earliest,t_latest", line=number, field="envelope")
        try:
            envelope = SafetyEnvelope(
                t_earliest=_parse_float(bounds[0], number, "envelope"),
                t_latest=_parse_float(bounds[1], number, "envelope"),
            )
        except ValidationError as e:
            raise ScenarioParseError(f"Invalid envelope: {e.errors()[0]['msg']}", line=number, field="envelope")

    closed = None
    if "track.closed" in scalars:
        value, number = scalars["track.closed"]
        try:
            closed = parse_bool(value)
        except ValueError as e:
            raise ScenarioParseError(str(e), line=number, field="track.closed")

    frames: list[ScenarioFrame] = []
    for number in range(frame_start + 1, len(lines) + 1):
        text = lines[number - 1].strip()
        if not text or text.startswith("#"):
            continue
        frames.append(parse_frame(text, number))

    validate_frames(frames)

    track_text = scalars["track"][0]
    track_file = resolve_track_path(track_text, path.parent)
    track = read_track_csv(track_file, closed=closed)

    scenario = Scenario(
        name=scalars["name"][0],
        description=scalars.get("description", (None, None))[0],
        track_path=track_text,
        track_source=str(track_file),
        track=track,
        vehicle=vehicle,
        rss=rss,
        rules=rules,
        supervisor=supervisor,
        frames=tuple(frames),
        expected=expected,
        envelope=envelope,
    )
    logger.info(f"Loaded scenario {scenario.name}: {len(frames)} frames, expected {expected}")
    return scenario


def validate_frames(frames: list[ScenarioFrame] | tuple[ScenarioFrame, ...]) -> None:
    """
    Check the scenario frame invariants.

    Raises:
        ScenarioValidationError: On an empty scenario, non-increasing timestamps
            or a frame without trajectory points
    """
    if not frames:
        raise ScenarioValidationError("Scenario has no frames")
    for index, frame in enumerate(frames):
        if index and not frame.t_abs > frames[index - 1].t_abs:
            raise ScenarioValidationError("Frame timestamps must be strictly increasing", frame=index)
        if not frame.driving.points or not frame.emergency.points:
            raise ScenarioValidationError("Frame must carry both trajectory candidates", frame=index)


def _format_value(value: Any) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_float(value)
    if isinstance(value, tuple):
        return "|".join(f"{format_float(v)}:{format_float(a)}" for v, a in value)
    return str(value)


def _format_object(obj: ObjectState) -> str:
    if any(c in obj.id for c in OBJECT_ID_RESERVED):
        raise ScenarioValidationError(f"Object id {obj.id!r} contains one of {OBJECT_ID_RESERVED!r}")
    values = [obj.id] + [format_float(v) for v in (obj.x, obj.y, obj.psi, obj.v, obj.length, obj.width)]
    if obj.a_brake_max is not None or obj.a_accel_max is not None:
        values += [_format_value(obj.a_brake_max), _format_value(obj.a_accel_max)]
    return ",".join(values)


def _format_trajectory(trajectory: Trajectory) -> str:
    return "|".join(
        ",".join(format_float(getattr(p, field)) for field in TRAJECTORY_FIELDS)
        for p in trajectory.points
    )


def format_frame(frame: ScenarioFrame) -> str:
    """Canonical text of one frame record."""
    pose = frame.snapshot.ego_pose
    fields = [format_float(v) for v in (frame.t_abs, pose.x, pose.y, pose.psi)]
    mu = frame.snapshot.mu
    fields.append("|".join(format_float(m) for m in mu) if isinstance(mu, tuple) else format_float(mu))
    fields.append(f"objects=[{';'.join(_format_object(o) for o in frame.snapshot.objects)}]")
    fields.append(f"driving=[{_format_trajectory(frame.driving)}]")
    fields.append(f"emergency=[{_format_trajectory(frame.emergency)}]")
    return "; ".join(fields)


def format_scenario(scenario: Scenario, track_path: str | None = None) -> str:
    """
    Canonical text of a scenario.

    Args:
        scenario: Scenario to format
        track_path: Track reference to write (defaults to the scenario's own)
    """
    lines = [f"name = {scenario.name}"]
    if scenario.description:
        lines.append(f"description = {scenario.description}")
    lines.append(f"track = {track_path or scenario.track_path}")
    lines.append(f"track.closed = {_format_value(scenario.track.closed)}")
    lines.append(f"expected = {scenario.expected}")
    if scenario.envelope is not None:
        lines.append(
            f"envelope = {format_float(scenario.envelope.t_earliest)},"
            f"{format_float(scenario.envelope.t_latest)}"
        )
    for section in PARAMETER_SECTIONS:
        model = getattr(scenario, section)
        for field in type(model).model_fields:
            lines.append(f"{section}.{field} = {_format_value(getattr(model, field))}")
    lines.append(SEPARATOR)
    lines.extend(format_frame(frame) for frame in scenario.frames)
    return "\n".join(lines) + "\n"


def write_scenario(scenario: Scenario, path: str | Path) -> Path:
    """
    Write a scenario file.

    The track reference is rewritten relative to the destination when the
    scenario knows its resolved track file.

    Args:
        scenario: Scenario to write
        path: Destination path

    Returns:
        The written path
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    track_path = scenario.track_path
    if scenario.track_source is not None:
        source = Path(scenario.track_source).resolve()
        track_path = Path(os.path.relpath(source, path.parent.resolve())).as_posix()
    path.write_text(format_scenario(scenario, track_path), encoding="utf-8")
    logger.info(f"Wrote scenario {scenario.name} to {path}")
    return path


__all__ = [
    "ScenarioParseError",
    "ScenarioValidationError",
    "format_scenario",
    "load_scenario",
    "parse_frame",
    "resolve_scenario_path",
    "validate_frames",
    "write_scenario",
]
