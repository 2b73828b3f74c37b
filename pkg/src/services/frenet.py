"""
Trajectory Supervisor - Frenet Projection Service

Projects Cartesian points onto the track reference line, giving arc length
s and signed lateral offset n (left positive).
"""

import logging
from dataclasses import dataclass
from threading import Lock
from weakref import WeakKeyDictionary

import numpy as np
import shapely

from src.config.settings import settings
from src.models.track import FrenetPosition, TrackMap

logger = logging.getLogger(__name__)


class OutOfCorridorError(Exception):
    """
    Raised when a point lies farther from the reference line than the corridor allows.
    """

    def __init__(self, message: str, point: tuple[float, float], distance: float) -> None:
        """
        Initialize out-of-corridor error.

        Args:
            message: Error message
            point: Offending Cartesian point
            distance: Distance to the reference line [m]
        """
        self.message = message
        self.point = point
        self.distance = distance
        super().__init__(self.message)


@dataclass(frozen=True)
class FrenetArrays:
    """Vectorised projection result."""

    s: np.ndarray
    n: np.ndarray
    heading: np.ndarray
    distance: np.ndarray


class FrenetProjector:
    """
    Closest-segment projector for one track.

    The nearest reference segment of every point is found through an
    R-tree over the segments, so the result does not depend on how evenly
    the reference line is sampled.
    """

    def __init__(self, track: TrackMap) -> None:
        """
        Initialize the projector.

        Args:
            track: Track whose reference line is projected onto
        """
        self._track = track
        self._tree = track.reference_tree

    @property
    def track(self) -> TrackMap:
        return self._track

    def project(self, points: np.ndarray, corridor_width: float | None = None) -> FrenetArrays:
        """
        Project Cartesian points.

        Args:
            points: Array of shape (N, 2)
            corridor_width: Maximum admissible distance to the reference line [m]

        Returns:
            Arc length, lateral offset, reference heading and distance per point

        Raises:
            ValueError: If a point is not finite
            OutOfCorridorError: If any point lies outside the corridor
        """
        track = self._track
        corridor_width = settings.corridor_width if corridor_width is None else corridor_width
        points = np.asarray(points, dtype=float).reshape(-1, 2)
        if not np.isfinite(points).all():
            raise ValueError("Cannot project non-finite points")

        hits, _ = self._tree.query_nearest(shapely.points(points), return_distance=True, all_matches=False)
        segment = np.empty(points.shape[0], dtype=int)
        segment[hits[0]] = hits[1]

        start = track.segment_start[segment]
        direction = track.segment_end[segment] - start
        rel = points - start
        seg_len_sq = np.einsum("nd,nd->n", direction, direction)
        frac = np.clip(np.einsum("nd,nd->n", rel, direction) / seg_len_sq, 0.0, 1.0)
        offset = rel - frac[:, None] * direction
        dist = np.hypot(offset[:, 0], offset[:, 1])
        cross = direction[:, 0] * rel[:, 1] - direction[:, 1] * rel[:, 0]

        too_far = dist > corridor_width
        if too_far.any():
            i = int(np.flatnonzero(too_far)[0])
            point = (float(points[i, 0]), float(points[i, 1]))
            raise OutOfCorridorError(
                f"Point {point} is {dist[i]:.2f} m from the reference line of {track.name} "
                f"(corridor {corridor_width} m)",
                point=point,
                distance=float(dist[i]),
            )

        s = track.wrap_s(track.segment_s[segment] + frac * track.segment_ds[segment])
        return FrenetArrays(
            s=s,
            n=np.sign(cross) * dist,
            heading=track.segment_heading[segment],
            distance=dist,
        )


_projectors: "WeakKeyDictionary[TrackMap, FrenetProjector]" = WeakKeyDictionary()
_projectors_lock = Lock()


def get_projector(track: TrackMap) -> FrenetProjector:
    """
    Get the shared projector of a track.

    Projectors are built once per track and released with it.
    """
    with _projectors_lock:
        projector = _projectors.get(track)
        if projector is None:
            logger.debug(f"Building Frenet projector for {track.name}")
            projector = FrenetProjector(track)
            _projectors[track] = projector
        return projector


def project_points(
    points: np.ndarray, track: TrackMap, corridor_width: float | None = None
) -> FrenetArrays:
    """Convenience wrapper projecting an (N, 2) array with the shared projector."""
    return get_projector(track).project(points, corridor_width)


def project_to_frenet(
    point: tuple[float, float], track: TrackMap, corridor_width: float | None = None
) -> FrenetPosition:
    """
    Project one Cartesian point.

    Args:
        point: (x, y) [m]
        track: Track map
        corridor_width: Maximum distance to the reference line (default from settings)

    Returns:
        Frenet position of the closest reference-line point

    Raises:
        OutOfCorridorError: If the point lies outside the corridor
    """
    result = project_points(np.asarray(point, dtype=float), track, corridor_width)
    return FrenetPosition(s=float(result.s[0]), n=float(result.n[0]))
