"""
Track map model.

A track is described by a reference line sampled at increasing arc length
plus the lateral distances to the left and right bounds. Bounds are
reconstructed along the reference-line normals.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import shapely
from pydantic import BaseModel, ConfigDict


class FrenetPosition(BaseModel):
    """
    Track-relative coordinates.

    Attributes:
        s: Arc length along the reference line [m]
        n: Signed lateral offset, left positive [m]
    """

    s: float
    n: float

    model_config = ConfigDict(frozen=True)


@dataclass(frozen=True, eq=False)
class TrackMap:
    """
    Reference line with left/right bounds.

    Attributes:
        s: Cumulative arc length of every reference sample [m]
        reference: Reference-line samples, shape (K, 2) [m]
        width_left: Distance to the left bound per sample [m]
        width_right: Distance to the right bound per sample [m]
        closed: True for a circuit (reference line wraps around)
        mu: Optional friction coefficient per sample
        name: Label used in logs and exported file names
    """

    s: np.ndarray
    reference: np.ndarray
    width_left: np.ndarray
    width_right: np.ndarray
    closed: bool = False
    mu: np.ndarray | None = None
    name: str = field(default="track")

    def __post_init__(self) -> None:
        k = self.s.shape[0]
        if k < 2:
            raise ValueError("Track needs at least two reference samples")
        if self.reference.shape != (k, 2):
            raise ValueError("Reference line must have shape (K, 2)")
        if self.width_left.shape != (k,) or self.width_right.shape != (k,):
            raise ValueError("Bound widths must have one value per reference sample")
        if np.any(np.diff(self.s) <= 0):
            raise ValueError("Reference line arc length must be strictly increasing")
        if np.any(self.width_left <= 0) or np.any(self.width_right <= 0):
            raise ValueError("Every reference point must lie strictly between the bounds")
        if self.mu is not None and (self.mu.shape != (k,) or np.any(self.mu <= 0)):
            raise ValueError("Friction profile must be positive with one value per sample")
        if not shapely.is_simple(self.bounds.geoms).all():
            raise ValueError("Track bounds must not self-intersect")

    @cached_property
    def closing_length(self) -> float:
        """Length of the segment joining the last sample back to the first."""
        if not self.closed:
            return 0.0
        return float(np.hypot(*(self.reference[0] - self.reference[-1])))

    @cached_property
    def total_length(self) -> float:
        return float(self.s[-1] + self.closing_length)

    @cached_property
    def segment_start(self) -> np.ndarray:
        """Start points of all reference segments, shape (M, 2)."""
        return self.reference if self.closed else self.reference[:-1]

    @cached_property
    def segment_end(self) -> np.ndarray:
        if self.closed:
            return np.roll(self.reference, -1, axis=0)
        return self.reference[1:]

    @cached_property
    def segment_s(self) -> np.ndarray:
        """Arc length at the start of every segment."""
        return self.s if self.closed else self.s[:-1]

    @cached_property
    def segment_ds(self) -> np.ndarray:
        """Arc length covered by every segment."""
        ds = np.diff(self.s)
        if self.closed:
            ds = np.append(ds, self.closing_length)
        return ds

    @cached_property
    def segment_heading(self) -> np.ndarray:
        d = self.segment_end - self.segment_start
        return np.arctan2(d[:, 1], d[:, 0])

    @cached_property
    def normals(self) -> np.ndarray:
        """Unit left normals at every reference sample, shape (K, 2)."""
        if self.closed:
            tangent = np.roll(self.reference, -1, axis=0) - np.roll(self.reference, 1, axis=0)
        else:
            tangent = np.gradient(self.reference, axis=0)
        tangent /= np.linalg.norm(tangent, axis=1, keepdims=True)
        return np.column_stack((-tangent[:, 1], tangent[:, 0]))

    @cached_property
    def bound_left(self) -> np.ndarray:
        return self.reference + self.width_left[:, None] * self.normals

    @cached_property
    def bound_right(self) -> np.ndarray:
        return self.reference - self.width_right[:, None] * self.normals

    @cached_property
    def bounds(self) -> shapely.MultiLineString:
        """Both bound polylines (rings for closed tracks)."""
        if self.closed:
            lines = [
                np.vstack((self.bound_left, self.bound_left[:1])),
                np.vstack((self.bound_right, self.bound_right[:1])),
            ]
        else:
            lines = [self.bound_left, self.bound_right]
        bounds = shapely.MultiLineString(lines)
        shapely.prepare(bounds)
        return bounds

    @cached_property
    def reference_tree(self) -> shapely.STRtree:
        """Spatial index over the reference segments, in segment order."""
        return shapely.STRtree(shapely.linestrings(np.stack((self.segment_start, self.segment_end), axis=1)))

    @cached_property
    def bound_tree(self) -> shapely.STRtree:
        """Spatial index over the individual bound segments."""
        segments = [
            np.stack((line[:-1], line[1:]), axis=1)
            for line in (shapely.get_coordinates(geom) for geom in self.bounds.geoms)
        ]
        return shapely.STRtree(shapely.linestrings(np.concatenate(segments)))

    @cached_property
    def corridor(self) -> shapely.Polygon:
        """Drivable area enclosed by the bounds."""
        if self.closed:
            left = shapely.Polygon(self.bound_left)
            right = shapely.Polygon(self.bound_right)
            outer, inner = (left, right) if left.area > right.area else (right, left)
            corridor = shapely.Polygon(outer.exterior.coords, [inner.exterior.coords])
        else:
            corridor = shapely.Polygon(np.vstack((self.bound_left, self.bound_right[::-1])))
        shapely.prepare(corridor)
        return corridor

    def wrap_s(self, s: np.ndarray | float) -> np.ndarray:
        """Map arc length into [0, total_length) on closed tracks."""
        s = np.asarray(s, dtype=float)
        return np.mod(s, self.total_length) if self.closed else s

    def to_cartesian(self, s: np.ndarray | float, n: np.ndarray | float) -> np.ndarray:
        """
        Reconstruct Cartesian points from Frenet coordinates.

        Args:
            s: Arc length(s) [m]
            n: Lateral offset(s), left positive [m]

        Returns:
            Array of shape (..., 2)
        """
        s = self.wrap_s(s)
        n = np.asarray(n, dtype=float)
        idx = np.clip(np.searchsorted(self.segment_s, s, side="right") - 1, 0, len(self.segment_s) - 1)
        frac = (s - self.segment_s[idx]) / self.segment_ds[idx]
        start = self.segment_start[idx]
        end = self.segment_end[idx]
        base = start + frac[..., None] * (end - start)
        heading = self.segment_heading[idx]
        normal = np.stack((-np.sin(heading), np.cos(heading)), axis=-1)
        return base + n[..., None] * normal

    def mu_at(self, s: np.ndarray | float) -> np.ndarray | None:
        """Friction coefficient along the track, or None without a profile."""
        if self.mu is None:
            return None
        if self.closed:
            return np.interp(self.wrap_s(s), self.s, self.mu, period=self.total_length)
        return np.interp(s, self.s, self.mu)
