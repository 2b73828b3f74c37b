"""
Trajectory Supervisor - Footprint Geometry Service

Oriented vehicle footprints and their signed clearance to the track bounds.
All functions are vectorised over trajectory points with shapely 2 ufuncs.
"""

import logging
from typing import Literal

import numpy as np
import shapely

from src.models.track import TrackMap
from src.models.vehicle import Pose, VehicleParameters

logger = logging.getLogger(__name__)

# Clearance reported for a footprint that only touches a bound.
CONTACT_DEPTH = 1e-9

# Footprint corners in the body frame (x forward, y left), counter-clockwise.
_UNIT_CORNERS = np.array([[0.5, -0.5], [0.5, 0.5], [-0.5, 0.5], [-0.5, -0.5]])


def footprint_corners(
    x: np.ndarray | float,
    y: np.ndarray | float,
    psi: np.ndarray | float,
    length: float,
    width: float,
    center_offset: float = 0.0,
) -> np.ndarray:
    """
    Corners of oriented rectangles.

    Args:
        x, y, psi: Pose reference point(s) and heading(s)
        length: Rectangle length along the heading [m]
        width: Rectangle width [m]
        center_offset: Distance from the pose reference forward to the center [m]

    Returns:
        Array of shape (N, 4, 2), corners counter-clockwise
    """
    x, y, psi = np.broadcast_arrays(
        np.atleast_1d(np.asarray(x, dtype=float)),
        np.atleast_1d(np.asarray(y, dtype=float)),
        np.atleast_1d(np.asarray(psi, dtype=float)),
    )
    cos, sin = np.cos(psi), np.sin(psi)
    cx = x + center_offset * cos
    cy = y + center_offset * sin

    local = _UNIT_CORNERS * np.array([length, width])
    corners = np.empty(x.shape + (4, 2))
    corners[..., 0] = cx[:, None] + local[:, 0] * cos[:, None] - local[:, 1] * sin[:, None]
    corners[..., 1] = cy[:, None] + local[:, 0] * sin[:, None] + local[:, 1] * cos[:, None]
    return corners


def polygons_from_corners(corners: np.ndarray) -> np.ndarray:
    """Build an array of shapely polygons from (N, 4, 2) corner arrays."""
    closed = np.concatenate((corners, corners[:, :1, :]), axis=1)
    return shapely.polygons(closed)


def center_offset_for(
    params: VehicleParameters, pose_reference: Literal["center", "rear_axle"]
) -> float:
    """Offset from the pose reference point forward to the footprint center."""
    return params.rear_axle_offset if pose_reference == "rear_axle" else 0.0


def footprint(
    pose: Pose,
    params: VehicleParameters,
    pose_reference: Literal["center", "rear_axle"] = "center",
) -> shapely.Polygon:
    """
    Ego footprint at one pose.

    Args:
        pose: Pose of the reference point
        params: Vehicle parameters (length, width, rear axle offset)
        pose_reference: Whether the pose denotes the geometric center or the rear axle

    Returns:
        Oriented rectangle with counter-clockwise corners
    """
    corners = footprint_corners(
        pose.x,
        pose.y,
        pose.psi,
        params.length,
        params.width,
        center_offset_for(params, pose_reference),
    )
    return shapely.Polygon(corners[0])


def distances_to_bounds(geometries: np.ndarray, track: TrackMap) -> np.ndarray:
    """Distance of every geometry to its nearest bound segment [m]."""
    hits, distance = track.bound_tree.query_nearest(geometries, return_distance=True, all_matches=False)
    result = np.full(len(geometries), np.nan)
    result[hits[0]] = distance
    return result


def signed_distances_to_bounds(polygons: np.ndarray, track: TrackMap) -> np.ndarray:
    """
    Signed clearance of many polygons to the track bounds.

    Polygons strictly inside the corridor get their distance to the nearest
    bound. Polygons touching or crossing a bound get the negated depth of
    the part lying outside, measured as the farthest vertex of that part
    from the bounds (at least ``CONTACT_DEPTH``).

    Args:
        polygons: Array of shapely polygons
        track: Track map

    Returns:
        Float array with one signed distance per polygon [m]
    """
    polygons = np.atleast_1d(np.asarray(polygons, dtype=object))
    result = distances_to_bounds(polygons, track)

    outside = ~shapely.contains_properly(track.corridor, polygons)
    if not outside.any():
        return result

    outside_idx = np.flatnonzero(outside)
    overhang = shapely.difference(polygons[outside_idx], track.corridor)
    depth = np.zeros(outside_idx.size)
    coords, owner = shapely.get_coordinates(overhang, return_index=True)
    if coords.size:
        vertex_depth = distances_to_bounds(shapely.points(coords), track)
        np.maximum.at(depth, owner, vertex_depth)

    result[outside_idx] = -np.maximum(depth, CONTACT_DEPTH)
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug(f"{outside_idx.size} footprint(s) touch or cross the bounds of {track.name}")
    return result


def signed_distance_to_bounds(polygon: shapely.Polygon, track: TrackMap) -> float:
    """
    Signed clearance of one polygon to the track bounds.

    Positive clearance when strictly inside the corridor, negative
    penetration depth when touching or crossing a bound.
    """
    return float(signed_distances_to_bounds(np.array([polygon], dtype=object), track)[0])
