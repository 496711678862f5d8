"""Hierarchical aerial base station placement: python bindings."""

from ._core import (
    aabb_overlap,
    drone_survivability,
    fspl_db,
    polygon_area,
    polygon_centroid,
    polygon_polar_moment,
    pso,
    resource_index,
    run,
    run_default,
    voronoi,
    vpso,
)

__all__ = [
    "aabb_overlap",
    "drone_survivability",
    "fspl_db",
    "polygon_area",
    "polygon_centroid",
    "polygon_polar_moment",
    "pso",
    "resource_index",
    "run",
    "run_default",
    "voronoi",
    "vpso",
]
