"""Parcel picking: antipodal grasp filtering, suction planning, detection and a
pick-check-place pipeline over synthetic RGB-D scenes.

Structured values are plain dicts in the same layout as the CLI's JSON files.
Images are numpy arrays: color is (H, W, 3) uint8, depth is (H, W) float64 in
meters with 0 marking invalid pixels.
"""

import json

import numpy as np

from . import _core
from ._core import (
    BehindCameraError,
    ConfigError,
    Error,
    FrustumError,
    InvalidDepthError,
    IoError,
    NoGraspError,
    NoSuctionError,
    OutOfBoundsError,
    PlacementError,
    ProtocolError,
)

__all__ = [
    "Error",
    "BehindCameraError",
    "ConfigError",
    "FrustumError",
    "InvalidDepthError",
    "IoError",
    "NoGraspError",
    "NoSuctionError",
    "OutOfBoundsError",
    "PlacementError",
    "ProtocolError",
    "default_config",
    "random_scene",
    "render_scene",
    "plan_grasps",
    "plan_suction",
    "detect",
    "run_pipeline",
    "passes_filter",
    "deproject",
    "project",
    "DEFAULT_CAMERA",
]

DEFAULT_CAMERA = {"fx": 600.0, "fy": 600.0, "cx": 320.0, "cy": 240.0, "width": 640, "height": 480}


def _dump(value):
    return "" if value is None else json.dumps(value)


def default_config():
    """The full default configuration, in the layout --config files use."""
    return json.loads(_core.default_config())


def random_scene(bags, envelopes, seed, noise_sigma=0.0015):
    """A seeded scene spec, identical to what `gen-scene` writes."""
    return json.loads(_core.random_scene(bags, envelopes, seed, noise_sigma))


def render_scene(scene):
    """Renders a scene spec; returns (color, depth, truth)."""
    color, depth, truth = _core.render_scene(json.dumps(scene))
    return color, depth, json.loads(truth)


def plan_grasps(color, depth, seed, camera=None, config=None):
    """Samples, filters and ranks antipodal grasps; returns the plans.json dict."""
    return json.loads(_core.plan_grasps(np.asarray(color), np.asarray(depth), json.dumps(camera or DEFAULT_CAMERA),
                                        _dump(config), seed))


def plan_suction(depth, bbox, seed, camera=None, config=None):
    """Suction point inside bbox = (u_min, v_min, u_max, v_max); raises NoSuctionError."""
    return json.loads(_core.plan_suction(np.asarray(depth), json.dumps(camera or DEFAULT_CAMERA), list(bbox),
                                         _dump(config), seed))


def detect(color, depth, config=None):
    """Package detections as in detections.json."""
    return json.loads(_core.detect(np.asarray(color), np.asarray(depth), _dump(config)))


def run_pipeline(scene, seed, config=None):
    """Runs the pick-check-place loop on a scene spec; returns the report dict."""
    return json.loads(_core.run_pipeline(json.dumps(scene), _dump(config), seed))


def passes_filter(stats, thresholds=None):
    """Evaluates the five filter conditions on a region-stats dict."""
    config = None if thresholds is None else {"thresholds": thresholds}
    return json.loads(_core.passes_filter(json.dumps(stats), _dump(config)))


def deproject(u, v, depth, camera=None):
    return tuple(_core.deproject(u, v, depth, json.dumps(camera or DEFAULT_CAMERA)))


def project(point, camera=None):
    return tuple(_core.project(list(point), json.dumps(camera or DEFAULT_CAMERA)))
