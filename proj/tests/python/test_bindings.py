import random

import numpy as np
import pytest

import parcelpick as pp


@pytest.fixture(scope="module")
def bag_scene():
    scene = pp.random_scene(1, 0, seed=11)
    return scene, *pp.render_scene(scene)


def test_render_shapes_and_truth(bag_scene, validate):
    scene, color, depth, truth = bag_scene
    validate(scene, "scene")
    validate(truth, "truth")
    assert color.shape == (480, 640, 3) and color.dtype == np.uint8
    assert depth.shape == (480, 640) and depth.dtype == np.float64
    assert truth["objects"][0]["class"] == "bag"
    # Only the bag rises above the 1 m table.
    assert depth[depth > 0].min() < 1.0 - 0.02


def test_plan_grasps_is_deterministic_and_ranked(bag_scene, validate):
    _, color, depth, _ = bag_scene
    a = pp.plan_grasps(color, depth, seed=5)
    validate(a, "plans")
    assert a == pp.plan_grasps(color, depth, seed=5)
    scores = [r["score"] for r in a["ranked"]]
    assert scores == sorted(scores, reverse=True)
    assert a["selected"] == a["ranked"][0]
    raw = pp.plan_grasps(color, depth, seed=5, config={"use_filter": False})
    assert len(raw["ranked"]) >= len(a["ranked"])


def test_flat_table_has_no_candidates():
    _, depth, _ = pp.render_scene(pp.random_scene(0, 0, seed=1, noise_sigma=0.0))[:3]
    color = np.full(depth.shape + (3,), 70, np.uint8)
    plans = pp.plan_grasps(color, depth, seed=1)
    assert plans["candidates"] == [] and plans["selected"] is None


def test_filter_matches_direct_evaluation():
    rng = random.Random(3)
    t = {"eps1": 0.01, "eps2": 0.01, "eps3": 0.01, "eps4": 0.01, "eps5": 30.0, "eps6": 50.0}
    for _ in range(200):
        d0 = rng.uniform(0.5, 1.5)
        s = {"d0": d0, "d1": d0 + rng.uniform(-0.03, 0.05), "d2": d0 + rng.uniform(-0.03, 0.05),
             "d_min": d0 - rng.uniform(0, 0.03), "d_max": d0 + rng.uniform(0, 0.06),
             "mu_d": d0 + rng.uniform(-0.01, 0.04), "sigma_d": rng.uniform(0, 0.03), "sigma_c": rng.uniform(0, 70),
             "c1": [rng.uniform(0, 255) for _ in range(3)], "c2": [rng.uniform(0, 255) for _ in range(3)]}
        diff = sum(a - b for a, b in zip(s["c1"], s["c2"])) / 3
        want = [s["d1"] > d0 + t["eps1"] and s["d2"] > d0 + t["eps1"],
                s["d_max"] - s["d_min"] > t["eps2"],
                s["mu_d"] > d0 + t["eps3"] and s["sigma_d"] > t["eps4"],
                s["sigma_c"] > t["eps5"],
                abs(diff) > t["eps6"]]
        assert list(pp.passes_filter(s, t).values()) == want


def test_detect_and_suction_on_envelope(validate):
    env = pp.random_scene(0, 1, seed=4)
    color, depth, truth = pp.render_scene(env)
    dets = pp.detect(color, depth)
    validate(dets, "detections")
    assert [d["class"] for d in dets["detections"]] == ["envelope"]
    box = dets["detections"][0]["bbox"]
    plan = pp.plan_suction(depth, (*box["min"], *box["max"]), seed=2)
    u, v = plan["pixel"]
    assert box["min"][0] <= u <= box["max"][0] and box["min"][1] <= v <= box["max"][1]
    assert plan["tilt"] < np.radians(15)


def test_pipeline_report(validate):
    scene = pp.random_scene(2, 2, seed=9)
    report = pp.run_pipeline(scene, seed=3)
    validate(report, "report")
    assert report["all_placed"]
    assert report == pp.run_pipeline(scene, seed=3)
    kinds = [a["kind"] for a in report["actions"]]
    down = sum(not o["barcode_up"] for o in scene["objects"])
    assert kinds.count("Reverse") == down == report["reversals"]
    cls = {o["id"]: o["class"] for o in scene["objects"]}
    for a in report["actions"]:
        if a["kind"] == "PickGrasp":
            assert cls[a["target"]] == "bag"
        if a["kind"] == "PickSuction":
            assert cls[a["target"]] == "envelope"


def test_projection_round_trip():
    rng = random.Random(8)
    for _ in range(100):
        u, v, d = rng.uniform(0, 639), rng.uniform(0, 479), rng.uniform(0.3, 2.0)
        pu, pv = pp.project(pp.deproject(u, v, d))
        assert abs(pu - u) < 1e-6 and abs(pv - v) < 1e-6


def test_errors_are_typed():
    with pytest.raises(pp.ConfigError):
        pp.run_pipeline(pp.random_scene(1, 0, seed=1), seed=1, config={"thresholds": {"eps9": 1}})
    with pytest.raises(pp.ConfigError):
        pp.detect(np.zeros((4, 4), np.uint8), np.zeros((4, 4)))
    with pytest.raises(pp.Error):
        pp.deproject(1, 1, 1.0, camera={**pp.DEFAULT_CAMERA, "fx": -1})
