"""Open-loop evaluation protocol and comparison reports."""

import json

import numpy as np
import pandas as pd
import pytest

from nanoquad import bench, dataio
from nanoquad.bench import HorizonMetrics, RunResult
from nanoquad.dynamics import hover_speed
from nanoquad.params import RigidBodyParams, RotorParams
from nanoquad.rotations import rotvec_to_quat

BP = RigidBodyParams()
RP = RotorParams()


def constant_log(n=80):
    """A log that never moves: the naive predictor is exact on it."""
    q = np.tile([0.0, 0.0, 0.0, 1.0], (n, 1))
    return dataio.frame_from_arrays(
        np.arange(n) / 100.0, np.full((n, 4), hover_speed(BP, RP)),
        np.tile([1.0, -2.0, 0.5], (n, 1)), np.zeros((n, 3)), q,
        np.zeros((n, 3)), np.full((n, 3), [0.0, 0.0, 9.81]),
    )


def drift_log(v, n=80):
    q = np.tile([0.0, 0.0, 0.0, 1.0], (n, 1))
    p = np.arange(n)[:, None] * np.asarray(v) * 0.01
    return dataio.frame_from_arrays(
        np.arange(n) / 100.0, np.full((n, 4), hover_speed(BP, RP)),
        p, np.tile(v, (n, 1)), q, np.zeros((n, 3)), np.full((n, 3), [0.0, 0.0, 9.81]),
    )


class TestStepErrors:
    def test_position_norm(self):
        y = np.zeros(13)
        y[6:10] = [0.0, 0.0, 0.0, 1.0]
        yhat = y.copy()
        yhat[0:3] = [3.0, 4.0, 0.0]
        e_p, e_v, e_w, e_R = bench.step_errors(y, yhat)
        assert e_p == pytest.approx(5.0)
        assert e_v == 0.0 and e_w == 0.0 and e_R == pytest.approx(0.0, abs=1e-12)

    def test_attitude_geodesic(self):
        y = np.zeros(13)
        y[6:10] = [0.0, 0.0, 0.0, 1.0]
        yhat = y.copy()
        yhat[6:10] = rotvec_to_quat(np.array([0.0, np.pi / 2, 0.0]))
        _, _, _, e_R = bench.step_errors(y, yhat)
        assert e_R == pytest.approx(np.pi / 2, rel=1e-12)


class TestEvaluate:
    def test_naive_exact_on_constant_log(self):
        m = bench.evaluate(bench.make_predictor("naive"), constant_log(), H=20)
        for c in bench.CHANNELS:
            np.testing.assert_allclose(m.mae[c], 0.0, atol=1e-12)
        assert m.window_count == 60
        assert m.horizon == 20

    def test_naive_closed_form_on_drift(self):
        v = np.array([0.3, -0.4, 0.0])
        m = bench.evaluate(bench.make_predictor("naive"), drift_log(v), H=20)
        np.testing.assert_allclose(
            m.mae["p"], np.linalg.norm(v) * 0.01 * np.arange(1, 21), rtol=1e-9
        )
        np.testing.assert_allclose(m.mae["v"], 0.0, atol=1e-12)  # v held exactly

    def test_cumulative_is_sum(self):
        m = bench.evaluate(bench.make_predictor("naive"), drift_log([0.2, 0.0, 0.0]), H=10)
        assert m.cumulative("p") == pytest.approx(m.mae["p"].sum())
        assert m.at("p", 1) == pytest.approx(m.mae["p"][0])

    def test_naive_position_curve_nondecreasing(self, melon_log):
        m = bench.evaluate(bench.make_predictor("naive"), melon_log, H=50)
        assert np.all(np.diff(m.mae["p"]) >= -1e-12)

    def test_physics_beats_naive_on_flight(self, melon_log):
        m_n = bench.evaluate(bench.make_predictor("naive"), melon_log, H=50)
        m_p = bench.evaluate(bench.make_predictor("physics"), melon_log, H=50)
        assert m_p.cumulative("v") < m_n.cumulative("v")

    def test_short_log_rejected(self):
        with pytest.raises(ValueError, match="short"):
            bench.evaluate(bench.make_predictor("naive"), constant_log(10), H=50)

    def test_bad_predictor_shape(self):
        def broken(y0, u, H):
            return np.zeros((1, 2, 3))

        with pytest.raises(RuntimeError, match="shape"):
            bench.evaluate(broken, constant_log(), H=10)

    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="unknown"):
            bench.make_predictor("quantum")(np.zeros((1, 12)), np.zeros((1, 2, 4)), 2)


class TestAggregation:
    def test_average_equal_weight(self):
        m1 = bench.evaluate(bench.make_predictor("naive"), drift_log([0.2, 0.0, 0.0]), H=10)
        m2 = bench.evaluate(bench.make_predictor("naive"), drift_log([0.6, 0.0, 0.0]), H=10)
        avg = HorizonMetrics.average([m1, m2])
        np.testing.assert_allclose(avg.mae["p"], (m1.mae["p"] + m2.mae["p"]) / 2)
        assert avg.window_count == m1.window_count + m2.window_count

    def test_evaluate_runs_matches_manual_average(self):
        logs = [drift_log([0.2, 0.0, 0.0]), drift_log([0.0, 0.4, 0.0])]
        pred = bench.make_predictor("naive")
        combined = bench.evaluate_runs(pred, logs, H=10)
        manual = HorizonMetrics.average([bench.evaluate(pred, d, H=10) for d in logs])
        np.testing.assert_array_equal(combined.mae["v"], manual.mae["v"])

    def test_mismatched_horizons_rejected(self):
        pred = bench.make_predictor("naive")
        m1 = bench.evaluate(pred, constant_log(), H=10)
        m2 = bench.evaluate(pred, constant_log(), H=20)
        with pytest.raises(ValueError, match="horizon"):
            HorizonMetrics.average([m1, m2])


def two_results():
    pred = bench.make_predictor("naive")
    res = []
    for name, v in (("naive-a", [0.2, 0.0, 0.0]), ("naive-b", [0.0, 0.5, 0.0])):
        m = bench.evaluate(pred, drift_log(v), H=50)
        res.append(RunResult(model_id=name, trajectory_ids=["drift"], metrics=m,
                             config_hash="deadbeef", elapsed_s=0.1))
    return res


class TestReports:
    def test_compare_table(self):
        table = bench.compare(two_results())
        lines = table.splitlines()
        assert lines[0].startswith("| Model |")
        assert "MAE_p,1 [m]" in lines[0] and "MAE_v,1:50" in lines[0]
        assert len(lines) == 4
        assert lines[2].startswith("| naive-a |")

    def test_compare_mismatched_horizons(self):
        pred = bench.make_predictor("naive")
        r1 = RunResult("a", [], bench.evaluate(pred, constant_log(), H=10))
        r2 = RunResult("b", [], bench.evaluate(pred, constant_log(), H=20))
        with pytest.raises(ValueError, match="horizon"):
            bench.compare([r1, r2])
        with pytest.raises(ValueError, match="no results"):
            bench.compare([])

    def test_curves_frame(self):
        df = bench.curves_frame(two_results())
        assert set(df.columns) == {"model", "channel", "h", "mae"}
        assert len(df) == 2 * 4 * 50
        sub = df[(df.model == "naive-a") & (df.channel == "p")]
        assert list(sub.h) == list(range(1, 51))

    def test_results_json(self):
        out = json.loads(bench.results_json(two_results()))
        assert [r["model"] for r in out] == ["naive-a", "naive-b"]
        assert out[0]["config_hash"] == "deadbeef"
        assert len(out[0]["metrics"]["p"]) == 50
        assert out[0]["metrics"]["window_count"] == 30
