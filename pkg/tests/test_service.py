"""Decision service: store discipline, NLMS learning, recommendations, overrides."""

import dataclasses

import numpy as np
import pytest

from synth_stream import W_TRUE, make_depletion_stream
from agrisim.controller import IrrigationPolicy
from agrisim.service import (
    AUTO,
    DecisionService,
    ModelCoefficients,
    StaleRecord,
    StaleTelemetry,
    TelemetryStore,
    UnknownNode,
    features_from_record,
    ingest_record,
    new_model,
    recommend_policy,
    update_model,
)
from agrisim.wire import TelemetryRecord, parse_telemetry_line, serialize_record

POLICY = IrrigationPolicy(crop_id="tomato", m_on_pct=35, m_off_pct=60)


def rec(ts_ms=1000, node="n1", **over):
    base = dict(
        node=node, ts_ms=ts_ms, t_c=25.0, rh_pct=65.0, m_pct=50, m_raw=512,
        rain=0, lux_raw=0, p_kpa=20.0, f_mlmin=0.0, vol_ml=0.0, pump=0,
    )
    base.update(over)
    return TelemetryRecord(**base)


class TestStore:
    def test_first_record(self):
        store = ingest_record(TelemetryStore(), rec())
        assert store.latest("n1") == rec()
        assert store.ingest_count == 1

    def test_ordered_appends(self):
        store = TelemetryStore()
        store.ingest(rec(1000))
        store.ingest(rec(2000))
        assert [r.ts_ms for r in store.history("n1")] == [1000, 2000]

    def test_stale_rejected(self):
        store = TelemetryStore()
        store.ingest(rec(2000))
        with pytest.raises(StaleRecord):
            store.ingest(rec(1500))
        with pytest.raises(StaleRecord):
            store.ingest(rec(2000))  # duplicates count as stale too

    def test_nodes_are_independent(self):
        store = TelemetryStore()
        store.ingest(rec(2000, node="a"))
        store.ingest(rec(1000, node="b"))
        assert store.nodes() == ["a", "b"]

    def test_history_window(self):
        store = TelemetryStore()
        for ts in (1000, 2000, 3000, 4000):
            store.ingest(rec(ts))
        assert [r.ts_ms for r in store.history("n1", 2000, 3000)] == [2000, 3000]

    def test_unknown_node(self):
        with pytest.raises(UnknownNode):
            TelemetryStore().history("ghost")

    def test_replay_reconstructs_identical_store(self, tmp_path):
        records = make_depletion_stream(50)
        path = tmp_path / "t.log"
        path.write_text("".join(serialize_record(r) + "\n" for r in records))
        store = TelemetryStore()
        for line in path.read_text().splitlines():
            store.ingest(parse_telemetry_line(line))
        assert store.history(records[0].node) == records


class TestUpdateModel:
    def test_zero_learning_rate_is_identity(self):
        m = ModelCoefficients(w=np.array([1e-6, 0, 0, 0]), learning_rate=0.0)
        out = update_model(m, rec(1000, m_pct=50), rec(2000, m_pct=49))
        assert np.array_equal(out.w, m.w)

    def test_pump_or_rain_masks_training(self):
        m = new_model()
        for over_prev, over_cur in (({"pump": 1}, {}), ({}, {"pump": 1}),
                                    ({"rain": 1}, {}), ({}, {"rain": 1})):
            out = update_model(m, rec(1000, **over_prev), rec(2000, **over_cur))
            assert np.array_equal(out.w, m.w)
            assert out.n_samples == 0

    def test_non_monotone_rejected(self):
        with pytest.raises(ValueError):
            update_model(new_model(), rec(2000), rec(1000))

    def test_cross_node_rejected(self):
        with pytest.raises(ValueError):
            update_model(new_model(), rec(1000, node="a"), rec(2000, node="b"))

    def test_step_moves_toward_observation(self):
        prev, cur = rec(1000, m_pct=50), rec(61_000, m_pct=49)  # 1%/minute
        m = update_model(new_model(0.5), prev, cur)
        y = 0.01 / 60.0
        x = features_from_record(prev)
        assert 0.0 < float(m.w @ x) < y  # moved part way, not past
        assert m.n_samples == 1

    def test_repeated_sample_error_non_increasing(self):
        prev, cur = rec(1000, m_pct=50), rec(61_000, m_pct=49)
        y = 0.01 / 60.0
        m = new_model(0.05)
        last = abs(y - float(m.w @ features_from_record(prev)))
        for _ in range(50):
            m = dataclasses.replace(m, n_samples=0)
            m = update_model(m, prev, cur)
            err = abs(y - float(m.w @ features_from_record(prev)))
            assert err <= last + 1e-15
            last = err

    def test_recovers_known_coefficients(self):
        records = make_depletion_stream(3000, seed=5)
        m = new_model(0.05)
        for prev, cur in zip(records, records[1:]):
            m = update_model(m, prev, cur)
        rel = np.abs(m.w - W_TRUE) / np.abs(W_TRUE)
        assert rel.max() < 0.05


class TestRecommend:
    def test_zero_model_gives_no_eta(self):
        out = recommend_policy(new_model(), rec(), POLICY, 135.0, 40.0, now_ms=1000)
        assert out.next_irrigation_eta_s is None
        assert out.predicted_depletion_frac_per_hr == 0.0

    def test_at_threshold_means_now(self):
        m = ModelCoefficients(w=np.array([1e-6, 0.0, 0.0, 0.0]))
        out = recommend_policy(m, rec(m_pct=35), POLICY, 135.0, 40.0, now_ms=1000)
        assert out.next_irrigation_eta_s == 0.0

    def test_eta_thirty_hours(self):
        # depletion 0.5 %/hr, 15 points above threshold -> 30 h
        m = ModelCoefficients(w=np.array([0.005 / 3600.0, 0.0, 0.0, 0.0]))
        out = recommend_policy(m, rec(m_pct=50), POLICY, 135.0, 40.0, now_ms=1000)
        assert out.next_irrigation_eta_s == pytest.approx(30 * 3600.0, rel=1e-9)
        assert out.predicted_depletion_frac_per_hr == pytest.approx(0.005)

    def test_duration_fills_the_band(self):
        out = recommend_policy(new_model(), rec(), POLICY, 135.0, 40.0, now_ms=1000)
        # (60-35) % * 40 mL/% at 135 mL/min
        assert out.suggested_duration_s == pytest.approx((60 - 35) * 40.0 * 60.0 / 135.0)

    def test_stale_telemetry_refused(self):
        with pytest.raises(StaleTelemetry):
            recommend_policy(new_model(), rec(ts_ms=0), POLICY, 135.0, 40.0, now_ms=301_000)

    def test_never_negative(self):
        m = ModelCoefficients(w=np.array([1e-6, 0.0, 0.0, 0.0]))
        out = recommend_policy(m, rec(m_pct=20), POLICY, 135.0, 40.0, now_ms=1000)
        assert out.next_irrigation_eta_s == 0.0
        assert out.suggested_duration_s >= 0.0


class TestDecisionService:
    def test_ingest_and_latest(self):
        svc = DecisionService()
        svc.ingest(rec(1000))
        svc.ingest(rec(2000, m_pct=49))
        assert svc.latest("n1").ts_ms == 2000
        assert svc.model_snapshot()["n_samples"] == 1

    def test_latest_unknown_node(self):
        with pytest.raises(UnknownNode):
            DecisionService().latest("n1")

    def test_persistence_and_recovery(self, tmp_path):
        svc = DecisionService(store_dir=tmp_path)
        for ts in (1000, 2000, 3000):
            svc.ingest(rec(ts))
        svc.close()
        reborn = DecisionService(store_dir=tmp_path)
        assert [r.ts_ms for r in reborn.history("n1")] == [1000, 2000, 3000]
        assert reborn.model_snapshot() == svc.model_snapshot()
        reborn.close()

    def test_replay_file(self, tmp_path):
        records = make_depletion_stream(30)
        path = tmp_path / "in.log"
        path.write_text("".join(serialize_record(r) + "\n" for r in records))
        svc = DecisionService()
        assert svc.replay_file(path) == len(records)
        assert svc.history(records[0].node) == records

    def test_override_lifecycle(self):
        svc = DecisionService()
        svc.ingest(rec(1000))
        svc.apply_override("n1", "off", 600.0, now_ms=10_000)
        status = svc.override_status("n1", now_ms=10_000)
        assert status["state"] == "off" and status["ttl_remaining_s"] == 600.0
        assert status["reason"] == "OVERRIDE"
        status = svc.override_status("n1", now_ms=700_000)  # past expiry
        assert status["state"] == "none" and status["reason"] == AUTO

    def test_override_validation(self):
        svc = DecisionService()
        svc.ingest(rec(1000))
        with pytest.raises(UnknownNode):
            svc.apply_override("ghost", "on", 60.0, now_ms=0)
        with pytest.raises(ValueError):
            svc.apply_override("n1", "on", 0.0, now_ms=0)
        with pytest.raises(ValueError):
            svc.apply_override("n1", "maybe", 60.0, now_ms=0)

    def test_clear_without_override_is_noop(self):
        svc = DecisionService()
        svc.ingest(rec(1000))
        svc.apply_override("n1", "clear", 0.0, now_ms=0)  # no error
        assert svc.override_status("n1", now_ms=0)["state"] == "none"

    def test_rain_gate_reason_dominates_override(self):
        svc = DecisionService()
        svc.ingest(rec(1000, rain=1))
        svc.apply_override("n1", "on", 600.0, now_ms=1000)
        status = svc.override_status("n1", now_ms=1000)
        assert status["reason"] == "RAIN_GATE"
        assert status["state"] == "on"  # the pin is still queued, just outranked
