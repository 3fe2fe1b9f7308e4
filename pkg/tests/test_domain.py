import json

import pytest
from hypothesis import given, strategies as st

from synsim import (DefenseParams, SimConfig, TrafficModel, config_from_dict,
                    load_config, validate_config)


def _cfg(**kw):
    defaults = dict(master_seed=1)
    defaults.update(kw)
    return SimConfig(**defaults)


def test_paper_baseline_is_valid():
    cfg = _cfg(traffic=TrafficModel(lambda1=10, k=1, mu=100),
               initial_params=DefenseParams(75.0, 128),
               total_requests=50000, controller_kind="static")
    assert validate_config(cfg) == []


def test_zero_hold_time_rejected():
    cfg = _cfg(initial_params=DefenseParams(0.0, 128))
    assert "h must be strictly positive" in validate_config(cfg)


def test_window_larger_than_run_rejected():
    cfg = _cfg(total_requests=500, window_size=1000)
    assert "window exceeds total requests" in validate_config(cfg)


def test_all_violations_reported_not_just_first():
    cfg = _cfg(traffic=TrafficModel(lambda1=-1, k=-2, mu=0),
               initial_params=DefenseParams(-1.0, 0),
               epsilon_floor=0.0)
    violations = validate_config(cfg)
    assert len(violations) >= 5


def test_validation_is_total_on_weird_inputs():
    cfg = _cfg(controller_kind="bogus", hold_mode="bogus", compare_mode="bogus")
    violations = validate_config(cfg)
    assert violations  # returns a list, never raises


@given(st.floats(0, 1e6, allow_nan=False), st.floats(0, 1e3, allow_nan=False))
def test_lambda2_is_exactly_derived(lambda1, k):
    t = TrafficModel(lambda1=lambda1, k=k, mu=100.0)
    assert t.lambda2 == k * lambda1


def test_config_from_json_round_trip(tmp_path):
    doc = {
        "master_seed": 42,
        "traffic": {"lambda1": 10, "k": 0.5, "mu": 100},
        "total_requests": 2000,
        "window_size": 500,
        "controller_kind": "static",
        "initial_params": {"h": 10, "m": 64},
    }
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    cfg = load_config(path)
    assert cfg.master_seed == 42
    assert cfg.traffic.k == 0.5
    assert cfg.initial_params == DefenseParams(10.0, 64)
    # untouched fields keep their defaults
    assert cfg.epsilon_floor == 1e-6
    assert cfg.la_settings.h_actions[-1] == 75.0


def test_master_seed_is_required():
    with pytest.raises(ValueError, match="master_seed"):
        config_from_dict({"total_requests": 100})


def test_unknown_keys_rejected():
    with pytest.raises(ValueError, match="unknown"):
        config_from_dict({"master_seed": 1, "typo_field": 3})
