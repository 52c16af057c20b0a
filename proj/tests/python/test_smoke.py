import math

import pytest

import potsim


def test_filters_have_unit_energy():
    for family, param in [("gaussian", 0.2), ("rrc", 0.2), ("iota", 1.0)]:
        f = potsim.make_filter(family, param)
        assert f.family == family
        assert abs(f.energy() - 1.0) < 1e-9
        assert len(f.samples) == int(f.span * f.sample_rate)


def test_gaussian_ambiguity_closed_form():
    g = potsim.make_filter("gaussian", 1.0)
    for tau, nu in [(0.0, 0.0), (0.5, 0.25), (-1.0, 0.5)]:
        expected = math.exp(-math.pi * tau**2 / 2 - math.pi * nu**2 / 2)
        assert abs(abs(potsim.ambiguity(g, g, tau, nu)) - expected) < 1e-4


def test_surface_peak():
    s = potsim.ambiguity_surface("gaussian", 1.0, extent=2.0, points=11)
    assert len(s["delays"]) == 11
    assert abs(s["magnitude"][5][5] - 1.0) < 1e-12


def test_scalar_rules():
    assert potsim.update_aggressor_count(2, 10.0, 5.5) == 3
    assert potsim.update_aggressor_count(2, 10.0, 8.5) == 2
    assert potsim.q_update(5.0, 0.0, 0.0, 0.5, 0.9) == pytest.approx(2.5)
    assert potsim.reward(3.2, 3.0, 10.0) == pytest.approx(2.0)
    p = potsim.InterferenceProfile(1.0, 0.0, 0.0, 0.1)
    assert p.sinr_db() == pytest.approx(10.0)
    assert potsim.InterferenceProfile(1.0, 0.0, 0.0, 0.0).multiuser_efficiency() == 1.0


def test_scenario_is_seeded():
    a = potsim.generate_scenario(5, seed=3)
    b = potsim.generate_scenario(5, seed=3)
    assert a == b
    assert len(a["links"]) == 5


def test_experiment_run(tmp_path):
    config = {
        "experiment": "capacity_vs_aggressors",
        "filters": ["gaussian"],
        "aggressor_grid": [1, 2],
        "num_drops": 8,
        "training": {"episodes": 20, "drops": 2},
        "qtable_dir": str(tmp_path / "qt"),
    }
    with pytest.raises(potsim.MissingArtifactError):
        potsim.run_experiment(config)
    first = potsim.run_experiment(config, train_if_missing=True)
    second = potsim.run_experiment(config)
    assert first["csv"] == second["csv"]
    assert first["config_hash"] == potsim.config_hash(config)
    assert len(first["rows"]) == 2 * 2 * 3
    assert first["csv"].startswith("grid_value,filter,mode,metric,mean,ci95,drops")


def test_config_errors():
    with pytest.raises(potsim.ConfigurationError):
        potsim.config_hash({"experiment": "capacity_vs_aggressors", "num_drops": 0})
    with pytest.raises(potsim.ParameterDomainError):
        potsim.make_filter("gaussian", -1.0)
