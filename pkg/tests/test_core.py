"""Config validation, randomness discipline, memory-update contract, and the
correlation-horizon diagnostic."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from memrw import (
    EnvConfig,
    EventWindow,
    Family,
    InvalidDimension,
    InvalidProbability,
    InvalidRegimeForFamily,
    MemoryState,
    Mode,
    Regime,
    RngStream,
    Stream,
    config_from_dict,
    config_to_dict,
    correlation_horizon,
    is_memory_intensive,
    load_config,
    memory_update,
    validate_config,
)
from memrw.core import ConfigError, DimensionMismatch


def tmaze_config(**kw):
    base = dict(family=Family.TMAZE, regime=Regime.FIXED, corridor_length=5, corridor_count=3)
    base.update(kw)
    return EnvConfig(**base)


def cubes_config(**kw):
    base = dict(family=Family.COLOR_CUBES, mode=Mode.MEDIUM, grid_size=5, cube_count=3, subepisode_count=3, teleport_prob=0.3)
    base.update(kw)
    return EnvConfig(**base)


class TestValidateConfig:
    def test_trivial_mode_forces_single_cube_and_subepisode(self):
        cfg = validate_config(cubes_config(mode=Mode.TRIVIAL, cube_count=5, subepisode_count=4))
        assert cfg.cube_count == 1
        assert cfg.subepisode_count == 1

    def test_zero_teleport_probability_is_accepted(self):
        cfg = validate_config(cubes_config(teleport_prob=0.0))
        assert cfg.teleport_prob == 0.0

    def test_too_many_cubes_rejected(self):
        with pytest.raises(InvalidDimension):
            validate_config(cubes_config(cube_count=30, grid_size=5))

    def test_probability_out_of_range_rejected(self):
        with pytest.raises(InvalidProbability):
            validate_config(cubes_config(teleport_prob=1.5))
        with pytest.raises(InvalidProbability):
            validate_config(cubes_config(teleport_prob=-0.1))

    def test_bad_corridor_dimensions_rejected(self):
        with pytest.raises(InvalidDimension):
            validate_config(tmaze_config(corridor_length=0))
        with pytest.raises(InvalidDimension):
            validate_config(tmaze_config(corridor_count=0))

    def test_tmaze_requires_regime(self):
        with pytest.raises(InvalidRegimeForFamily):
            validate_config(EnvConfig(family=Family.TMAZE, regime=None))

    def test_regime_on_cubes_config_rejected(self):
        with pytest.raises(InvalidRegimeForFamily):
            validate_config(cubes_config(regime=Regime.FIXED))

    def test_default_step_budgets(self):
        assert validate_config(tmaze_config()).max_steps == 4 * 3 * 5
        assert validate_config(cubes_config()).max_steps == 8 * 5 * 3

    def test_cubes_fields_ignored_by_tmaze(self):
        cfg = validate_config(tmaze_config(cube_count=9999, teleport_prob=0.3))
        assert cfg.corridor_count == 3


class TestConfigFiles:
    def test_roundtrip(self):
        cfg = validate_config(tmaze_config())
        assert config_from_dict(config_to_dict(cfg)) == cfg

    def test_unknown_keys_are_an_error(self):
        with pytest.raises(ConfigError, match="unknown"):
            config_from_dict({"family": "tmaze", "regime": "fixed", "corridor_len": 5})

    def test_missing_family(self):
        with pytest.raises(ConfigError, match="family"):
            config_from_dict({"regime": "fixed"})

    def test_load_config_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            load_config(tmp_path / "nope.json")

    def test_load_config(self, tmp_path):
        p = tmp_path / "cfg.json"
        p.write_text('{"family": "tmaze", "regime": "uniform", "corridor_length": 7, "corridor_count": 2}')
        cfg = load_config(p)
        assert cfg.regime is Regime.UNIFORM
        assert cfg.corridor_length == 7


class TestRngStream:
    def test_same_key_same_draws(self):
        a = RngStream(123, Stream.CUES)
        b = RngStream(123, Stream.CUES)
        assert [a.integers(0, 1000) for _ in range(20)] == [b.integers(0, 1000) for _ in range(20)]

    def test_counter_addresses_individual_draws(self):
        a = RngStream(123, Stream.CUES)
        draws = [a.integers(0, 1000) for _ in range(10)]
        for k in (0, 3, 9):
            resumed = RngStream(123, Stream.CUES, counter=k)
            assert resumed.integers(0, 1000) == draws[k]

    def test_streams_are_independent(self):
        # Consuming arbitrarily much of the teleport stream leaves the
        # lengths stream untouched.
        lengths_only = RngStream(99, Stream.LENGTHS)
        expected = [lengths_only.integers(1, 11) for _ in range(5)]
        teleport = RngStream(99, Stream.TELEPORT)
        for _ in range(137):
            teleport.random()
        lengths_again = RngStream(99, Stream.LENGTHS)
        assert [lengths_again.integers(1, 11) for _ in range(5)] == expected

    def test_distinct_seeds_differ(self):
        assert [RngStream(1, 0).random() for _ in range(3)] != [RngStream(2, 0).random() for _ in range(3)]

    def test_mixed_draw_types_stay_addressable(self):
        a = RngStream(5, 1)
        a.random()
        a.permutation(10)
        third = a.integers(0, 10**9)
        assert RngStream(5, 1, counter=2).integers(0, 10**9) == third


class IdentityCell:
    state_width = 3

    def forget(self, m, eta):
        return m

    def encode(self, eta):
        return np.zeros(3)

    def integrate(self, kept, encoded):
        return kept + encoded


class EraserCell:
    state_width = 3

    def forget(self, m, eta):
        return np.zeros(3)

    def encode(self, eta):
        return np.asarray(eta, dtype=float)

    def integrate(self, kept, encoded):
        return encoded


class TestMemoryUpdate:
    def test_identity_cell_is_identity(self):
        m = MemoryState(np.array([1.0, -2.0, 0.5]))
        for eta in (np.zeros(3), np.ones(3), np.array([9.0, 9.0, 9.0])):
            m2 = memory_update(m, eta, IdentityCell())
            assert np.array_equal(m2.values, m.values)

    def test_eraser_cell_depends_only_on_input(self):
        eta = np.array([3.0, 1.0, 4.0])
        out1 = memory_update(MemoryState(np.zeros(3)), eta, EraserCell())
        out2 = memory_update(MemoryState(np.full(3, 77.0)), eta, EraserCell())
        assert np.array_equal(out1.values, eta)
        assert np.array_equal(out1.values, out2.values)

    def test_width_mismatch(self):
        with pytest.raises(DimensionMismatch):
            memory_update(MemoryState(np.zeros(2)), np.zeros(3), IdentityCell())


class TestCorrelationHorizon:
    def test_printed_formula(self):
        assert correlation_horizon(EventWindow(t_e=0, delta_t=1, t_r=5)) == 5

    def test_adjacent_event_and_decision(self):
        assert correlation_horizon(EventWindow(t_e=3, delta_t=2, t_r=5)) == 1

    def test_invalid_windows_rejected(self):
        with pytest.raises(ValueError):
            EventWindow(t_e=0, delta_t=0, t_r=5)
        with pytest.raises(ValueError):
            EventWindow(t_e=4, delta_t=2, t_r=5)

    @given(t_e=st.integers(0, 1000), delta_t=st.integers(1, 100), gap=st.integers(0, 1000))
    def test_horizon_at_least_one_and_one_iff_adjacent(self, t_e, delta_t, gap):
        w = EventWindow(t_e=t_e, delta_t=delta_t, t_r=t_e + delta_t + gap)
        xi = correlation_horizon(w)
        assert xi >= 1
        assert (xi == 1) == (w.t_r == w.t_e + w.delta_t)

    def test_memory_intensive_flag(self):
        assert is_memory_intensive([EventWindow(0, 1, 5), EventWindow(6, 1, 9)])
        assert not is_memory_intensive([EventWindow(0, 1, 5), EventWindow(6, 1, 7)])
        assert not is_memory_intensive([])
