import numpy as np
import pytest

from pulsechain import (CircuitParams, GatePulse, TimeGrid, ValidationError,
                        control_voltage_for_tau, fit_exponential,
                        generate_envelope, shockley_current, simulate_circuit,
                        tau_from_control_voltage)

GRID = TimeGrid(0.0, 0.1e-9, 10000)


def params_for_tau(tau, **kw):
    base = CircuitParams()
    return CircuitParams(v_in=control_voltage_for_tau(base, tau), **kw)


class TestShockley:
    def test_zero_bias_gives_zero(self):
        assert shockley_current(0.0, CircuitParams()) == 0.0

    def test_thermal_voltage_point(self):
        p = CircuitParams()
        assert shockley_current(p.v_t, p) == pytest.approx(
            p.i0 * (np.e - 1.0), rel=1e-12)

    def test_clamp_boundary(self):
        # v_be chosen so i0*exp(v/v_t) = 2*i_c_max: clamp must win
        p = CircuitParams()
        v = p.v_t * np.log(2.0 * p.i_c_max / p.i0)
        assert shockley_current(v, p) == p.i_c_max

    def test_no_overflow_far_past_clamp(self):
        p = CircuitParams()
        assert shockley_current(100.0, p) == p.i_c_max

    def test_vectorized_and_monotone(self):
        p = CircuitParams()
        v = np.linspace(0.0, 0.9, 200)
        i = shockley_current(v, p)
        assert i.shape == v.shape
        assert np.all(np.diff(i) >= 0.0)

    def test_rejects_nonfinite(self):
        with pytest.raises(ValidationError):
            shockley_current(np.nan, CircuitParams())


class TestTauFormula:
    def test_design_point_27ns(self):
        # R11*C1*v_t/(v_in - v_drop) at the default control voltage
        assert tau_from_control_voltage(CircuitParams()) == pytest.approx(
            27e-9, rel=1e-9)

    def test_inverse_proportionality(self):
        p = CircuitParams()
        doubled = CircuitParams(v_in=p.v_drop + 2 * (p.v_in - p.v_drop))
        assert tau_from_control_voltage(doubled) == pytest.approx(
            tau_from_control_voltage(p) / 2.0, rel=1e-12)

    def test_factor_five_sweep(self):
        # the control input covers 27/5 ns .. 27*5 ns
        for tau in np.geomspace(27e-9 / 5, 27e-9 * 5, 7):
            p = params_for_tau(tau)
            assert tau_from_control_voltage(p) == pytest.approx(tau, rel=1e-12)

    def test_invalid_control_voltage(self):
        with pytest.raises(ValidationError):
            CircuitParams(v_in=0.5)  # below the junction drop

    def test_thermal_voltage_plausibility_band(self):
        with pytest.raises(ValidationError):
            CircuitParams(v_t=0.050)


class TestGenerateEnvelope:
    def test_fit_recovers_design_tau(self):
        p = params_for_tau(27e-9)
        gate = GatePulse(t_on=50e-9, duration=80e-9)
        w = generate_envelope(p, gate, GRID)
        r = fit_exponential(w, (90e-9, 129.8e-9), "rising")  # last 40 ns
        assert r.tau == pytest.approx(27e-9, rel=0.02)

    def test_fig3_style_rise_and_subsample_drop(self):
        p = params_for_tau(30.5e-9)
        gate = GatePulse(t_on=50e-9, duration=400e-9)
        w = generate_envelope(p, gate, GRID)
        x = w.samples.real
        i_off = GRID.index_at(gate.t_off)
        assert x[i_off] > 0.0
        assert x[i_off + 1] == 0.0          # diversion within one sample
        r = fit_exponential(w, (250e-9, 449e-9), "rising")
        assert r.tau == pytest.approx(30.5e-9, rel=0.02)

    def test_one_sample_gate_produces_nothing(self):
        p = CircuitParams()
        # sub-sample gate: only the start sample is active, no charge yet
        w = generate_envelope(p, GatePulse(t_on=50e-9, duration=0.05e-9), GRID)
        assert np.max(np.abs(w.samples)) == 0.0
        # one-dt gate: a second sample with one step of charge, still ~0
        w2 = generate_envelope(p, GatePulse(t_on=50e-9, duration=0.1e-9), GRID)
        assert np.max(np.abs(w2.samples)) < 1e-12

    def test_zero_before_gate_and_after_drop(self):
        p = CircuitParams()
        gate = GatePulse(t_on=100e-9, duration=200e-9)
        w = generate_envelope(p, gate, GRID)
        x = w.samples.real
        assert np.all(x[:GRID.index_at(gate.t_on)] == 0.0)
        assert np.all(x[GRID.index_at(gate.t_off) + 1:] == 0.0)

    def test_monotone_rise_and_clamp(self):
        # drive hard into the clamp with a long gate
        p = params_for_tau(10e-9)
        gate = GatePulse(t_on=20e-9, duration=900e-9)
        w = generate_envelope(p, gate, GRID)
        x = w.samples.real
        on = slice(GRID.index_at(gate.t_on), GRID.index_at(gate.t_off) + 1)
        assert np.all(np.diff(x[on]) >= 0.0)
        assert np.max(x) == p.v_out_max
        below = x[on][x[on] < 0.999 * p.v_out_max]
        assert np.all(np.diff(below) > 0.0)  # strictly increasing below clamp

    def test_eq2_consistency_property(self):
        # fitted tau matches the formula within 2% whenever I_C >> I0 and
        # below clamp at the window end
        for tau in (8e-9, 27e-9, 70e-9):
            p = params_for_tau(tau)
            gate = GatePulse(t_on=50e-9, duration=5 * tau)
            w = generate_envelope(p, gate, GRID)
            i_end = shockley_current(p.ramp_slope * gate.duration, p)
            assert i_end >= 100 * p.i0
            assert i_end < p.i_c_max
            r = fit_exponential(
                w, (gate.t_on + 1.5 * tau, gate.t_off - 2 * GRID.dt), "rising")
            assert r.tau == pytest.approx(tau, rel=0.02)

    def test_retrigger_starts_elevated(self):
        p = params_for_tau(27e-9)
        g1 = GatePulse(t_on=50e-9, duration=200e-9)
        g2 = GatePulse(t_on=300e-9, duration=200e-9)
        v_be, v_out = simulate_circuit(p, [g1, g2], GRID)
        i_off1 = GRID.index_at(g1.t_off)
        i_on1 = GRID.index_at(g1.t_on)
        i2 = GRID.index_at(g2.t_on)
        v_end = p.ramp_slope * GRID.dt * (i_off1 - i_on1 + 1)
        expected = v_end * np.exp(-(i2 - i_off1 - 1) * GRID.dt / p.discharge_tau)
        assert v_be.samples.real[i2] == pytest.approx(expected, rel=1e-9)
        assert v_out.samples.real[i2] == pytest.approx(
            p.load_ohms * shockley_current(expected, p), rel=1e-6)
        assert v_out.samples.real[i2] > 0.0

    def test_gate_outside_grid_rejected(self):
        with pytest.raises(ValidationError):
            generate_envelope(CircuitParams(),
                              GatePulse(t_on=900e-9, duration=200e-9), GRID)

    def test_overlapping_gates_rejected(self):
        with pytest.raises(ValidationError):
            generate_envelope(
                CircuitParams(),
                [GatePulse(t_on=50e-9, duration=100e-9),
                 GatePulse(t_on=100e-9, duration=100e-9)], GRID)
