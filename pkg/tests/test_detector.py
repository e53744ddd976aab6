import numpy as np
import pytest

from pulsechain import (DetectorParams, EtalonStack, TimeGrid, ValidationError,
                        Waveform, detect, filter_pulse, fit_exponential,
                        undershoot_fraction)

GRID = TimeGrid(0.0, 0.1e-9, 10000)
WIDE_OPEN = DetectorParams(bandwidth_hz=None, scope_bandwidth_hz=None)


def gated_exponential(tau_amp, t_on=100e-9, t_cut=400e-9):
    t = GRID.times()
    x = np.where((t >= t_on) & (t <= t_cut), np.exp((t - t_cut) / tau_amp), 0.0)
    return Waveform(grid=GRID, samples=x, unit="sqrtW")


class TestSquareLaw:
    def test_squaring_halves_time_constant(self):
        # amplitude tau 20 ns -> power tau 10 ns (infinite bandwidths)
        out = detect(gated_exponential(20e-9), WIDE_OPEN)
        r = fit_exponential(out, (150e-9, 398e-9), "rising")
        assert r.tau == pytest.approx(10e-9, rel=0.01)

    def test_constant_field(self):
        a = 0.8
        w = Waveform(grid=GRID, samples=np.full(GRID.n_samples, a), unit="sqrtW")
        out = detect(w, DetectorParams(responsivity=2.0))
        assert np.max(np.abs(out.samples.real - 2.0 * a * a)) < 1e-9

    @pytest.mark.parametrize("tau", [10e-9, 17.4e-9, 27e-9, 54e-9])
    def test_factor_of_two_family(self, tau):
        t_cut = min(100e-9 + 8 * tau, 900e-9)
        out = detect(gated_exponential(tau, t_cut=t_cut), WIDE_OPEN)
        r = fit_exponential(out, (100e-9 + 2 * tau, t_cut - 1e-9), "rising")
        assert r.tau == pytest.approx(tau / 2.0, rel=0.005)

    def test_global_phase_invariance_exact(self):
        w = gated_exponential(20e-9)
        rotated = Waveform(grid=GRID, samples=1j * w.samples, unit=w.unit)
        a = detect(w, DetectorParams())
        b = detect(rotated, DetectorParams())
        assert np.array_equal(a.samples, b.samples)

    def test_global_phase_invariance_any_angle(self):
        w = gated_exponential(20e-9)
        rotated = Waveform(grid=GRID, samples=np.exp(0.7j) * w.samples,
                           unit=w.unit)
        a = detect(w, DetectorParams()).samples.real
        b = detect(rotated, DetectorParams()).samples.real
        assert np.max(np.abs(a - b)) < 1e-13 * np.max(np.abs(a))

    def test_quadratic_energy_scaling(self):
        w = gated_exponential(20e-9)
        doubled = Waveform(grid=GRID, samples=2.0 * w.samples, unit=w.unit)
        a = detect(w, DetectorParams()).samples.real
        b = detect(doubled, DetectorParams()).samples.real
        assert np.max(np.abs(b - 4.0 * a)) < 1e-12 * np.max(np.abs(b))


class TestBandwidth:
    def test_finite_bandwidth_smooths_cutoff(self):
        out_inf = detect(gated_exponential(17.4e-9), WIDE_OPEN).samples.real
        out_fin = detect(gated_exponential(17.4e-9), DetectorParams()).samples.real
        k = GRID.index_at(400e-9)
        assert out_inf[k + 2] == 0.0           # ideal detector sees the drop
        assert out_fin[k + 2] > 0.01 * out_fin.max()  # poles keep it alive

    def test_detected_rise_with_default_bandwidths(self):
        # 17.4 ns amplitude pulse through the 3-etalon stack and the
        # 1 GHz diode + 2 GHz scope: rise constant lands in the ~10 ns band
        pulse = gated_exponential(17.4e-9, t_on=100e-9, t_cut=187e-9)
        filtered = filter_pulse(pulse, EtalonStack.identical(3))
        out = detect(filtered, DetectorParams())
        r = fit_exponential(out, (147e-9, 185e-9), "rising")
        assert 8.7e-9 * (1 - 1e-6) <= r.tau <= 10.5e-9

    def test_undershoot_small_and_reported(self):
        out = detect(gated_exponential(17.4e-9), DetectorParams())
        u = undershoot_fraction(out)
        assert 0.0 <= u < 0.01

    def test_bandwidth_validation(self):
        with pytest.raises(ValidationError):
            DetectorParams(bandwidth_hz=0.0)
        with pytest.raises(ValidationError):
            DetectorParams(responsivity=0.0)
