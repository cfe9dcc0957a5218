import math

import numpy as np
import pytest

from magsq import quantities as qt
from magsq.errors import ConfigurationError, DomainError

TWO_PI = 2 * math.pi


class TestThermalOccupancy:
    def test_zero_temperature_is_exactly_zero(self):
        assert qt.thermal_occupancy(TWO_PI * 1e9, 0.0) == 0.0

    def test_golden_100mhz_10mk(self):
        # frozen from a 40-digit evaluation of the Bose-Einstein formula
        assert qt.thermal_occupancy(TWO_PI * 100e6, 0.01) == pytest.approx(
            1.6235029143858468, rel=1e-7)

    def test_golden_10ghz_half_kelvin(self):
        assert qt.thermal_occupancy(TWO_PI * 10e9, 0.5) == pytest.approx(
            0.6206164576377908, rel=1e-7)

    def test_deep_quantum_regime_underflows_cleanly(self):
        n = qt.thermal_occupancy(TWO_PI * 1e15, 1e-3)
        assert n == 0.0

    def test_monotone_decreasing_in_frequency(self):
        freqs = TWO_PI * np.logspace(6, 12, 25)
        values = [qt.thermal_occupancy(f, 0.3) for f in freqs]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_monotone_increasing_in_temperature(self):
        temps = np.logspace(-3, 1, 25)
        values = [qt.thermal_occupancy(TWO_PI * 1e9, t) for t in temps]
        assert all(a < b for a, b in zip(values, values[1:]))

    def test_rejects_nonpositive_frequency(self):
        with pytest.raises(DomainError):
            qt.thermal_occupancy(0.0, 1.0)
        with pytest.raises(DomainError):
            qt.thermal_occupancy(-1.0, 1.0)


class TestDriveAmplitude:
    def test_zero_power(self):
        tone = qt.DriveTone(power=0.0, frequency=TWO_PI * 3e14)
        assert qt.drive_amplitude(tone, TWO_PI * 1e8) == 0.0

    @pytest.mark.parametrize("power", [1e-9, 1e-6, 1e-3, 1.0])
    def test_power_round_trip(self, power):
        # |E|^2 hbar omega / kappa recovers the power to machine precision
        kappa = TWO_PI * 100e6
        tone = qt.DriveTone(power=power, frequency=TWO_PI * 2.8e14, phase=0.3)
        amplitude = qt.drive_amplitude(tone, kappa)
        recovered = abs(amplitude) ** 2 * qt.HBAR * tone.frequency / kappa
        assert recovered == pytest.approx(power, rel=1e-14)

    def test_phase_carried(self):
        tone = qt.DriveTone(power=1e-3, frequency=TWO_PI * 2.8e14, phase=1.1)
        amplitude = qt.drive_amplitude(tone, 1e8)
        assert math.isclose(math.atan2(amplitude.imag, amplitude.real), 1.1)

    def test_tone_invariants(self):
        with pytest.raises(DomainError):
            qt.DriveTone(power=-1e-3, frequency=1.0)
        with pytest.raises(DomainError):
            qt.DriveTone(power=1e-3, frequency=0.0)


class TestCouplingPowerConversions:
    # GHz-mechanics configuration: red tone at 26.41 mW gives G-/2pi = 15 MHz
    GHZ = dict(g0=TWO_PI * 100e3, kappa=TWO_PI * 100e6, omega_mech=TWO_PI * 10e9)
    # MHz-mechanics configuration: red tone at 0.53 mW gives G-/2pi = 0.3 MHz
    MHZ = dict(g0=TWO_PI * 1e3, kappa=TWO_PI * 2e6, omega_mech=TWO_PI * 100e6)
    OMEGA_CAV = qt.vacuum_wavelength_to_angular_frequency(1064e-9)

    def test_zero_drive_gives_zero_coupling(self):
        tone = qt.DriveTone(0.0, self.OMEGA_CAV - TWO_PI * 10e9)
        g = qt.coupling_from_power(tone, **_as_args(self.GHZ), sideband="stokes")
        assert g == 0.0

    def test_ghz_config_red_tone_golden(self):
        tone = qt.DriveTone(26.41e-3, self.OMEGA_CAV - TWO_PI * 10e9)
        g = qt.coupling_from_power(tone, **_as_args(self.GHZ), sideband="stokes")
        assert abs(g) / TWO_PI == pytest.approx(15e6, rel=0.01)

    def test_mhz_config_red_tone_golden(self):
        tone = qt.DriveTone(0.53e-3, self.OMEGA_CAV - TWO_PI * 100e6)
        g = qt.coupling_from_power(tone, **_as_args(self.MHZ), sideband="stokes")
        assert abs(g) / TWO_PI == pytest.approx(0.3e6, rel=0.02)

    def test_mhz_config_blue_tone_golden(self):
        # the 0.95 coupling ratio corresponds to ~0.48 mW on the blue sideband
        p_plus = qt.power_from_coupling(
            0.95 * TWO_PI * 0.3e6, **_as_args(self.MHZ),
            drive_frequency=self.OMEGA_CAV + TWO_PI * 100e6)
        assert p_plus == pytest.approx(0.48e-3, rel=0.02)

    def test_zero_coupling_gives_zero_power(self):
        p = qt.power_from_coupling(0.0, **_as_args(self.GHZ),
                                   drive_frequency=self.OMEGA_CAV)
        assert p == 0.0

    @pytest.mark.parametrize("power", np.logspace(-6, 0, 7))
    def test_round_trip_over_six_decades(self, power):
        omega_drive = self.OMEGA_CAV - TWO_PI * 10e9
        tone = qt.DriveTone(power, omega_drive, phase=0.7)
        g = qt.coupling_from_power(tone, **_as_args(self.GHZ), sideband="stokes")
        recovered = qt.power_from_coupling(abs(g), **_as_args(self.GHZ),
                                           drive_frequency=omega_drive)
        assert recovered == pytest.approx(power, rel=1e-12)

    def test_sideband_magnitudes_match(self):
        # |kappa/2 -/+ i omega| is the same for both sidebands
        tone = qt.DriveTone(1e-3, self.OMEGA_CAV - TWO_PI * 10e9)
        g_red = qt.coupling_from_power(tone, **_as_args(self.GHZ), sideband="stokes")
        g_blue = qt.coupling_from_power(tone, **_as_args(self.GHZ),
                                        sideband="anti_stokes")
        assert abs(g_red) == pytest.approx(abs(g_blue), rel=1e-14)


def _as_args(cfg):
    return {"g0": cfg["g0"], "cavity_linewidth": cfg["kappa"],
            "mech_frequency": cfg["omega_mech"]}


class TestRabiFrequency:
    def test_zero_field(self):
        spec = qt.MagnonDriveSpec(field_amplitude=0.0, spin_count=1e12,
                                  gyromagnetic_ratio=TWO_PI * 28e9)
        assert qt.rabi_frequency(spec) == 0.0

    def test_direct_passthrough(self):
        value = 3.2e13 * complex(math.cos(0.4), math.sin(0.4))
        assert qt.rabi_frequency(qt.MagnonDriveSpec(rabi=value)) == value

    def test_field_route_magnitude(self):
        gamma = TWO_PI * 28e9
        spec = qt.MagnonDriveSpec(field_amplitude=1e-6, spin_count=1e15,
                                  gyromagnetic_ratio=gamma, phase=0.25)
        expected = math.sqrt(5) / 4 * gamma * math.sqrt(1e15) * 1e-6
        value = qt.rabi_frequency(spec)
        assert abs(value) == pytest.approx(expected, rel=1e-14)
        assert math.atan2(value.imag, value.real) == pytest.approx(0.25)

    def test_exactly_one_route_required(self):
        with pytest.raises(ConfigurationError):
            qt.MagnonDriveSpec()
        with pytest.raises(ConfigurationError):
            qt.MagnonDriveSpec(rabi=1.0, field_amplitude=1e-6, spin_count=1e12,
                               gyromagnetic_ratio=1.0)
        with pytest.raises(ConfigurationError):
            qt.MagnonDriveSpec(field_amplitude=1e-6, spin_count=1e12)

    def test_positive_spin_count_required(self):
        with pytest.raises(DomainError):
            qt.MagnonDriveSpec(field_amplitude=1e-6, spin_count=0.0,
                               gyromagnetic_ratio=1.0)
