from __future__ import annotations

import math

import numpy as np
import pytest

from fluxdot.core import (
    BathParams,
    DeviceParams,
    ValidationReport,
    fermi,
    phase_from_flux,
    validate,
)
from fluxdot.core import require_valid

REFERENCE_DEVICE = DeviceParams(0.0, 0.0, 0.95, 0.05, -math.pi / 2)
REFERENCE_BATH = BathParams(3.0, -3.0, 0.05, 50.0)


def test_device_derived_scales():
    dev = DeviceParams(0.3, -0.1, 0.7, 0.2, 1.1)
    assert dev.gamma == pytest.approx(0.9)
    assert dev.delta_gamma == pytest.approx(0.5)
    assert dev.delta_e == pytest.approx(0.4)


def test_symmetric_bias_helper():
    bath = BathParams.symmetric_bias(6.0, temperature=0.05, cutoff=50.0)
    assert bath.mu_l == 3.0
    assert bath.mu_r == -3.0
    assert bath.bias == pytest.approx(6.0)


def test_reference_point_validates_clean():
    assert validate(REFERENCE_DEVICE, REFERENCE_BATH) == ValidationReport(
        ok=True, violations=())


@pytest.mark.parametrize(
    "device, bath, fragment",
    [
        (DeviceParams(0, 0, 0.0, 0.0, 0.0), REFERENCE_BATH, "positive"),
        (DeviceParams(0, 0, -0.2, 0.5, 0.0), REFERENCE_BATH, "non-negative"),
        (REFERENCE_DEVICE, BathParams(3.0, -3.0, -0.1, 50.0), "temperature"),
        (REFERENCE_DEVICE, BathParams(3.0, -3.0, 0.05, 1.0), "cutoff too small"),
        (REFERENCE_DEVICE, BathParams(math.nan, -3.0, 0.05, 50.0), "finite"),
    ],
)
def test_validation_failures(device, bath, fragment):
    report = validate(device, bath)
    assert not report.ok
    assert any(fragment in v for v in report.violations)


def test_cutoff_margin_is_ten_linewidths():
    dev = DeviceParams(0.0, 0.0, 0.5, 0.5, 0.0)
    assert not validate(dev, BathParams(3.0, -3.0, 0.0, 13.0)).ok
    assert validate(dev, BathParams(3.0, -3.0, 0.0, 13.1)).ok


def test_require_valid():
    require_valid(REFERENCE_DEVICE, REFERENCE_BATH)
    with pytest.raises(ValueError, match="cutoff too small"):
        require_valid(REFERENCE_DEVICE, BathParams(3.0, -3.0, 0.05, 1.0))


def test_phase_from_flux():
    assert phase_from_flux(0.0) == 0.0
    assert phase_from_flux(1.0) == pytest.approx(2.0 * math.pi)
    assert phase_from_flux(0.25) == pytest.approx(math.pi / 2)
    assert phase_from_flux(2.0, flux_quantum=4.0) == pytest.approx(math.pi)


def test_fermi_zero_temperature_step():
    assert fermi(-1.0, 0.0, 0.0) == 1.0
    assert fermi(1.0, 0.0, 0.0) == 0.0
    assert fermi(0.0, 0.0, 0.0) == 0.5
    w = np.array([-2.0, 0.5, 0.5000001, 3.0])
    np.testing.assert_allclose(fermi(w, 0.5, 0.0), [1.0, 0.5, 0.0, 0.0])


def test_fermi_finite_temperature():
    assert fermi(0.7, 0.7, 0.1) == pytest.approx(0.5)
    assert fermi(0.8, 0.7, 0.1) == pytest.approx(1.0 / (1.0 + math.e))
    # far tails must not overflow
    assert fermi(4000.0, 0.0, 0.1) == 0.0
    assert fermi(-4000.0, 0.0, 0.1) == 1.0
    w = np.linspace(-3.0, 3.0, 61)
    assert np.all(np.diff(fermi(w, 0.0, 0.2)) < 0)


def test_unit_convention_round_trip():
    """Doubling every energy (and halving times) leaves dimensionless
    outputs unchanged and scales the current by the same factor."""
    from fluxdot.analytics import steady_current, transmission
    from fluxdot.propagator import QuadratureSpec, occupation_v

    quad = QuadratureSpec()
    dev1 = DeviceParams(0.2, -0.1, 0.6, 0.4, 0.9)
    bath1 = BathParams(1.5, -0.5, 0.1, 30.0)
    dev2 = DeviceParams(0.4, -0.2, 1.2, 0.8, 0.9)
    bath2 = BathParams(3.0, -1.0, 0.2, 60.0)

    v1 = occupation_v(dev1, bath1, 2.0, quad).v
    v2 = occupation_v(dev2, bath2, 1.0, quad).v
    np.testing.assert_allclose(v2, v1, atol=1e-12)

    for w in (0.0, 0.7, -1.3):
        assert transmission(dev2, 2.0 * w) == pytest.approx(
            transmission(dev1, w), abs=1e-12)

    i1 = steady_current(dev1, bath1, quad)
    i2 = steady_current(dev2, bath2, quad)
    assert i2 == pytest.approx(2.0 * i1, abs=1e-12)
