import numpy as np
import pytest

from ionlink import optics
from ionlink.errors import ValidationError
from ionlink.optics import CHANNELS, CollectionGeometry, EmissionChannel

SIGMA, PI = CHANNELS


def test_dipole_patterns():
    x, z = np.array([1.0, 0, 0]), np.array([0, 0, 1.0])
    assert optics.dipole_intensity(PI, z) == pytest.approx(0)
    assert optics.dipole_intensity(PI, x) == pytest.approx(3 / (8 * np.pi))
    assert optics.dipole_intensity(SIGMA, x) == pytest.approx(0.5 * optics.dipole_intensity(SIGMA, z))
    with pytest.raises(ValidationError):
        optics.dipole_field(PI, [1.0, 1.0, 0])


@pytest.mark.parametrize("channel", CHANNELS)
def test_full_sphere_normalisation(channel):
    x, w = np.polynomial.legendre.leggauss(64)
    theta = (x + 1) * np.pi / 2
    phi = np.linspace(0, 2 * np.pi, 128, endpoint=False)
    t, p = np.meshgrid(theta, phi, indexing="ij")
    n = np.stack([np.sin(t) * np.cos(p), np.sin(t) * np.sin(p), np.cos(t)], -1)
    weights = np.outer(w * np.pi / 2, np.full(phi.size, 2 * np.pi / phi.size)) * np.sin(t)
    assert np.sum(optics.dipole_intensity(channel, n) * weights) == pytest.approx(1, abs=1e-6)


def test_branching_weights():
    assert sum(c.branching_weight for c in CHANNELS) == pytest.approx(1)
    with pytest.raises(ValidationError):
        EmissionChannel("delta")


def test_geometry_validation():
    for bad in (dict(numerical_aperture=0), dict(numerical_aperture=1.0),
                dict(numerical_aperture=0.5, quadrature_points=10),
                dict(numerical_aperture=0.5, mapping="other")):
        with pytest.raises(ValidationError):
            CollectionGeometry(**bad)


def test_free_space_collection():
    assert optics.free_space_collection(1e-3) == pytest.approx(0, abs=1e-6)
    assert optics.free_space_collection(0.6) == pytest.approx(0.1, abs=1e-9)
    grid = np.linspace(0.05, 0.95, 20)
    vals = [optics.free_space_collection(CollectionGeometry(na, 64)) for na in grid]
    assert np.all(np.diff(vals) > 0)


def test_fiber_collection_small_na_limit():
    fs = optics.free_space_collection(0.05)
    fb = optics.fiber_coupled_collection(0.05)
    assert fb / fs == pytest.approx(1, abs=0.02)


def test_fixed_waist_below_optimum():
    best = optics.fiber_coupled_collection(0.4)
    fixed = optics.fiber_coupled_collection(CollectionGeometry(0.4, gaussian_waist=0.5))
    assert fixed < best


def test_optimal_waist_beats_scan():
    geo = CollectionGeometry(0.6)
    plane = optics._PlaneField(geo, geo.quadrature_points)
    scan = max(plane.efficiency(w) for w in np.geomspace(0.05, 50, 50))
    assert optics.fiber_coupled_collection(geo) >= scan - 1e-4


def test_fidelities():
    assert optics.free_space_fidelity(0.02) == pytest.approx(1, abs=1e-3)
    assert optics.free_space_fidelity(0.6) < optics.free_space_fidelity(0.3)
    for na in (0.3, 0.7):
        assert optics.fiber_fidelity(na) == pytest.approx(1, abs=1e-9)


def test_curve_scan_rows():
    rows = optics.curve_scan(np.arange(1, 10) / 10, quadrature_points=64)
    assert len(rows) == 9
    for na, fs, fb, fid in rows:
        assert 0 < fb < fs < 1
        assert 0.25 <= fid <= 1
    csv = optics.curve_to_csv(rows)
    assert csv.splitlines()[0] == "na,free_space_eff,fiber_eff,free_space_fidelity"
    assert len(csv.splitlines()) == 10
