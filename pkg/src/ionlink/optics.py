"""Photon collection from a single ion: free space versus single-mode fibre.

Geometry: the quantisation axis (magnetic field) is ``z`` and light is
collected along ``x``. The collected decay channels are sigma+ (dipole
``(x + i y)/sqrt(2)``, branching 2/3) and pi (dipole ``z``, branching 1/3).
Photon polarisation labels are fixed by the on-axis fields: ``H`` is the
sigma+ polarisation seen along ``x`` (linear along ``y``), ``V`` the pi
polarisation (linear along ``z``).

Fibre coupling is modelled as the overlap of the field on a plane transverse
to the collection axis with one Gaussian spatial mode that carries both
polarisations. By default the mode is confined to (and normalised over) the
clear aperture of the collection optic, and field vectors are projected onto
the plane's ``y`` and ``z`` axes.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import minimize_scalar

from . import qcore
from .errors import NumericalError, ValidationError

BRANCHING = {"sigma_plus": 2.0 / 3.0, "pi": 1.0 / 3.0}
DIPOLES = {
    "sigma_plus": np.array([1.0, 1.0j, 0.0]) / np.sqrt(2),
    "pi": np.array([0.0, 0.0, 1.0], dtype=complex),
}
# On-axis polarisation unit vectors (x is the collection axis).
POL_H = np.array([0.0, 1.0j, 0.0])
POL_V = np.array([0.0, 0.0, 1.0 + 0j])

CONVERGENCE_TOL = 1e-5
WAIST_SCAN = np.geomspace(0.05, 50.0, 50)


@dataclass(frozen=True)
class EmissionChannel:
    kind: str
    branching_weight: float | None = None

    def __post_init__(self):
        if self.kind not in DIPOLES:
            raise ValidationError(f"unknown emission channel {self.kind!r}")
        if self.branching_weight is None:
            object.__setattr__(self, "branching_weight", BRANCHING[self.kind])

    @property
    def dipole(self) -> np.ndarray:
        return DIPOLES[self.kind]


CHANNELS = (EmissionChannel("sigma_plus"), EmissionChannel("pi"))


@dataclass(frozen=True)
class CollectionGeometry:
    numerical_aperture: float
    quadrature_points: int = 256
    gaussian_waist: float | None = None
    mapping: str = "aplanatic"
    mode_support: str = "aperture"

    def __post_init__(self):
        if not 0.0 < self.numerical_aperture < 1.0:
            raise ValidationError(f"numerical aperture {self.numerical_aperture} outside (0, 1)")
        if self.quadrature_points < 64:
            raise ValidationError("quadrature_points must be at least 64")
        if self.mapping not in ("aplanatic", "direction_cosine"):
            raise ValidationError(f"unknown aperture mapping {self.mapping!r}")
        if self.mode_support not in ("aperture", "infinite"):
            raise ValidationError(f"unknown mode support {self.mode_support!r}")


def _geometry(na) -> CollectionGeometry:
    return na if isinstance(na, CollectionGeometry) else CollectionGeometry(float(na))


def dipole_field(channel: EmissionChannel, direction) -> np.ndarray:
    """Far-field amplitude vector; ``|E|^2`` integrates to 1 over the sphere.

    ``direction`` may be a single unit 3-vector or an array of shape (..., 3).
    """
    n = np.asarray(direction, dtype=float)
    if not np.allclose(np.linalg.norm(n, axis=-1), 1.0, atol=1e-9):
        raise ValidationError("direction must be a unit vector")
    d = channel.dipole
    proj = d - n * (n @ d)[..., None]
    return np.sqrt(3.0 / (8.0 * np.pi)) * proj


def dipole_intensity(channel: EmissionChannel, direction) -> np.ndarray:
    return np.sum(np.abs(dipole_field(channel, direction)) ** 2, axis=-1)


class _ConeGrid:
    """Gauss-Legendre (polar) x uniform (azimuth) grid over the collection cone."""

    def __init__(self, na: float, n: int):
        n_phi = 4 * ((n + 3) // 4)  # keeps the y <-> z mirror symmetry exact
        tmax = np.arcsin(na)
        x, w = np.polynomial.legendre.leggauss(n)
        theta = 0.5 * tmax * (x + 1)
        w_theta = 0.5 * tmax * w
        phi = 2 * np.pi * np.arange(n_phi) / n_phi
        self.theta, self.phi = np.meshgrid(theta, phi, indexing="ij")
        self.weight = np.outer(w_theta, np.full(n_phi, 2 * np.pi / n_phi))
        st = np.sin(self.theta)
        self.dirs = np.stack(
            [np.cos(self.theta), st * np.cos(self.phi), st * np.sin(self.phi)], axis=-1
        )
        self.domega = self.weight * st  # solid-angle weights
        self.na = na


def _cone_power(grid: _ConeGrid, channel: EmissionChannel) -> float:
    return float(np.sum(dipole_intensity(channel, grid.dirs) * grid.domega))


def _free_space(na: float, n: int) -> float:
    grid = _ConeGrid(na, n)
    return sum(c.branching_weight * _cone_power(grid, c) for c in CHANNELS)


def _converged(fn, n: int, what: str):
    a = fn(n)
    b = fn(2 * n)
    if np.max(np.abs(np.asarray(b) - np.asarray(a))) > CONVERGENCE_TOL:
        raise NumericalError(f"{what}: quadrature not converged (doubling points changed result)")
    return b


def free_space_collection(na) -> float:
    """Branching-weighted fraction of S-state decays entering the cone."""
    geo = _geometry(na)
    return float(_converged(lambda n: _free_space(geo.numerical_aperture, n),
                            geo.quadrature_points, "free-space collection"))


class _PlaneField:
    """Channel fields sampled on the transverse plane behind the aperture."""

    def __init__(self, geo: CollectionGeometry, n: int):
        grid = _ConeGrid(geo.numerical_aperture, n)
        t = grid.theta
        # radius in units of the aperture radius; dA = r dr dphi
        self.r = np.sin(t) / geo.numerical_aperture
        self.da = grid.weight * np.sin(t) * np.cos(t) / geo.numerical_aperture**2
        if geo.mapping == "aplanatic":
            amp = 1.0 / np.sqrt(np.cos(t))
        else:
            amp = np.ones_like(t)
        self.fields = {}
        self.cone_power = {}
        for c in CHANNELS:
            e = dipole_field(c, grid.dirs) * amp[..., None]
            self.fields[c.kind] = e
            self.cone_power[c.kind] = _cone_power(grid, c)
        self.support = geo.mode_support

    def overlaps(self, waist: float) -> dict:
        """Normalised amplitude overlaps ``{(channel, 'H'|'V'): complex}``.

        ``|overlap|^2`` is the fraction of that channel's total emission that
        couples into the mode with the given polarisation.
        """
        g = np.exp(-((self.r / waist) ** 2))
        if self.support == "aperture":
            g_norm = np.sum(g**2 * self.da)
        else:
            g_norm = np.pi * waist**2 / 2
        out = {}
        for kind, e in self.fields.items():
            e_norm = np.sum(np.sum(np.abs(e) ** 2, axis=-1) * self.da)
            scale = np.sqrt(self.cone_power[kind] / (e_norm * g_norm))
            for label, pol in (("H", POL_H), ("V", POL_V)):
                amp = np.sum((e @ pol.conj()) * g * self.da)
                out[(kind, label)] = complex(amp * scale)
        return out

    def efficiency(self, waist: float) -> float:
        ov = self.overlaps(waist)
        return sum(
            c.branching_weight * (abs(ov[(c.kind, "H")]) ** 2 + abs(ov[(c.kind, "V")]) ** 2)
            for c in CHANNELS
        )


def optimal_waist(na) -> float:
    """Gaussian waist (units of aperture radius) maximising fibre coupling."""
    geo = _geometry(na)
    plane = _PlaneField(geo, geo.quadrature_points)
    scan = np.array([plane.efficiency(w) for w in WAIST_SCAN])
    k = int(np.argmax(scan))
    lo = WAIST_SCAN[max(k - 1, 0)]
    hi = WAIST_SCAN[min(k + 1, len(WAIST_SCAN) - 1)]
    res = minimize_scalar(lambda w: -plane.efficiency(w), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-6})
    return float(res.x) if -res.fun >= scan[k] else float(WAIST_SCAN[k])


def _fiber_geometry(na) -> CollectionGeometry:
    geo = _geometry(na)
    if geo.gaussian_waist is None:
        geo = replace(geo, gaussian_waist=optimal_waist(geo))
    return geo


def fiber_coupled_collection(na) -> float:
    """Branching-weighted fraction of S-state decays coupled into the fibre mode."""
    geo = _fiber_geometry(na)
    return float(_converged(lambda n: _PlaneField(geo, n).efficiency(geo.gaussian_waist),
                            geo.quadrature_points, "fibre collection"))


def _bell_fidelity(state: np.ndarray) -> float:
    return float(np.real(qcore.BELL["phi_plus"].conj() @ state @ qcore.BELL["phi_plus"]))


def fiber_state(na) -> np.ndarray:
    """Ion-photon density matrix after single-mode filtering, basis (dH, dV, uH, uV)."""
    geo = _fiber_geometry(na)
    ov = _PlaneField(geo, geo.quadrature_points).overlaps(geo.gaussian_waist)
    psi = np.zeros(4, dtype=complex)
    for ion, c in enumerate(CHANNELS):  # sigma+ -> down, pi -> up
        w = np.sqrt(c.branching_weight)
        psi[2 * ion] = w * ov[(c.kind, "H")]
        psi[2 * ion + 1] = w * ov[(c.kind, "V")]
    return qcore.normalize_trace(qcore.projector(psi))


def fiber_fidelity(na) -> float:
    return _bell_fidelity(fiber_state(na))


def _free_space_state(na: float, n: int) -> np.ndarray:
    grid = _ConeGrid(na, n)
    amps = []
    for c in CHANNELS:
        e = dipole_field(c, grid.dirs)
        amps.append(np.sqrt(c.branching_weight) * np.stack([e @ POL_H.conj(), e @ POL_V.conj()], -1))
    # psi(direction) over (dH, dV, uH, uV)
    psi = np.concatenate(amps, axis=-1)
    rho = np.einsum("ij,ija,ijb->ab", grid.domega, psi, psi.conj())
    return qcore.normalize_trace(rho)


def free_space_state(na) -> np.ndarray:
    geo = _geometry(na)
    return _free_space_state(geo.numerical_aperture, geo.quadrature_points)


def free_space_fidelity(na) -> float:
    """Bell-state fidelity of the ion-photon state integrated over the cone."""
    geo = _geometry(na)
    return float(_converged(
        lambda n: _bell_fidelity(_free_space_state(geo.numerical_aperture, n)),
        geo.quadrature_points, "free-space fidelity"))


CURVE_HEADER = ("na", "free_space_eff", "fiber_eff", "free_space_fidelity")


def curve_scan(na_grid, quadrature_points: int = 256) -> list:
    """Rows ``(na, free_space_eff, fiber_eff, free_space_fidelity)``."""
    rows = []
    for na in na_grid:
        geo = CollectionGeometry(float(na), quadrature_points)
        rows.append((float(na), free_space_collection(geo), fiber_coupled_collection(geo),
                     free_space_fidelity(geo)))
    return rows


def curve_to_csv(rows) -> str:
    lines = [",".join(CURVE_HEADER)]
    lines += [",".join(f"{v:.10g}" for v in row) for row in rows]
    return "\n".join(lines) + "\n"
