"""Small dense complex linear algebra and quantum-state helpers.

Matrices are plain ``numpy`` arrays. Dimensions of interest are 2 (one
qubit), 4 (ion-photon or ion-ion pair) and 16 (two ion-photon pairs).

Basis ordering is fixed throughout the package:

* single qubit: index 0 is the ion state "down" (or photon ``H``), index 1
  is "up" (or ``V``);
* ion-photon pair: ``(down H, down V, up H, up V)``;
* ion-ion pair: ``(down down, down up, up down, up up)``.

The Pauli ``Z`` eigenvalue +1 therefore belongs to "down".
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import NumericalError, ParseError, ValidationError

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-9
TRACE_TOL = 1e-10
NORM_TOL = 1e-12

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

_S2 = 1 / np.sqrt(2)

# (down down, down up, up down, up up)
BELL = {
    "phi_plus": np.array([_S2, 0, 0, _S2], dtype=complex),
    "phi_minus": np.array([_S2, 0, 0, -_S2], dtype=complex),
    "psi_plus": np.array([0, _S2, _S2, 0], dtype=complex),
    "psi_minus": np.array([0, _S2, -_S2, 0], dtype=complex),
}


def pauli(label: str) -> np.ndarray:
    try:
        return PAULI[label].copy()
    except KeyError:
        raise ValidationError(f"unknown Pauli label {label!r}") from None


def allclose(a, b, atol: float = 1e-12) -> bool:
    """Entrywise comparison with an explicit absolute tolerance."""
    a = np.asarray(a)
    b = np.asarray(b)
    return a.shape == b.shape and bool(np.all(np.abs(a - b) <= atol))


def _square(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {m.shape}")
    return m


def is_hermitian(m, tol: float = HERMITIAN_TOL) -> bool:
    m = _square(m)
    return bool(np.max(np.abs(m - m.conj().T), initial=0.0) < tol)


def _jacobi_rotation(a: np.ndarray, v: np.ndarray, p: int, q: int) -> None:
    """Zero ``a[p, q]`` in place with one complex Jacobi rotation."""
    apq = a[p, q]
    r = abs(apq)
    phase = apq / r
    theta = 0.5 * np.arctan2(2 * r, (a[p, p] - a[q, q]).real)
    c, s = np.cos(theta), np.sin(theta)
    # D = diag(1, conj(phase)) makes the block real; G rotates it diagonal.
    u = np.array([[c, -s], [s * np.conj(phase), c * np.conj(phase)]])
    idx = [p, q]
    a[:, idx] = a[:, idx] @ u
    a[idx, :] = u.conj().T @ a[idx, :]
    v[:, idx] = v[:, idx] @ u
    a[p, q] = a[q, p] = 0.0


def eigh(m, tol: float = HERMITIAN_TOL, max_sweeps: int = 64):
    """Eigen-decomposition of a Hermitian matrix by cyclic Jacobi sweeps.

    Returns ``(w, v)`` with real eigenvalues ``w`` in descending order and the
    matching orthonormal eigenvectors as the columns of ``v``.
    """
    m = _square(m)
    if not is_hermitian(m, tol):
        raise ValidationError("eigh requires a Hermitian matrix")
    n = m.shape[0]
    a = 0.5 * (m + m.conj().T)
    v = np.eye(n, dtype=complex)
    scale = max(np.max(np.abs(a), initial=0.0), 1e-300)
    for _ in range(max_sweeps):
        off = np.abs(a - np.diag(np.diag(a)))
        if off.max(initial=0.0) <= 1e-15 * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p, q]) > 1e-300:
                    _jacobi_rotation(a, v, p, q)
    else:
        raise NumericalError("Jacobi eigen-decomposition did not converge")
    w = np.diag(a).real
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


def eigvalsh(m) -> np.ndarray:
    return eigh(m)[0]


def tensor(*ops) -> np.ndarray:
    """Kronecker product of any number of matrices (or vectors)."""
    out = np.asarray(ops[0], dtype=complex)
    for op in ops[1:]:
        out = np.kron(out, np.asarray(op, dtype=complex))
    return out


def matrix_sqrt_psd(m) -> np.ndarray:
    """Principal square root of a PSD Hermitian matrix.

    Eigenvalues in ``[-1e-9, 0)`` are roundoff and are clamped to zero.
    """
    w, v = eigh(m)
    if w.min() < -PSD_TOL:
        raise ValidationError(f"matrix is not PSD (smallest eigenvalue {w.min():.3e})")
    w = np.sqrt(np.clip(w, 0.0, None))
    return (v * w) @ v.conj().T


def validate_density(rho, dim: int | None = None) -> np.ndarray:
    """Check the density-matrix invariants and return ``rho`` as an array.

    Hermitian to 1e-10, smallest eigenvalue >= -1e-9, unit trace to 1e-10.
    """
    rho = _square(rho)
    if dim is not None and rho.shape[0] != dim:
        raise ValidationError(f"expected dimension {dim}, got {rho.shape[0]}")
    if not is_hermitian(rho):
        raise ValidationError("density matrix is not Hermitian")
    tr = np.trace(rho)
    if abs(tr - 1) > TRACE_TOL:
        raise ValidationError(f"density matrix trace is {tr.real:.12g}, not 1")
    lo = eigvalsh(rho)[-1]
    if lo < -PSD_TOL:
        raise ValidationError(f"density matrix has negative eigenvalue {lo:.3e}")
    return rho


def is_density(rho, dim: int | None = None) -> bool:
    try:
        validate_density(rho, dim)
    except ValidationError:
        return False
    return True


def pure_state(amplitudes) -> np.ndarray:
    psi = np.asarray(amplitudes, dtype=complex).ravel()
    if abs(np.linalg.norm(psi) - 1) > NORM_TOL:
        raise ValidationError("state vector is not normalised")
    return psi


def projector(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).ravel()
    return np.outer(psi, psi.conj())


def maximally_mixed(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=complex) / dim


def normalize_trace(m) -> np.ndarray:
    """Hermitize and rescale to unit trace (repairs roundoff drift)."""
    m = np.asarray(m, dtype=complex)
    m = 0.5 * (m + m.conj().T)
    tr = np.trace(m).real
    if tr <= 0:
        raise NumericalError("cannot normalise a matrix with non-positive trace")
    return m / tr


def partial_trace(rho, keep, dims: Sequence[int]) -> np.ndarray:
    """Trace out every factor of ``rho`` not listed in ``keep``.

    ``keep`` is an index or a sequence of indices into ``dims``; the kept
    factors stay in their original order.
    """
    rho = _square(rho)
    dims = [int(d) for d in dims]
    if int(np.prod(dims)) != rho.shape[0]:
        raise ValidationError(f"factor dimensions {dims} do not match matrix size {rho.shape[0]}")
    if np.isscalar(keep):
        keep = [keep]
    keep = sorted(int(k) for k in keep)
    if any(k < 0 or k >= len(dims) for k in keep):
        raise ValidationError(f"subsystem selector {keep} out of range")
    n = len(dims)
    t = rho.reshape(dims + dims)
    letters = "abcdefghijklmnopqrstuvwxyz"
    row = list(letters[:n])
    col = list(letters[n:2 * n])
    for i in range(n):
        if i not in keep:
            col[i] = row[i]
    out_sub = "".join(row[i] for i in keep) + "".join(col[i] for i in keep)
    red = np.einsum("".join(row) + "".join(col) + "->" + out_sub, t)
    d = int(np.prod([dims[k] for k in keep]))
    return red.reshape(d, d)


def permute_subsystems(rho, perm: Sequence[int], dims: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors: new factor ``i`` is old factor ``perm[i]``."""
    dims = list(dims)
    n = len(dims)
    t = np.asarray(rho).reshape(dims + dims)
    t = t.transpose(list(perm) + [n + p for p in perm])
    d = int(np.prod(dims))
    return t.reshape(d, d)


def expectation(rho, op) -> float:
    """Real expectation value ``Tr(rho op)`` of a Hermitian operator."""
    rho = np.asarray(rho, dtype=complex)
    op = np.asarray(op, dtype=complex)
    if rho.shape != op.shape:
        raise ValidationError(f"shape mismatch {rho.shape} vs {op.shape}")
    val = np.sum(rho * op.T)
    if abs(val.imag) > 1e-8:
        raise NumericalError(f"expectation has imaginary part {val.imag:.3e}")
    return float(val.real)


def trace_distance(a, b) -> float:
    w = eigvalsh(np.asarray(a, dtype=complex) - np.asarray(b, dtype=complex))
    return 0.5 * float(np.sum(np.abs(w)))


def random_density(dim: int, rng=None, rank: int | None = None) -> np.ndarray:
    """Random state from normalised Ginibre matrices (Hilbert-Schmidt measure for full rank)."""
    rng = np.random.default_rng(rng)
    k = dim if rank is None else rank
    g = rng.standard_normal((dim, k)) + 1j * rng.standard_normal((dim, k))
    return normalize_trace(g @ g.conj().T)


def random_unitary(dim: int, rng=None) -> np.ndarray:
    """Haar-random unitary via QR of a Ginibre matrix."""
    rng = np.random.default_rng(rng)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def density_to_text(rho) -> str:
    """Serialise as ``row,col,re,im`` lines in ascending (row, col) order."""
    rho = np.asarray(rho, dtype=complex)
    lines = []
    for i in range(rho.shape[0]):
        for j in range(rho.shape[1]):
            z = rho[i, j]
            lines.append(f"{i},{j},{z.real:.17g},{z.imag:.17g}")
    return "\n".join(lines) + "\n"


def density_from_text(text: str) -> np.ndarray:
    entries = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(",")
        if len(parts) != 4:
            raise ParseError(f"line {lineno}: expected 'row,col,re,im'")
        try:
            i, j = int(parts[0]), int(parts[1])
            entries[(i, j)] = complex(float(parts[2]), float(parts[3]))
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
    if not entries:
        raise ValidationError("no matrix entries found")
    dim = int(round(np.sqrt(len(entries))))
    if dim * dim != len(entries) or set(entries) != {(i, j) for i in range(dim) for j in range(dim)}:
        raise ValidationError("matrix entries do not form a complete square matrix")
    m = np.zeros((dim, dim), dtype=complex)
    for (i, j), z in entries.items():
        m[i, j] = z
    return m
