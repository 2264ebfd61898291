"""Spin-s operator algebra, rotation representations, and spin states.

Basis convention: the Jz eigenbasis ordered from m = +s down to -s, so
for spin 1/2 the first basis vector is "up along z". Rotation
representations are U = exp(-i angle (axis . J)).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kinematics import LorentzTransform, wigner_rotation_batch

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10


@dataclass(frozen=True)
class ParticleSet:
    """Masses and spins of the N particles carrying the state."""

    masses: tuple[float, ...]
    spins: tuple[float, ...]

    def __post_init__(self):
        masses = tuple(float(m) for m in self.masses)
        spins = tuple(float(s) for s in self.spins)
        if len(masses) != len(spins) or len(masses) < 1:
            raise ValueError("need one (mass, spin) pair per particle, at least one")
        if any(m <= 0 for m in masses):
            raise ValueError("masses must be positive")
        for s in spins:
            if s < 0 or abs(2 * s - round(2 * s)) > 1e-12:
                raise ValueError(f"spin {s} is not a non-negative half-integer")
        object.__setattr__(self, "masses", masses)
        object.__setattr__(self, "spins", spins)

    @property
    def n_particles(self) -> int:
        return len(self.masses)

    @property
    def dim(self) -> int:
        d = 1
        for s in self.spins:
            d *= int(round(2 * s)) + 1
        return d


@dataclass(frozen=True)
class SpinState:
    """Density matrix over the joint spin space of the particles."""

    matrix: np.ndarray
    spins: tuple[float, ...]

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        spins = tuple(float(s) for s in self.spins)
        d = 1
        for s in spins:
            d *= int(round(2 * s)) + 1
        if m.shape != (d, d):
            raise ValueError(f"state matrix must be {d}x{d} for spins {spins}")
        if np.max(np.abs(m - m.conj().T)) > HERMITICITY_TOL:
            raise ValueError("state matrix must be Hermitian")
        if abs(np.trace(m).real - 1.0) > TRACE_TOL or abs(np.trace(m).imag) > TRACE_TOL:
            raise ValueError("state matrix must have unit trace")
        evals = np.linalg.eigvalsh(m)
        if evals.min() < -PSD_TOL:
            raise ValueError(f"state matrix must be PSD (min eigenvalue {evals.min():.2e})")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "spins", spins)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def spin_operators(s: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Angular momentum matrices (Jx, Jy, Jz) for spin s, dimension 2s+1."""
    two_s = round(2 * s)
    if two_s < 0 or abs(2 * s - two_s) > 1e-12:
        raise ValueError(f"spin {s} is not a non-negative half-integer")
    d = two_s + 1
    m = s - np.arange(d)  # +s .. -s
    jz = np.diag(m).astype(complex)
    jp = np.zeros((d, d), dtype=complex)
    for i in range(1, d):
        # raising m[i] -> m[i-1] = m[i] + 1
        jp[i - 1, i] = np.sqrt(s * (s + 1) - m[i] * (m[i] + 1))
    jm = jp.conj().T
    jx = (jp + jm) / 2.0
    jy = (jp - jm) / 2.0j
    return jx, jy, jz


def rotation_rep(s: float, axis, angle: float) -> np.ndarray:
    """Spin-s representation exp(-i angle axis.J), a (2s+1) unitary.

    Computed by eigendecomposition of the Hermitian generator, which stays
    exactly unitary (up to FP) at any angle.
    """
    n = np.asarray(axis, dtype=float)
    if n.shape != (3,) or abs(np.linalg.norm(n) - 1.0) > 1e-10:
        raise ValueError("axis must be a unit 3-vector")
    jx, jy, jz = spin_operators(s)
    gen = n[0] * jx + n[1] * jy + n[2] * jz
    evals, vecs = np.linalg.eigh(gen)
    phases = np.exp(-1j * angle * evals)
    return (vecs * phases) @ vecs.conj().T


def rotation_rep_batch(s: float, axes: np.ndarray, angles: np.ndarray) -> np.ndarray:
    """Vectorized rotation_rep over (n,3) axes and (n,) angles -> (n,d,d)."""
    axes = np.asarray(axes, dtype=float)
    angles = np.asarray(angles, dtype=float)
    if abs(s - 0.5) < 1e-12:
        # SU(2) closed form: cos(t/2) I - i sin(t/2) n.sigma
        c = np.cos(angles / 2.0)
        sn = np.sin(angles / 2.0)
        u = np.zeros(axes.shape[:-1] + (2, 2), dtype=complex)
        u[..., 0, 0] = c - 1j * sn * axes[..., 2]
        u[..., 1, 1] = c + 1j * sn * axes[..., 2]
        u[..., 0, 1] = -sn * (axes[..., 1] + 1j * axes[..., 0])
        u[..., 1, 0] = sn * (axes[..., 1] - 1j * axes[..., 0])
        return u
    jx, jy, jz = spin_operators(s)
    j = np.stack([jx, jy, jz])
    gen = np.einsum("nk,kij->nij", axes, j)
    evals, vecs = np.linalg.eigh(gen)
    phases = np.exp(-1j * angles[:, None] * evals)
    return np.einsum("nij,nj,nkj->nik", vecs, phases, vecs.conj())


def joint_rep_batch(
    particles: ParticleSet, lam: LorentzTransform, momenta: np.ndarray
) -> np.ndarray:
    """Tensor product of per-particle Wigner-rotation representations.

    ``momenta`` has shape (n, N, 3); the result is (n, d, d) with
    d the joint spin dimension.
    """
    momenta = np.asarray(momenta, dtype=float)
    n_pts = momenta.shape[0]
    if momenta.shape[1] != particles.n_particles:
        raise ValueError("momenta second axis must match the particle count")
    out = None
    for k in range(particles.n_particles):
        _, axes, angles = wigner_rotation_batch(lam, momenta[:, k, :], particles.masses[k])
        u_k = rotation_rep_batch(particles.spins[k], axes, angles)
        if out is None:
            out = u_k
        else:
            da, db = out.shape[1], u_k.shape[1]
            out = np.einsum("nij,nkl->nikjl", out, u_k).reshape(n_pts, da * db, da * db)
    return out


def joint_rep(particles: ParticleSet, lam: LorentzTransform, momenta) -> np.ndarray:
    """Joint spin representation U(lam, P) for one momentum configuration
    (list of N 3-vectors)."""
    momenta = np.asarray(momenta, dtype=float).reshape(1, particles.n_particles, 3)
    return joint_rep_batch(particles, lam, momenta)[0]


def pure_state(vector, spins) -> SpinState:
    """Density matrix |v><v| for a (normalized) state vector."""
    v = np.asarray(vector, dtype=complex)
    norm = np.linalg.norm(v)
    if norm == 0:
        raise ValueError("state vector must be nonzero")
    v = v / norm
    return SpinState(np.outer(v, v.conj()), tuple(spins))


def spin_up_z() -> SpinState:
    """Single spin-1/2 pointing along +z."""
    return pure_state([1.0, 0.0], (0.5,))


def bell_pair(kind: str) -> SpinState:
    """The Bell states (|01> +- |10>)/sqrt(2) of two spin-1/2 particles."""
    if kind not in ("plus", "minus"):
        raise ValueError("kind must be 'plus' or 'minus'")
    v = np.zeros(4, dtype=complex)
    v[1] = 1.0
    v[2] = 1.0 if kind == "plus" else -1.0
    return pure_state(v, (0.5, 0.5))


def purity(state: SpinState) -> float:
    """tr(rho^2), in [1/d, 1]."""
    m = state.matrix
    return float(np.real(np.sum(m * m.T)))


def bloch_vector(state: SpinState) -> np.ndarray:
    """Bloch vector (tr(rho sigma_x), tr(rho sigma_y), tr(rho sigma_z))."""
    if state.dim != 2:
        raise ValueError("bloch_vector requires a single spin-1/2 state")
    m = state.matrix
    return np.array(
        [
            2.0 * m[0, 1].real,
            -2.0 * m[0, 1].imag,
            (m[0, 0] - m[1, 1]).real,
        ]
    )


def partial_trace(state: SpinState, keep) -> SpinState:
    """Reduced state over the particles listed in ``keep`` (0-indexed)."""
    if isinstance(keep, int):
        keep = [keep]
    keep = sorted(keep)
    dims = [int(round(2 * s)) + 1 for s in state.spins]
    n = len(dims)
    if any(k < 0 or k >= n for k in keep):
        raise ValueError("keep indices out of range")
    trace_out = [i for i in range(n) if i not in keep]
    if not trace_out:
        return state
    rho = state.matrix.reshape(dims + dims)
    for idx in sorted(trace_out, reverse=True):
        rho = np.trace(rho, axis1=idx, axis2=idx + len(dims))
        dims = dims[:idx] + dims[idx + 1 :]
    d = int(np.prod(dims))
    return SpinState(rho.reshape(d, d), tuple(state.spins[k] for k in keep))


def conjugate(state: SpinState, unitary: np.ndarray) -> SpinState:
    """U rho U-dagger as a SpinState."""
    m = unitary @ state.matrix @ unitary.conj().T
    m = (m + m.conj().T) / 2.0
    return SpinState(m / np.trace(m).real, state.spins)
