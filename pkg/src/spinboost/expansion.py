"""Quadratic expansion of the overlap kernel and the localization bound.

Near the mean momentum the kernel behaves as

    Gamma(P, P') ~= 1 - 1/2 (dP, dP') [[U, V^T], [V, U]] (dP, dP')^T,

so the leading-order purity deficit is 1 - tr(rho'^2) ~= tr(U Sigma),
with Sigma the momentum covariance. Diagonalizing U = M D M^T rewrites
the deficit as sum_l D_l <dQ_l^2> over collective modes Q = P.M, and the
position-momentum uncertainty of each mode turns that into an upper
bound on the purity in terms of position variances.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AccuracyError, ConsistencyError
from .boostmap import gamma
from .kinematics import LorentzTransform
from .spin import ParticleSet, SpinState, purity

RICHARDSON_REL_TOL = 0.01
_EPS = np.finfo(float).eps


def _psd_floor(norm_u: float, step: float) -> float:
    # second differences of O(1) kernel values carry ~eps/h^2 noise
    return max(1e-8 * norm_u, 64.0 * _EPS / step**2)


@dataclass(frozen=True)
class HessianBlocks:
    """Second-derivative blocks of the overlap kernel at the mean momentum.

    u_block is -d2 Gamma / dP dP (symmetric PSD); v_block is the mixed
    block -d2 Gamma / dP' dP. Both from central finite differences with
    step ``step``.
    """

    u_block: np.ndarray
    v_block: np.ndarray
    mean_momentum: np.ndarray
    step: float


@dataclass(frozen=True)
class SpectralExpansion:
    """Eigenmodes of the U block with per-mode momentum variances.

    eigenvalues descending and clipped at zero; modes are the columns of
    an orthogonal matrix with sign fixed so each column's first
    significant entry is positive.
    """

    eigenvalues: np.ndarray
    modes: np.ndarray
    mode_variances: np.ndarray


def hessian_blocks(
    rho: SpinState,
    lam: LorentzTransform,
    particles: ParticleSet,
    mean_momentum,
    step: float | None = None,
    verify_step: bool = True,
) -> HessianBlocks:
    """Finite-difference U and V blocks of the kernel expansion.

    Checks that the kernel is stationary at the mean (its gradient there
    must vanish for pure states); a violation signals a wrong evaluation
    point. With ``verify_step`` the U block is recomputed at half step
    and must agree to 1%, else AccuracyError.
    """
    if abs(purity(rho) - 1.0) > 1e-10:
        raise ValueError("hessian_blocks requires a pure state")
    mean_p = np.asarray(mean_momentum, dtype=float).ravel()
    dim = 3 * particles.n_particles
    if mean_p.size != dim:
        raise ValueError(f"mean momentum must have {dim} components")
    if step is None:
        step = 1e-3 * max(max(particles.masses), float(np.max(np.abs(mean_p))))
    if step <= 0:
        raise ValueError("step must be positive")

    if lam.is_pure_rotation():
        zero = np.zeros((dim, dim))
        return HessianBlocks(zero, zero.copy(), mean_p, float(step))

    u = _u_block(rho, lam, particles, mean_p, step)
    if verify_step:
        u_half = _u_block(rho, lam, particles, mean_p, step / 2.0)
        scale = max(float(np.max(np.abs(u))), _psd_floor(0.0, step))
        rel = float(np.max(np.abs(u - u_half))) / scale
        if rel > RICHARDSON_REL_TOL:
            raise AccuracyError(
                f"U block changes by {rel:.2%} when halving the step; "
                "the finite-difference step is unreliable here",
                partial=HessianBlocks(u, np.zeros_like(u), mean_p, float(step)),
            )

    norm_u = float(np.max(np.abs(u)))
    _check_stationary(rho, lam, particles, mean_p, step, norm_u)
    evals = np.linalg.eigvalsh(u)
    if evals.min() < -_psd_floor(norm_u, step):
        raise ConsistencyError(
            f"U block is not PSD (min eigenvalue {evals.min():.3e})"
        )
    v = _v_block(rho, lam, particles, mean_p, step)
    return HessianBlocks(u, v, mean_p, float(step))


def _kernel(rho, lam, particles, p, p_prime):
    return gamma(rho, lam, particles, p, p_prime)


def _u_block(rho, lam, particles, mean_p, h):
    dim = mean_p.size
    base = _kernel(rho, lam, particles, mean_p, mean_p)
    if abs(base - 1.0) > 1e-9:
        raise ConsistencyError(
            f"kernel at the mean momentum is {base!r}, expected 1 for a pure state"
        )
    u = np.zeros((dim, dim))
    eye = np.eye(dim)
    for i in range(dim):
        gp = _kernel(rho, lam, particles, mean_p + h * eye[i], mean_p)
        gm = _kernel(rho, lam, particles, mean_p - h * eye[i], mean_p)
        u[i, i] = -(gp - 2.0 * base + gm) / (h * h)
    for i in range(dim):
        for j in range(i + 1, dim):
            gpp = _kernel(rho, lam, particles, mean_p + h * (eye[i] + eye[j]), mean_p)
            gpm = _kernel(rho, lam, particles, mean_p + h * (eye[i] - eye[j]), mean_p)
            gmp = _kernel(rho, lam, particles, mean_p - h * (eye[i] - eye[j]), mean_p)
            gmm = _kernel(rho, lam, particles, mean_p - h * (eye[i] + eye[j]), mean_p)
            u[i, j] = u[j, i] = -(gpp - gpm - gmp + gmm) / (4.0 * h * h)
    return u


def _v_block(rho, lam, particles, mean_p, h):
    dim = mean_p.size
    v = np.zeros((dim, dim))
    eye = np.eye(dim)
    for i in range(dim):
        for j in range(dim):
            gpp = _kernel(rho, lam, particles, mean_p + h * eye[j], mean_p + h * eye[i])
            gpm = _kernel(rho, lam, particles, mean_p + h * eye[j], mean_p - h * eye[i])
            gmp = _kernel(rho, lam, particles, mean_p - h * eye[j], mean_p + h * eye[i])
            gmm = _kernel(rho, lam, particles, mean_p - h * eye[j], mean_p - h * eye[i])
            v[i, j] = -(gpp - gpm - gmp + gmm) / (4.0 * h * h)
    return v


def _check_stationary(rho, lam, particles, mean_p, h, norm_u):
    dim = mean_p.size
    eye = np.eye(dim)
    grad = np.empty(dim)
    for i in range(dim):
        gp = _kernel(rho, lam, particles, mean_p + h * eye[i], mean_p)
        gm = _kernel(rho, lam, particles, mean_p - h * eye[i], mean_p)
        grad[i] = (gp - gm) / (2.0 * h)
    tol = 0.1 * h * max(norm_u, 1e-6)
    if float(np.max(np.abs(grad))) > tol:
        raise ConsistencyError(
            "kernel gradient does not vanish at the supplied mean momentum "
            f"(|grad| = {np.max(np.abs(grad)):.3e}); wrong evaluation point?"
        )


def _fix_column_signs(m: np.ndarray) -> np.ndarray:
    out = m.copy()
    for col in range(out.shape[1]):
        for entry in out[:, col]:
            if abs(entry) > 1e-10:
                if entry < 0:
                    out[:, col] = -out[:, col]
                break
    return out


def mode_variances(modes: np.ndarray, cov: np.ndarray) -> np.ndarray:
    """Per-mode variances diag(M^T cov M)."""
    return np.einsum("il,ij,jl->l", modes, np.asarray(cov, dtype=float), modes)


def spectral_decompose(blocks: HessianBlocks, moment_cov) -> SpectralExpansion:
    """Eigendecomposition U = M D M^T with per-mode momentum variances.

    Eigenvalues are sorted descending and clipped at zero; an eigenvalue
    below the finite-difference noise floor on the negative side raises.
    """
    cov = np.asarray(moment_cov, dtype=float)
    u = blocks.u_block
    norm_u = float(np.max(np.abs(u))) if u.size else 0.0
    evals, vecs = np.linalg.eigh(u)
    floor = _psd_floor(norm_u, blocks.step)
    if evals.min() < -floor:
        raise ConsistencyError(
            f"U block eigenvalue {evals.min():.3e} below the PSD tolerance"
        )
    order = np.argsort(evals)[::-1]
    d = np.clip(evals[order], 0.0, None)
    m = _fix_column_signs(vecs[:, order])
    return SpectralExpansion(d, m, mode_variances(m, cov))


def predict_depurification(expansion: SpectralExpansion) -> float:
    """Leading-order purity deficit sum_l D_l <dQ_l^2> (= tr(U Sigma))."""
    return float(np.sum(expansion.eigenvalues * expansion.mode_variances))


def localization_bound(expansion: SpectralExpansion, position_cov) -> float:
    """Upper purity bound 1 - (1/4) sum_l D_l / <dX_l^2> (hbar = 1).

    Modes with zero eigenvalue are skipped: their position spread is
    unconstrained. A vanishing position variance on an active mode means
    a non-localized direction and is rejected.
    """
    pos = np.asarray(position_cov, dtype=float)
    xvar = mode_variances(expansion.modes, pos)
    active = expansion.eigenvalues > 0.0
    if np.any(xvar[active] <= 0.0):
        raise ValueError(
            "zero position variance on a depurifying mode (non-localized state)"
        )
    return 1.0 - 0.25 * float(
        np.sum(expansion.eigenvalues[active] / xvar[active])
    )
