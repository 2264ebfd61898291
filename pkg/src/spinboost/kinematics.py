"""Four-vector algebra, Lorentz boosts, and Wigner rotations.

Conventions used throughout the package: metric signature (+,-,-,-),
natural units (hbar = c = 1). A pure boost with rapidity vector ``xi``
maps the rest four-momentum (m, 0, 0, 0) to (m cosh|xi|, m sinh|xi| n)
with n = xi/|xi|, so rapidities along a fixed axis are additive.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError

METRIC = np.diag([1.0, -1.0, -1.0, -1.0])

METRIC_TOL = 1e-12
ROTATION_BLOCK_TOL = 1e-9  # above accumulated FP error of three 4x4 products
PURE_ROTATION_TOL = 1e-12


@dataclass(frozen=True)
class FourVector:
    """Energy-momentum four-vector; ``t`` is the energy component."""

    t: float
    xyz: np.ndarray

    def __post_init__(self):
        xyz = np.asarray(self.xyz, dtype=float)
        if xyz.shape != (3,):
            raise ValueError("xyz must be a 3-vector")
        if not (np.isfinite(self.t) and np.all(np.isfinite(xyz))):
            raise ValueError("four-vector components must be finite")
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "xyz", xyz)

    def as_array(self) -> np.ndarray:
        return np.concatenate(([self.t], self.xyz))

    def minkowski_norm2(self) -> float:
        """t^2 - |xyz|^2 (the invariant mass squared for an on-shell vector)."""
        return float(self.t * self.t - self.xyz @ self.xyz)


def energy(momentum, mass: float):
    """On-shell energy sqrt(m^2 + |p|^2). Accepts (..., 3) arrays."""
    p = np.asarray(momentum, dtype=float)
    return np.sqrt(mass * mass + np.sum(p * p, axis=-1))


def on_shell(momentum, mass: float) -> FourVector:
    p = np.asarray(momentum, dtype=float)
    return FourVector(float(energy(p, mass)), p)


@dataclass(frozen=True)
class LorentzTransform:
    """A proper orthochronous Lorentz transformation as a 4x4 matrix.

    ``kind`` is one of "pure-boost", "pure-rotation", "general";
    ``rapidity`` is set when the transform was built as a boost.
    """

    matrix: np.ndarray
    kind: str = "general"
    rapidity: np.ndarray | None = None

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.shape != (4, 4):
            raise ValueError("matrix must be 4x4")
        dev = np.max(np.abs(m.T @ METRIC @ m - METRIC))
        if dev > METRIC_TOL:
            raise ValueError(f"matrix does not preserve the Minkowski metric (deviation {dev:.2e})")
        if m[0, 0] < 1.0 - 1e-12:
            raise ValueError("transform must be orthochronous (matrix[0,0] >= 1)")
        if np.linalg.det(m) < 0:
            raise ValueError("transform must be proper (det = +1)")
        object.__setattr__(self, "matrix", m)
        if self.rapidity is not None:
            object.__setattr__(self, "rapidity", np.asarray(self.rapidity, dtype=float))

    def inverse(self) -> "LorentzTransform":
        # Lambda^-1 = eta Lambda^T eta, exact for metric-preserving matrices
        inv = METRIC @ self.matrix.T @ METRIC
        rap = None if self.rapidity is None else -self.rapidity
        return LorentzTransform(inv, kind=self.kind, rapidity=rap)

    def is_pure_rotation(self, tol: float = PURE_ROTATION_TOL) -> bool:
        """True when the transform fixes the time axis (no boost content)."""
        if self.kind == "pure-rotation":
            return True
        e0 = np.array([1.0, 0.0, 0.0, 0.0])
        return bool(np.linalg.norm(self.matrix @ e0 - e0) <= tol)


@dataclass(frozen=True)
class RotationResult:
    """A spatial rotation with its axis-angle decomposition, angle in [0, pi]."""

    matrix3: np.ndarray
    axis: np.ndarray
    angle: float


def boost_from_rapidity(rapidity) -> LorentzTransform:
    """Pure boost with the given rapidity 3-vector."""
    r = np.asarray(rapidity, dtype=float)
    if r.shape != (3,) or not np.all(np.isfinite(r)):
        raise ValueError("rapidity must be a finite 3-vector")
    xi = float(np.linalg.norm(r))
    if xi == 0.0:
        return LorentzTransform(np.eye(4), kind="pure-rotation", rapidity=r)
    n = r / xi
    m = np.eye(4)
    m[0, 0] = np.cosh(xi)
    m[0, 1:] = n * np.sinh(xi)
    m[1:, 0] = n * np.sinh(xi)
    m[1:, 1:] = np.eye(3) + (np.cosh(xi) - 1.0) * np.outer(n, n)
    return LorentzTransform(m, kind="pure-boost", rapidity=r)


def standard_boost(momentum, mass: float) -> LorentzTransform:
    """The boost taking the rest momentum (m,0,0,0) to (E(p), p).

    Built from the symmetric form L00 = gamma, L0i = ni sqrt(gamma^2-1),
    Lij = delta_ij + (gamma-1) ni nj with gamma = E/m.
    """
    if mass <= 0:
        raise ValueError("mass must be positive")
    p = np.asarray(momentum, dtype=float)
    if p.shape != (3,) or not np.all(np.isfinite(p)):
        raise ValueError("momentum must be a finite 3-vector")
    ap = float(np.linalg.norm(p))
    if ap == 0.0:
        return LorentzTransform(np.eye(4), kind="pure-rotation", rapidity=np.zeros(3))
    gamma = float(energy(p, mass)) / mass
    n = p / ap
    m = np.empty((4, 4))
    m[0, 0] = gamma
    m[0, 1:] = n * np.sqrt(gamma * gamma - 1.0)
    m[1:, 0] = m[0, 1:]
    m[1:, 1:] = np.eye(3) + (gamma - 1.0) * np.outer(n, n)
    return LorentzTransform(m, kind="pure-boost", rapidity=np.arcsinh(ap / mass) * n)


def rotation_transform(matrix3) -> LorentzTransform:
    """Embed a 3x3 rotation matrix as a spatial Lorentz transformation."""
    r = np.asarray(matrix3, dtype=float)
    if r.shape != (3, 3):
        raise ValueError("matrix3 must be 3x3")
    m = np.eye(4)
    m[1:, 1:] = r
    return LorentzTransform(m, kind="pure-rotation")


def apply(lam: LorentzTransform, v: FourVector) -> FourVector:
    out = lam.matrix @ v.as_array()
    return FourVector(out[0], out[1:])


def rotation_matrix(axis, angle: float) -> np.ndarray:
    """Rodrigues form of the rotation by ``angle`` about the unit ``axis``."""
    n = np.asarray(axis, dtype=float)
    norm = np.linalg.norm(n)
    if abs(norm - 1.0) > 1e-10:
        raise ValueError("axis must be a unit vector")
    n = n / norm
    c, s = np.cos(angle), np.sin(angle)
    cross = np.array([[0.0, -n[2], n[1]], [n[2], 0.0, -n[0]], [-n[1], n[0], 0.0]])
    return c * np.eye(3) + (1.0 - c) * np.outer(n, n) + s * cross


def _fix_ambiguous_sign(axis: np.ndarray) -> np.ndarray:
    # tie-break: first component of magnitude > 1e-10 is made positive
    for comp in axis:
        if abs(comp) > 1e-10:
            return -axis if comp < 0 else axis
    return axis


def axis_angle_batch(matrices: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Axis-angle extraction for a stack of rotation matrices (n,3,3).

    Angle from atan2 of the antisymmetric-part norm against the trace
    (stable at both ends); axis from the antisymmetric part except near
    pi, where it is read off the stable symmetric part (R+R^T)/2.
    """
    r = np.asarray(matrices, dtype=float)
    tr = np.trace(r, axis1=-2, axis2=-1)
    v = np.stack(
        [r[:, 2, 1] - r[:, 1, 2], r[:, 0, 2] - r[:, 2, 0], r[:, 1, 0] - r[:, 0, 1]],
        axis=-1,
    )
    vnorm = np.linalg.norm(v, axis=-1)
    angles = np.arctan2(vnorm / 2.0, (tr - 1.0) / 2.0)

    axes = np.zeros_like(v)
    axes[:, 2] = 1.0  # convention for the identity rotation
    near_pi = angles > np.pi - 1e-3
    generic = (vnorm > 1e-12) & ~near_pi
    axes[generic] = v[generic] / vnorm[generic, None]

    for i in np.nonzero(near_pi)[0]:
        c = np.cos(angles[i])
        b = ((r[i] + r[i].T) / 2.0 - c * np.eye(3)) / (1.0 - c)  # ~ outer(n, n)
        col = int(np.argmax(np.diag(b)))
        axis = b[:, col] / np.sqrt(b[col, col])
        sign = float(v[i] @ axis)
        if abs(sign) > 1e-12:
            axis = axis if sign > 0 else -axis
        else:
            axis = _fix_ambiguous_sign(axis)
        axes[i] = axis
    return axes, angles


def axis_angle_from_matrix(matrix3) -> tuple[np.ndarray, float]:
    r = np.asarray(matrix3, dtype=float)
    if r.shape != (3, 3):
        raise ValueError("matrix3 must be 3x3")
    axes, angles = axis_angle_batch(r[None])
    return axes[0], float(angles[0])


def standard_boost_batch(momenta: np.ndarray, mass: float) -> np.ndarray:
    """Standard boosts L(p) for a batch of momenta (n,3) -> (n,4,4)."""
    p = np.asarray(momenta, dtype=float)
    n_pts = p.shape[0]
    ap = np.linalg.norm(p, axis=1)
    gamma = energy(p, mass) / mass
    safe = np.where(ap > 0, ap, 1.0)
    nhat = p / safe[:, None]
    nhat[ap == 0] = 0.0
    s = np.sqrt(np.maximum(gamma * gamma - 1.0, 0.0))
    out = np.zeros((n_pts, 4, 4))
    out[:, 0, 0] = gamma
    out[:, 0, 1:] = nhat * s[:, None]
    out[:, 1:, 0] = out[:, 0, 1:]
    out[:, 1:, 1:] = np.eye(3) + (gamma - 1.0)[:, None, None] * (
        nhat[:, :, None] * nhat[:, None, :]
    )
    return out


def wigner_rotation_batch(
    lam: LorentzTransform, momenta: np.ndarray, mass: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Wigner rotations W = L(Lam p)^-1 Lam L(p) for momenta (n,3).

    Returns (matrices (n,3,3), axes (n,3), angles (n,)). Raises
    ConsistencyError when any W fails to be a spatial rotation, which
    would indicate broken boost conventions.
    """
    if mass <= 0:
        raise ValueError("mass must be positive")
    p = np.asarray(momenta, dtype=float)
    lp = standard_boost_batch(p, mass)
    e = energy(p, mass)
    four = np.concatenate([e[:, None], p], axis=1)
    pprime = (four @ lam.matrix.T)[:, 1:]
    lpp = standard_boost_batch(pprime, mass)
    lpp_inv = METRIC @ np.swapaxes(lpp, -1, -2) @ METRIC
    w = lpp_inv @ (lam.matrix @ lp)
    bad = max(
        float(np.max(np.abs(w[:, 0, 0] - 1.0))),
        float(np.max(np.abs(w[:, 0, 1:]))),
        float(np.max(np.abs(w[:, 1:, 0]))),
    )
    if bad > ROTATION_BLOCK_TOL:
        raise ConsistencyError(
            f"Wigner matrix is not a spatial rotation (deviation {bad:.2e}); "
            "boost conventions are inconsistent"
        )
    r = w[:, 1:, 1:]
    axes, angles = axis_angle_batch(r)
    return r, axes, angles


def wigner_rotation(lam: LorentzTransform, momentum, mass: float) -> RotationResult:
    """The rotation induced on the spin of a massive particle of momentum
    ``momentum`` when ``lam`` acts on the state."""
    r, axes, angles = wigner_rotation_batch(
        lam, np.asarray(momentum, dtype=float)[None], mass
    )
    return RotationResult(r[0], axes[0], float(angles[0]))
