"""Momentum-space wave packets and their moments under the invariant measure.

Two built-in families, both real and non-negative in momentum space:

* single-gaussian: one particle, amplitude ~ exp(-(p-mean)^2 / 2w^2);
* entangled-gaussian: two equal-mass particles with
  |g(p1,p2)|^2 ~ exp[-(p1^2+p2^2)/4s^2] exp[-(p1^2+p2^2-2x p1.p2)/(4s^2(1-x^2))].

All expectations are taken against |g|^2 d~P with the invariant measure
d~p = d^3p / (2E(p)); any constant factor of the measure drops out by
self-normalization. Sampling draws exactly from the plain Gaussian factor
of |g|^2 and carries the product of 1/(2E_k) as importance weights.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import AccuracyError
from .integrate import (
    GAUSS_HERMITE,
    MONTE_CARLO,
    IntegratorSpec,
    chunk_sizes,
    gauss_hermite_chunks,
    jackknife_stderr,
    map_chunks,
    philox_generator,
)
from .kinematics import energy

SINGLE_GAUSSIAN = "single-gaussian"
ENTANGLED_GAUSSIAN = "entangled-gaussian"

_MIN_ESS_FRACTION = 0.05


@dataclass(frozen=True)
class WavePacket:
    """A built-in Gaussian momentum wave packet over N particles."""

    kind: str
    masses: tuple[float, ...]
    width: float
    correlation: float
    mean: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mean", np.asarray(self.mean, dtype=float))

    @property
    def n_particles(self) -> int:
        return len(self.masses)

    @property
    def dim(self) -> int:
        return 3 * self.n_particles

    def plain_mean(self) -> np.ndarray:
        return self.mean.copy()

    def plain_covariance(self) -> np.ndarray:
        """Covariance of the plain Gaussian factor of |g|^2 (no measure
        factor): w^2/2 per axis for the single packet; the closed-form
        (2A)^{-1} blocks for the entangled packet."""
        if self.kind == SINGLE_GAUSSIAN:
            return np.eye(3) * self.width**2 / 2.0
        s2 = self.width**2
        x = self.correlation
        v = 2.0 * s2 * (2.0 - x * x) / (4.0 - x * x)
        c = 2.0 * s2 * x / (4.0 - x * x)
        cov = np.zeros((6, 6))
        for mu in range(3):
            cov[mu, mu] = cov[mu + 3, mu + 3] = v
            cov[mu, mu + 3] = cov[mu + 3, mu] = c
        return cov

    def measure_weights(self, points: np.ndarray) -> np.ndarray:
        """Invariant-measure factor prod_k 1/(2 E_k) at points (..., 3N)."""
        pts = np.asarray(points, dtype=float)
        per = pts.reshape(pts.shape[:-1] + (self.n_particles, 3))
        w = np.ones(pts.shape[:-1])
        for k, m in enumerate(self.masses):
            w = w / (2.0 * energy(per[..., k, :], m))
        return w

    @cached_property
    def normalization(self) -> float:
        """N with g = g_raw / sqrt(N), so that integral(|g|^2 d~P) = 1."""
        cov = self.plain_covariance()
        z_plain = float(
            (2.0 * np.pi) ** (self.dim / 2) * np.sqrt(np.linalg.det(cov))
        )
        nodes = 16 if self.dim <= 3 else 10
        total = 0.0
        for pts, w in gauss_hermite_chunks(self.mean, cov, nodes):
            total += float(w @ self.measure_weights(pts))
        return z_plain * total

    def amplitude(self, points: np.ndarray) -> np.ndarray:
        """Normalized momentum amplitude g at points (..., 3N)."""
        pts = np.asarray(points, dtype=float)
        delta = pts - self.mean
        prec = np.linalg.inv(self.plain_covariance())
        quad = np.einsum("...i,ij,...j->...", delta, prec, delta)
        return np.exp(-quad / 4.0) / np.sqrt(self.normalization)


@dataclass(frozen=True)
class PacketMoments:
    """Mean and covariance of the momentum coordinates under |g|^2 d~P."""

    mean: np.ndarray
    covariance: np.ndarray
    mean_stderr: np.ndarray
    ess: float | None
    method: str


@dataclass(frozen=True)
class WeightedSampleBatch:
    """Samples of the plain Gaussian with invariant-measure weights."""

    points: np.ndarray
    weights: np.ndarray
    seed: int
    stream: int


def make_single_gaussian(w: float, mean, mass: float) -> WavePacket:
    """Single-particle isotropic Gaussian of width parameter w."""
    if w <= 0:
        raise ValueError("w must be positive")
    if mass <= 0:
        raise ValueError("mass must be positive")
    mean = np.asarray(mean, dtype=float)
    if mean.shape != (3,):
        raise ValueError("mean must be a 3-vector")
    return WavePacket(SINGLE_GAUSSIAN, (float(mass),), float(w), 0.0, mean)


def make_entangled_gaussian(sigma: float, x: float, mass: float) -> WavePacket:
    """Two-particle Gaussian with width sigma and momentum correlation x.

    x -> 1 is the singular non-localized limit and is rejected.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    if not 0.0 <= x < 1.0:
        raise ValueError("x must lie in [0, 1)")
    if mass <= 0:
        raise ValueError("mass must be positive")
    return WavePacket(
        ENTANGLED_GAUSSIAN, (float(mass), float(mass)), float(sigma), float(x), np.zeros(6)
    )


def draw_weighted_samples(
    packet: WavePacket, count: int, seed: int, stream: int = 0
) -> WeightedSampleBatch:
    """Draw ``count`` points from the plain Gaussian factor with measure
    weights; bit-reproducible for fixed (seed, stream)."""
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = philox_generator(seed, stream)
    chol = np.linalg.cholesky(packet.plain_covariance())
    z = rng.standard_normal((count, packet.dim))
    points = packet.mean + z @ chol.T
    return WeightedSampleBatch(points, packet.measure_weights(points), seed, stream)


def moments(
    packet: WavePacket,
    integrator: IntegratorSpec | None = None,
    stream_base: int = 0,
) -> PacketMoments:
    """Mean and covariance of P under the packet's probability measure."""
    if integrator is None:
        integrator = IntegratorSpec()
    if integrator.method == GAUSS_HERMITE:
        mean, cov, _ = _gh_moments(packet, integrator.nodes)
        coarse_nodes = max(8, integrator.nodes - 4)
        mean_c, _, _ = _gh_moments(packet, coarse_nodes)
        stderr = np.abs(mean - mean_c)
        result = PacketMoments(mean, cov, stderr, None, GAUSS_HERMITE)
        _check_tolerance(float(stderr.max()), integrator, result)
        return result

    sizes = chunk_sizes(integrator.count, integrator.chunk_size)

    def worker(c):
        batch = draw_weighted_samples(packet, sizes[c], integrator.seed, stream_base + c)
        w, pts = batch.weights, batch.points
        return (
            float(w.sum()),
            w @ pts,
            np.einsum("n,ni,nj->ij", w, pts, pts),
            float((w * w).sum()),
        )

    parts = map_chunks(worker, len(sizes), integrator.threads)
    w_tot = sum(p[0] for p in parts)
    s1 = sum(p[1] for p in parts)
    s2 = sum(p[2] for p in parts)
    w2_tot = sum(p[3] for p in parts)
    mean = s1 / w_tot
    cov = s2 / w_tot - np.outer(mean, mean)
    cov = (cov + cov.T) / 2.0
    ess = w_tot * w_tot / w2_tot
    # leave-one-chunk-out means for the stderr
    loo = np.stack([(s1 - p[1]) / (w_tot - p[0]) for p in parts])
    stderr = np.array([jackknife_stderr(loo[:, i]) for i in range(packet.dim)])
    result = PacketMoments(mean, cov, stderr, float(ess), MONTE_CARLO)
    if ess < _MIN_ESS_FRACTION * integrator.count:
        raise AccuracyError(
            f"effective sample size {ess:.0f} below {_MIN_ESS_FRACTION:.0%} of "
            f"{integrator.count} samples",
            partial=result,
        )
    _check_tolerance(float(stderr.max()), integrator, result)
    return result


def position_covariance(packet: WavePacket) -> np.ndarray:
    """Position-space covariance of the Fourier transform of the amplitude.

    Both built-in packets have real amplitudes, hence minimal uncertainty
    in the plain-Gaussian approximation: Sigma_X = (1/4) Sigma_P^{-1}.
    """
    if packet.kind not in (SINGLE_GAUSSIAN, ENTANGLED_GAUSSIAN):
        raise NotImplementedError(f"unsupported packet kind {packet.kind!r}")
    cov = packet.plain_covariance()
    out = np.linalg.inv(cov) / 4.0
    return (out + out.T) / 2.0


def _gh_moments(packet: WavePacket, nodes: int):
    cov0 = packet.plain_covariance()
    w_tot = 0.0
    s1 = np.zeros(packet.dim)
    s2 = np.zeros((packet.dim, packet.dim))
    for pts, gw in gauss_hermite_chunks(packet.mean, cov0, nodes):
        w = gw * packet.measure_weights(pts)
        w_tot += float(w.sum())
        s1 += w @ pts
        s2 += np.einsum("n,ni,nj->ij", w, pts, pts)
    mean = s1 / w_tot
    cov = s2 / w_tot - np.outer(mean, mean)
    return mean, (cov + cov.T) / 2.0, w_tot


def _check_tolerance(err: float, integrator: IntegratorSpec, partial) -> None:
    if integrator.tolerance is not None and err > integrator.tolerance:
        raise AccuracyError(
            f"error estimate {err:.3e} exceeds tolerance {integrator.tolerance:.3e}",
            partial=partial,
        )
