"""Boosted reduced spin states and their purity.

The reduced spin state seen by a transformed observer is the average of
the rest-frame state conjugated by momentum-dependent Wigner-rotation
representations,

    rho' = integral |g(P)|^2 U(P) rho U(P)^dag d~P,

and its purity tr(rho'^2) doubles as the depurification diagnostic. The
same purity can be computed without assembling rho', as a double
integral of the overlap kernel

    Gamma(P, P') = tr[U(P) rho U(P)^dag U(P') rho U(P')^dag]

against |g(P)|^2 |g(P')|^2; with two independent sample batches that
double sum collapses to tr(rhoA' rhoB'), which is what the estimator
evaluates.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import AccuracyError, ConsistencyError
from .integrate import (
    GAUSS_HERMITE,
    MONTE_CARLO,
    IntegratorSpec,
    chunk_sizes,
    gauss_hermite_chunks,
    jackknife_stderr,
    map_chunks,
)
from .kinematics import LorentzTransform
from .spin import ParticleSet, SpinState, joint_rep, joint_rep_batch, purity
from .wavepackets import WavePacket, draw_weighted_samples

PURE_STATE_TOL = 1e-10
ASSEMBLY_FLAG_TOL = 1e-6

# stream-id offsets keep sample batches of different purposes disjoint
STREAM_TRANSFORM = 0
STREAM_SECOND_BATCH = 1 << 20
STREAM_MOMENTS = 1 << 21


@dataclass(frozen=True)
class BoostedStateResult:
    """rho' with its purity, error estimate, and integrator provenance."""

    rho_prime: SpinState
    purity: float
    error_estimate: float
    provenance: dict


@dataclass(frozen=True)
class PurityEstimate:
    """A purity value with its error estimate (double-integral route)."""

    value: float
    stderr: float
    provenance: dict


def _check_packet(packet: WavePacket, particles: ParticleSet) -> None:
    if packet.n_particles != particles.n_particles:
        raise ValueError("packet and particle set disagree on the particle count")
    if not np.allclose(packet.masses, particles.masses, rtol=1e-12, atol=0.0):
        raise ValueError("packet and particle set disagree on the masses")


def _warn_if_mixed(rho: SpinState) -> None:
    p = purity(rho)
    if abs(p - 1.0) > PURE_STATE_TOL:
        warnings.warn(
            f"state is not pure (purity {p:.6f}); results lose their "
            "rest-frame-pure interpretation",
            stacklevel=3,
        )


def gamma(
    rho: SpinState,
    lam: LorentzTransform,
    particles: ParticleSet,
    p: np.ndarray,
    p_prime: np.ndarray,
) -> float:
    """Overlap kernel Gamma(P, P') = tr[U(P) rho U(P)^dag U(P') rho U(P')^dag].

    Equals 1 iff the two conjugated states coincide; for pure rho it lies
    in [0, 1] and is symmetric in (P, P').
    """
    _warn_if_mixed(rho)
    n = particles.n_particles
    u1 = joint_rep(particles, lam, np.asarray(p, dtype=float).reshape(n, 3))
    u2 = joint_rep(particles, lam, np.asarray(p_prime, dtype=float).reshape(n, 3))
    a = u1 @ rho.matrix @ u1.conj().T
    b = u2 @ rho.matrix @ u2.conj().T
    val = np.sum(a * b.T)
    if abs(val.imag) > 1e-9 or val.real > 1.0 + 1e-9 or val.real < -1e-9:
        raise ConsistencyError(f"overlap kernel out of range: {val}")
    return float(val.real)


def _rotation_fast_path(
    rho: SpinState, lam: LorentzTransform, particles: ParticleSet
) -> BoostedStateResult:
    zero = np.zeros((particles.n_particles, 3))
    u = joint_rep(particles, lam, zero)
    m = u @ rho.matrix @ u.conj().T
    m = (m + m.conj().T) / 2.0
    m = m / np.trace(m).real
    rho_prime = SpinState(m, rho.spins)
    return BoostedStateResult(
        rho_prime,
        purity(rho_prime),
        0.0,
        {"method": "analytic-rotation", "reason": "transform fixes the time axis"},
    )


def _accumulate_chunks(rho_mat, lam, particles, chunk_iter, threads):
    """Sum w_i U_i rho U_i^dag and w_i over chunks; returns per-chunk parts."""

    def worker(item):
        pts, w = item
        n = pts.shape[0]
        u = joint_rep_batch(particles, lam, pts.reshape(n, particles.n_particles, 3))
        acc = np.einsum("n,nij,jk,nlk->il", w, u, rho_mat, u.conj(), optimize=True)
        return acc, float(w.sum())

    items = list(chunk_iter)
    return map_chunks(lambda c: worker(items[c]), len(items), threads)


def _mc_chunk_iter(packet, integrator, stream_base):
    sizes = chunk_sizes(integrator.count, integrator.chunk_size)
    for c, size in enumerate(sizes):
        batch = draw_weighted_samples(packet, size, integrator.seed, stream_base + c)
        yield batch.points, batch.weights


def _gh_chunk_iter(packet, nodes):
    for pts, gw in gauss_hermite_chunks(packet.mean, packet.plain_covariance(), nodes):
        yield pts, gw * packet.measure_weights(pts)


def _assemble(parts, spins):
    a_tot = sum(p[0] for p in parts)
    w_tot = sum(p[1] for p in parts)
    raw = a_tot / w_tot
    herm = (raw + raw.conj().T) / 2.0
    herm_corr = float(np.max(np.abs(raw - herm)))
    trace = np.trace(herm).real
    rho_prime = SpinState(herm / trace, spins)
    trace_corr = abs(trace - 1.0)
    flagged = herm_corr > ASSEMBLY_FLAG_TOL or trace_corr > ASSEMBLY_FLAG_TOL
    if flagged:
        warnings.warn(
            f"rho' assembly corrections exceed {ASSEMBLY_FLAG_TOL:.0e} "
            f"(hermitize {herm_corr:.2e}, trace {trace_corr:.2e})",
            stacklevel=3,
        )
    return rho_prime, a_tot, w_tot, {
        "hermitize_correction": herm_corr,
        "trace_correction": trace_corr,
        "flagged": flagged,
    }


def _purity_of(mat: np.ndarray) -> float:
    return float(np.real(np.sum(mat * mat.T)))


def transform_spin_state(
    rho: SpinState,
    lam: LorentzTransform,
    packet: WavePacket,
    particles: ParticleSet,
    integrator: IntegratorSpec | None = None,
    stream_base: int = STREAM_TRANSFORM,
) -> BoostedStateResult:
    """The reduced spin state seen after ``lam``, averaged over the packet.

    rho' is Hermitized and trace-renormalized after assembly, with both
    correction magnitudes logged in the provenance. Pure rotations skip
    the integral entirely (every Wigner rotation equals the rotation).
    """
    _check_packet(packet, particles)
    if tuple(rho.spins) != tuple(particles.spins):
        raise ValueError("state spins do not match the particle set")
    if lam.is_pure_rotation():
        return _rotation_fast_path(rho, lam, particles)

    if integrator is None:
        integrator = IntegratorSpec()
    if integrator.method == GAUSS_HERMITE:
        parts = _accumulate_chunks(
            rho.matrix, lam, particles, _gh_chunk_iter(packet, integrator.nodes),
            integrator.threads,
        )
        rho_prime, _, _, corrections = _assemble(parts, rho.spins)
        pur = _purity_of(rho_prime.matrix)
        coarse = _accumulate_chunks(
            rho.matrix, lam, particles,
            _gh_chunk_iter(packet, max(8, integrator.nodes - 4)),
            integrator.threads,
        )
        rho_coarse, _, _, _ = _assemble(coarse, rho.spins)
        err = abs(pur - _purity_of(rho_coarse.matrix))
        prov = {
            "method": GAUSS_HERMITE,
            "nodes": integrator.nodes,
            **corrections,
        }
        result = BoostedStateResult(rho_prime, pur, err, prov)
    else:
        parts = _accumulate_chunks(
            rho.matrix, lam, particles,
            _mc_chunk_iter(packet, integrator, stream_base),
            integrator.threads,
        )
        rho_prime, a_tot, w_tot, corrections = _assemble(parts, rho.spins)
        pur = _purity_of(rho_prime.matrix)
        loo = []
        for a_c, w_c in parts:
            m = (a_tot - a_c) / (w_tot - w_c)
            m = (m + m.conj().T) / 2.0
            loo.append(_purity_of(m / np.trace(m).real))
        err = jackknife_stderr(np.array(loo))
        prov = {
            "method": MONTE_CARLO,
            "count": integrator.count,
            "seed": integrator.seed,
            "stream_base": stream_base,
            "chunks": len(parts),
            **corrections,
        }
        result = BoostedStateResult(rho_prime, pur, err, prov)

    if integrator.tolerance is not None and result.error_estimate > integrator.tolerance:
        raise AccuracyError(
            f"purity error estimate {result.error_estimate:.3e} exceeds "
            f"tolerance {integrator.tolerance:.3e}",
            partial=result,
        )
    return result


def boosted_purity_double_integral(
    rho: SpinState,
    lam: LorentzTransform,
    packet: WavePacket,
    particles: ParticleSet,
    integrator: IntegratorSpec | None = None,
    stream_base: int = STREAM_TRANSFORM,
) -> PurityEstimate:
    """Purity from the double integral of the overlap kernel.

    Monte Carlo uses two independent sample batches, so the pairwise
    kernel sum factorizes into tr(rhoA' rhoB') without the O(1/n)
    diagonal bias of reusing one batch.
    """
    _check_packet(packet, particles)
    _warn_if_mixed(rho)
    if lam.is_pure_rotation():
        return PurityEstimate(
            purity(rho), 0.0, {"method": "analytic-rotation"}
        )
    if integrator is None:
        integrator = IntegratorSpec()

    if integrator.method == GAUSS_HERMITE:
        parts = _accumulate_chunks(
            rho.matrix, lam, particles, _gh_chunk_iter(packet, integrator.nodes),
            integrator.threads,
        )
        rho_prime, _, _, _ = _assemble(parts, rho.spins)
        val = _purity_of(rho_prime.matrix)
        coarse = _accumulate_chunks(
            rho.matrix, lam, particles,
            _gh_chunk_iter(packet, max(8, integrator.nodes - 4)),
            integrator.threads,
        )
        rho_coarse, _, _, _ = _assemble(coarse, rho.spins)
        err = abs(val - _purity_of(rho_coarse.matrix))
        est = PurityEstimate(val, err, {"method": GAUSS_HERMITE, "nodes": integrator.nodes})
    else:
        parts_a = _accumulate_chunks(
            rho.matrix, lam, particles,
            _mc_chunk_iter(packet, integrator, stream_base),
            integrator.threads,
        )
        parts_b = _accumulate_chunks(
            rho.matrix, lam, particles,
            _mc_chunk_iter(packet, integrator, stream_base + STREAM_SECOND_BATCH),
            integrator.threads,
        )
        a_tot = sum(p[0] for p in parts_a)
        wa = sum(p[1] for p in parts_a)
        b_tot = sum(p[0] for p in parts_b)
        wb = sum(p[1] for p in parts_b)
        val = float(np.real(np.sum((a_tot / wa) * (b_tot / wb).T)))
        loo = []
        for (a_c, wa_c), (b_c, wb_c) in zip(parts_a, parts_b):
            ma = (a_tot - a_c) / (wa - wa_c)
            mb = (b_tot - b_c) / (wb - wb_c)
            loo.append(float(np.real(np.sum(ma * mb.T))))
        err = jackknife_stderr(np.array(loo))
        est = PurityEstimate(
            val,
            err,
            {
                "method": MONTE_CARLO,
                "count": integrator.count,
                "seed": integrator.seed,
                "stream_base": stream_base,
                "batches": 2,
            },
        )
    if integrator.tolerance is not None and est.stderr > integrator.tolerance:
        raise AccuracyError(
            f"purity error estimate {est.stderr:.3e} exceeds tolerance "
            f"{integrator.tolerance:.3e}",
            partial=est,
        )
    return est
