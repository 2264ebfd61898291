"""Integrator specification, Gauss-Hermite grids, and chunked estimators.

Monte Carlo estimation is organized in deterministic chunks: chunk c of a
run draws from a counter-based Philox stream keyed by (seed, stream_base
+ c), so estimates are bit-identical for a fixed seed no matter how many
threads execute the chunks.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

MONTE_CARLO = "monte-carlo"
GAUSS_HERMITE = "gauss-hermite"

MIN_COUNT = 1_000
MIN_NODES = 8
MAX_GRID_POINTS = 20_000_000


@dataclass(frozen=True)
class IntegratorSpec:
    """How to evaluate momentum-space expectations.

    monte-carlo uses ``count`` weighted samples (error: jackknife standard
    error over chunks); gauss-hermite uses ``nodes`` points per dimension
    (error: delta against a coarser grid). ``tolerance``, when set, turns
    an error estimate above it into an AccuracyError.
    """

    method: str = MONTE_CARLO
    count: int = 100_000
    nodes: int = 24
    seed: int = 0
    chunk_size: int = 65_536
    threads: int = 1
    tolerance: float | None = None

    def __post_init__(self):
        if self.method not in (MONTE_CARLO, GAUSS_HERMITE):
            raise ValueError(f"unknown integrator method {self.method!r}")
        if self.method == MONTE_CARLO and self.count < MIN_COUNT:
            raise ValueError(f"count must be >= {MIN_COUNT}")
        if self.method == GAUSS_HERMITE and self.nodes < MIN_NODES:
            raise ValueError(f"nodes must be >= {MIN_NODES}")
        if self.seed < 0 or self.seed > 0xFFFFFFFFFFFFFFFF:
            raise ValueError("seed must fit in a u64")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")


def philox_generator(seed: int, stream: int) -> np.random.Generator:
    """Counter-based generator for (seed, stream); streams never overlap."""
    key = np.array([seed, stream], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def chunk_sizes(total: int, chunk_size: int, min_chunks: int = 8) -> list[int]:
    """Split ``total`` into deterministic chunk sizes (at least min_chunks
    when total allows, so jackknife error estimates are meaningful)."""
    if total < 1:
        raise ValueError("total must be >= 1")
    n_chunks = max(min_chunks, -(-total // chunk_size))
    n_chunks = min(n_chunks, total)
    base = total // n_chunks
    rem = total % n_chunks
    return [base + (1 if i < rem else 0) for i in range(n_chunks)]


def map_chunks(worker, n_chunks: int, threads: int = 1) -> list:
    """Run worker(c) for c in range(n_chunks), results in chunk order.

    Thread-count independent: per-chunk work is deterministic and the
    reduction order is fixed by the chunk index.
    """
    if threads <= 1:
        return [worker(c) for c in range(n_chunks)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(worker, range(n_chunks)))


def jackknife_stderr(loo_values: np.ndarray) -> float:
    """Standard error from leave-one-out statistics (one per chunk)."""
    v = np.asarray(loo_values, dtype=float)
    k = v.size
    if k < 2:
        return float("nan")
    return float(np.sqrt((k - 1) / k * np.sum((v - v.mean()) ** 2)))


def gauss_hermite_chunks(mean: np.ndarray, cov: np.ndarray, nodes: int):
    """Yield (points, weights) blocks of the tensor Gauss-Hermite grid for
    a Gaussian density with the given mean and covariance.

    The weights are normalized probability weights (they sum to 1), so
    expectations are plain weighted sums over all blocks.
    """
    mean = np.asarray(mean, dtype=float)
    dim = mean.size
    if nodes**dim > MAX_GRID_POINTS:
        raise ValueError(
            f"gauss-hermite grid {nodes}^{dim} exceeds {MAX_GRID_POINTS} points; "
            "use monte-carlo for this dimension"
        )
    x, w = np.polynomial.hermite.hermgauss(nodes)
    w = w / np.sqrt(np.pi)  # normalize per-dimension weights to sum 1
    chol = np.linalg.cholesky(np.asarray(cov, dtype=float))
    scale = np.sqrt(2.0) * chol
    if dim == 1:
        yield mean + scale[0, 0] * x[:, None], w
        return
    # block over the leading coordinate to bound memory
    tail = np.meshgrid(*([x] * (dim - 1)), indexing="ij")
    tail_pts = np.stack([t.ravel() for t in tail], axis=1)
    tail_w = np.ones(tail_pts.shape[0])
    for t in np.meshgrid(*([w] * (dim - 1)), indexing="ij"):
        tail_w = tail_w * t.ravel()
    for i in range(nodes):
        u = np.concatenate(
            [np.full((tail_pts.shape[0], 1), x[i]), tail_pts], axis=1
        )
        yield mean + u @ scale.T, w[i] * tail_w


def gauss_hermite_point_count(dim: int, nodes: int) -> int:
    return nodes**dim
