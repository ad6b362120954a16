"""Local Laplacian comparison between coupled cut worlds.

The question here is whether removing a minimum cut between two meaning
nodes leaves a spectral fingerprint on the sampled symbol graphs: both
worlds are sampled with shared randomness, local Laplacians are taken on
the union of the search neighborhoods, normalized by their own spectral
norm, and the norm of the difference is compared against the analytic
closeness bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .bounds import laplacian_diff_bound
from .graph import Graph, _bfs_levels, ball_bound
from .meaning import CutPair, gen_er
from .sampler import SampleParams, SymbolGraph, sample_coupled

# Fixed entropy for the power-iteration start vector. Deterministic on
# purpose: norm computations must not perturb caller seed streams.
_START_VECTOR_SEED = 0x5EED

MAX_LOCAL_NODES = 4000


class SpectralNormResult(NamedTuple):
    value: float
    converged: bool
    iterations: int


def laplacian_of(g: Graph, nodes: Sequence[int]) -> np.ndarray:
    """Combinatorial Laplacian of the induced subgraph on ``nodes``.

    Degrees are induced degrees, so every row sums to exactly zero and
    the matrix is symmetric by construction. Duplicate nodes are refused
    rather than silently collapsed.
    """
    idx = {}
    for pos, u in enumerate(nodes):
        g._check_node(u)
        if u in idx:
            raise ValueError(f"duplicate node {u} in induced subset")
        idx[u] = pos
    k = len(idx)
    lap = np.zeros((k, k), dtype=np.float64)
    for u, pu in idx.items():
        for v in g.neighbors(u):
            pv = idx.get(v)
            if pv is not None and pv > pu:
                lap[pu, pv] = -1.0
                lap[pv, pu] = -1.0
                lap[pu, pu] += 1.0
                lap[pv, pv] += 1.0
    return lap


def adjacency_of(g: Graph, nodes: Sequence[int]) -> np.ndarray:
    """0/1 adjacency matrix of the induced subgraph on ``nodes``."""
    idx = {}
    for pos, u in enumerate(nodes):
        g._check_node(u)
        if u in idx:
            raise ValueError(f"duplicate node {u} in induced subset")
        idx[u] = pos
    k = len(idx)
    adj = np.zeros((k, k), dtype=np.float64)
    for u, pu in idx.items():
        for v in g.neighbors(u):
            pv = idx.get(v)
            if pv is not None and pv > pu:
                adj[pu, pv] = 1.0
                adj[pv, pu] = 1.0
    return adj


def spectral_norm(m: np.ndarray, tol: float = 1e-9, max_iter: int = 10_000) -> SpectralNormResult:
    """Largest absolute eigenvalue of a symmetric matrix by power iteration.

    Iterates on m @ (m @ x), i.e. the square of the matrix, so dominant
    eigenvalues of opposite sign cannot trap the Rayleigh quotient at a
    spurious fixed point. Convergence means successive norm estimates
    agree to ``tol`` relative; running out of iterations returns the best
    estimate with ``converged=False`` rather than raising.
    """
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"matrix must be square, got shape {m.shape}")
    if not np.array_equal(m, m.T):
        raise ValueError("matrix must be exactly symmetric")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    if tol <= 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    k = m.shape[0]
    if k == 0 or not m.any():
        return SpectralNormResult(0.0, True, 0)
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(_START_VECTOR_SEED)))
    x = rng.standard_normal(k)
    x /= np.linalg.norm(x)
    estimate = 0.0
    for it in range(1, max_iter + 1):
        y = m @ x
        ny = float(np.linalg.norm(y))
        if ny == 0.0:
            # x sits in the null space; with a random start this only
            # happens when the matrix annihilates everything we can see.
            return SpectralNormResult(0.0, True, it)
        current = ny  # ||m x|| for unit x: sqrt of the Rayleigh quotient of m^2
        z = m @ y
        nz = float(np.linalg.norm(z))
        if nz == 0.0:
            return SpectralNormResult(current, True, it)
        x = z / nz
        if it > 1 and abs(current - estimate) <= tol * max(current, 1e-300):
            return SpectralNormResult(current, True, it)
        estimate = current
    return SpectralNormResult(estimate, False, max_iter)


@dataclass(frozen=True)
class SpectralTrial:
    """One coupled comparison between a cut world pair."""

    seed: int
    n: int
    lam: int
    p_minus: float
    d: int
    d_tilde: int
    cut_size: int
    neighborhood_size: int
    norm_l: float
    norm_l_prime: float
    diff_normalized: float
    analytic_bound: float
    within_bound: bool
    converged: bool


def _local_nodes(sg: SymbolGraph, sgp: SymbolGraph, w: int, w_prime: int, d_tilde: int) -> list[int]:
    seen: set[int] = set()
    for g in (sg.graph, sgp.graph):
        for s in (w, w_prime):
            levels = _bfs_levels(g, s, cap=d_tilde)
            seen.update(u for u, lv in enumerate(levels) if lv >= 0)
    return sorted(seen)


def coupled_cut_trial(
    cp: CutPair,
    params: SampleParams,
    d_tilde: int,
    seed: int,
    tol: float = 1e-6,
) -> SpectralTrial:
    """Sample both worlds, compare normalized local Laplacians.

    The local node set is the union of the d_tilde-neighborhoods of the
    representatives of m and m' in both sampled graphs, capped at
    ``MAX_LOCAL_NODES``. Each Laplacian is normalized by its own spectral
    norm (a zero-norm Laplacian is left as is). Trial norms default to a
    relative tolerance of 1e-6, ample against bounds of order 0.1.
    """
    if d_tilde < 0:
        raise ValueError(f"search radius must be nonnegative, got {d_tilde}")
    sg, sgp = sample_coupled(cp, params, seed)
    w = sg.representative(cp.m)
    w_prime = sg.representative(cp.m_prime)
    nodes = _local_nodes(sg, sgp, w, w_prime, d_tilde)
    if len(nodes) > MAX_LOCAL_NODES:
        raise ValueError(
            f"local neighborhood has {len(nodes)} nodes, cap is {MAX_LOCAL_NODES}"
        )
    lap = laplacian_of(sg.graph, nodes)
    lap_p = laplacian_of(sgp.graph, nodes)
    res = spectral_norm(lap, tol=tol)
    res_p = spectral_norm(lap_p, tol=tol)
    # Gershgorin sanity on every trial: the Laplacian norm can never pass
    # twice the largest induced degree.
    for mat, r in ((lap, res), (lap_p, res_p)):
        max_deg = float(mat.diagonal().max(initial=0.0))
        if r.value > 2.0 * max_deg * (1.0 + 1e-9) + 1e-12:
            raise AssertionError(
                f"spectral norm {r.value} exceeds Gershgorin limit {2.0 * max_deg}"
            )
    norm_l = res.value
    norm_lp = res_p.value
    lt = lap / norm_l if norm_l > 0 else lap
    ltp = lap_p / norm_lp if norm_lp > 0 else lap_p
    res_diff = spectral_norm(lt - ltp, tol=tol)
    bound = laplacian_diff_bound(cp.g.n, params.lam, ball_bound(cp.g.graph, 1))
    return SpectralTrial(
        seed=seed,
        n=cp.g.n,
        lam=params.lam,
        p_minus=params.p_minus,
        d=cp.d,
        d_tilde=d_tilde,
        cut_size=len(cp.cut),
        neighborhood_size=len(nodes),
        norm_l=norm_l,
        norm_l_prime=norm_lp,
        diff_normalized=res_diff.value,
        analytic_bound=bound,
        within_bound=res_diff.value <= bound,
        converged=res.converged and res_p.converged and res_diff.converged,
    )


SPECTRAL_CSV_HEADER = "seed,n,lambda,p_minus,d,d_tilde,cut_size,U_size,normL,normLp,diff,bound,within"


def spectral_csv_record(trial: SpectralTrial) -> str:
    fields = [
        trial.seed, trial.n, trial.lam, trial.p_minus, trial.d, trial.d_tilde,
        trial.cut_size, trial.neighborhood_size, trial.norm_l, trial.norm_l_prime,
        trial.diff_normalized, trial.analytic_bound, int(trial.within_bound),
    ]
    return ",".join(repr(f) if isinstance(f, float) else str(f) for f in fields)


def adjacency_norm_ratio(n: int, p: float, seed: int) -> float:
    """Diagnostic only: adjacency spectral norm over sqrt(2 n ln n).

    Recorded for the empirical report; no inequality is asserted on it
    anywhere in the package.
    """
    if n < 2:
        raise ValueError(f"need at least two nodes, got {n}")
    if n > MAX_LOCAL_NODES:
        raise ValueError(f"dense diagnostic capped at {MAX_LOCAL_NODES} nodes")
    gm = gen_er(n, p, seed)
    adj = adjacency_of(gm.graph, range(n))
    norm = spectral_norm(adj).value
    return norm / math.sqrt(2.0 * n * math.log(n))
