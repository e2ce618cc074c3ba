"""Monte Carlo sampling of path ensembles and a deterministic action minimizer.

The Metropolis chain performs random-scan single-site sweeps over the
interior nodes of a fixed-endpoint path, with acceptance ``min(1,
exp(-beta dI))`` computed from the two segments a site touches.  All
randomness flows from one counter-based (Philox) stream, drawn in fixed
block order, so a given seed and config reproduce the chain bit for bit.

For one-dimensional models that provide a plain scalar potential the sweep
kernel is compiled with numba; a pure-Python twin with identical update
arithmetic runs otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .action import _gradient_interior, _lagrangian_action_nodes, action_of_path
from .errors import DomainError, NonConvergenceError, UnsupportedModelError
from .models import DynamicalModel
from .trajectory import Trajectory

try:
    import numba
except ImportError:  # pragma: no cover - numba is an optional accelerator
    numba = None

__all__ = [
    "McmcConfig",
    "OptimizerConfig",
    "ChainStats",
    "metropolis_chain",
    "chain_samples",
    "default_proposal_width",
    "minimize_action",
    "anneal_to_classical",
]

_N_BATCHES = 32
_BLOCK_SWEEPS = 4096


@dataclass(frozen=True)
class McmcConfig:
    """Metropolis chain parameters; ``proposal_width=None`` selects
    ``sqrt(dt / (beta * m))``, the local curvature scale of the kinetic term."""

    beta: float
    n_steps: int
    burn_in: int = 0
    thin: int = 1
    seed: int = 0
    proposal_width: Optional[float] = None

    def __post_init__(self):
        if self.beta <= 0:
            raise DomainError(f"beta must be positive, got {self.beta}")
        if self.n_steps < 1:
            raise ValueError(f"n_steps must be >= 1, got {self.n_steps}")
        if not 0 <= self.burn_in < self.n_steps:
            raise ValueError(
                f"burn_in must satisfy 0 <= burn_in < n_steps, got {self.burn_in}"
            )
        if self.thin < 1:
            raise ValueError(f"thin must be >= 1, got {self.thin}")
        if self.proposal_width is not None and self.proposal_width < 0:
            raise ValueError(f"proposal_width must be >= 0, got {self.proposal_width}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")


@dataclass(frozen=True)
class OptimizerConfig:
    max_iters: int = 200_000
    grad_tol: float = 1e-8
    step_rule: str = "backtracking"
    step_size: float = 1.0

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.grad_tol <= 0:
            raise ValueError("grad_tol must be positive")
        if self.step_rule not in ("fixed", "backtracking"):
            raise ValueError(f"step_rule must be 'fixed' or 'backtracking', got {self.step_rule!r}")
        if self.step_size <= 0:
            raise ValueError("step_size must be positive")


@dataclass(frozen=True)
class ChainStats:
    mean_path: Trajectory
    stderr: np.ndarray
    acceptance_rate: float
    min_action_seen: float
    argmin_path: Trajectory

    def __post_init__(self):
        stderr = np.array(self.stderr, dtype=float)
        if np.any(stderr < 0):
            raise ValueError("stderr entries must be nonnegative")
        if not 0.0 <= self.acceptance_rate <= 1.0:
            raise ValueError("acceptance_rate must lie in [0, 1]")
        stderr.flags.writeable = False
        object.__setattr__(self, "stderr", stderr)


def default_proposal_width(beta: float, mass: float, dt: float) -> float:
    return math.sqrt(dt / (beta * mass))


def _make_scalar_runner(pot):
    """Sweep-block runner over a 1-d path; ``pot`` maps a float to a float.

    The same source serves both execution modes: compiled with numba when
    possible, plain Python otherwise, so both produce identical chains.
    """

    def run(q, seg_pot, sites, zs, us, batch_idx, sweep_actions, m, dt, beta,
            width, i_cur, i_min, q_min, batch_sums, batch_counts):
        n_sweeps, n_upd = sites.shape
        half_m_over_dt = 0.5 * m / dt
        acc = 0
        for s in range(n_sweeps):
            for j in range(n_upd):
                k = sites[s, j]
                qk = q[k]
                qn = qk + width * zs[s, j]
                left = q[k - 1]
                right = q[k + 1]
                d_kin = (
                    (right - qn) * (right - qn)
                    + (qn - left) * (qn - left)
                    - (right - qk) * (right - qk)
                    - (qk - left) * (qk - left)
                ) * half_m_over_dt
                vl = pot(0.5 * (left + qn))
                vr = pot(0.5 * (qn + right))
                d_act = d_kin - (vl + vr - seg_pot[k - 1] - seg_pot[k]) * dt
                if d_act <= 0.0 or us[s, j] < math.exp(-beta * d_act):
                    q[k] = qn
                    seg_pot[k - 1] = vl
                    seg_pot[k] = vr
                    i_cur += d_act
                    acc += 1
            if i_cur < i_min:
                i_min = i_cur
                for a in range(q.shape[0]):
                    q_min[a] = q[a]
            sweep_actions[s] = i_cur
            b = batch_idx[s]
            if b >= 0:
                for a in range(q.shape[0]):
                    batch_sums[b, a] += q[a]
                batch_counts[b] += 1
        return acc, i_cur, i_min

    return run


_COMPILED_RUNNERS: dict = {}


def _runner_cache_key(pot):
    closure = pot.__closure__ or ()
    try:
        values = tuple(cell.cell_contents for cell in closure)
        hash(values)
    except Exception:
        return None
    return (pot.__code__, values)


def _scalar_runner_for(form):
    """Compiled runner for this potential; the Python twin on any failure."""
    pot = form.scalar_potential
    key = _runner_cache_key(pot)
    if key is not None and key in _COMPILED_RUNNERS:
        return _COMPILED_RUNNERS[key]
    runner = None
    if numba is not None:
        try:
            jit_pot = numba.njit(pot)
            candidate = numba.njit(_make_scalar_runner(jit_pot))
            candidate(
                np.zeros(3), np.zeros(2), np.ones((1, 1), dtype=np.int64),
                np.zeros((1, 1)), np.zeros((1, 1)), np.full(1, -1, dtype=np.int64),
                np.zeros(1), 1.0, 1.0, 1.0, 0.1, 0.0, 0.0, np.zeros(3),
                np.zeros((_N_BATCHES, 3)), np.zeros(_N_BATCHES, dtype=np.int64),
            )
            runner = candidate
        except Exception:
            runner = None
    if runner is None:
        runner = _make_scalar_runner(pot)
    if key is not None:
        _COMPILED_RUNNERS[key] = runner
    return runner


def _make_vector_runner(form):
    """Generic runner for paths of any spatial dimension (pure Python)."""
    pot = form.potential

    def run(q, seg_pot, sites, zs, us, batch_idx, sweep_actions, m, dt, beta,
            width, i_cur, i_min, q_min, batch_sums, batch_counts):
        n_sweeps, n_upd = sites.shape[:2]
        half_m_over_dt = 0.5 * m / dt
        acc = 0
        for s in range(n_sweeps):
            for j in range(n_upd):
                k = sites[s, j]
                qk = q[k]
                qn = qk + width * zs[s, j]
                left = q[k - 1]
                right = q[k + 1]
                d_kin = (
                    np.dot(right - qn, right - qn)
                    + np.dot(qn - left, qn - left)
                    - np.dot(right - qk, right - qk)
                    - np.dot(qk - left, qk - left)
                ) * half_m_over_dt
                vl = float(pot(0.5 * (left + qn)))
                vr = float(pot(0.5 * (qn + right)))
                d_act = d_kin - (vl + vr - seg_pot[k - 1] - seg_pot[k]) * dt
                if d_act <= 0.0 or us[s, j] < math.exp(-beta * d_act):
                    q[k] = qn
                    seg_pot[k - 1] = vl
                    seg_pot[k] = vr
                    i_cur += d_act
                    acc += 1
            if i_cur < i_min:
                i_min = i_cur
                q_min[:] = q
            sweep_actions[s] = i_cur
            b = batch_idx[s]
            if b >= 0:
                batch_sums[b] += q
                batch_counts[b] += 1
        return acc, i_cur, i_min

    return run


def _run_chain(model: DynamicalModel, init: Trajectory, cfg: McmcConfig):
    form = model.lagrangian_form
    if form is None:
        raise UnsupportedModelError(
            f"sampling needs a kinetic/potential split; model '{model.name}' has none"
        )
    i0 = action_of_path(model, init)
    if not math.isfinite(i0):
        raise DomainError(f"initial path has non-finite action {i0!r}")

    n_nodes = init.nodes.shape[0]
    dim = init.dim
    n_upd = max(n_nodes - 2, 0)
    width = cfg.proposal_width
    if width is None:
        width = default_proposal_width(cfg.beta, form.mass, init.dt)

    scalar_mode = dim == 1 and form.scalar_potential is not None
    if scalar_mode:
        runner = _scalar_runner_for(form)
        q = np.array(init.nodes[:, 0], dtype=float)
        mids = 0.5 * (q[:-1] + q[1:])
        seg_pot = np.array([form.scalar_potential(x) for x in mids], dtype=float)
        batch_sums = np.zeros((_N_BATCHES, n_nodes))
    else:
        runner = _make_vector_runner(form)
        q = np.array(init.nodes, dtype=float)
        mids = 0.5 * (q[:-1] + q[1:])
        seg_pot = np.asarray(form.potential(mids), dtype=float)
        batch_sums = np.zeros((_N_BATCHES, n_nodes, dim))
    q_min = q.copy()

    # Retained sweeps and their batch assignment (contiguous blocks).
    retained = np.arange(cfg.burn_in, cfg.n_steps, cfg.thin)
    n_retained = retained.shape[0]
    batch_of_sweep = np.full(cfg.n_steps, -1, dtype=np.int64)
    batch_of_sweep[retained] = np.arange(n_retained, dtype=np.int64) * _N_BATCHES // n_retained

    rng = np.random.Generator(np.random.Philox(int(cfg.seed)))
    batch_counts = np.zeros(_N_BATCHES, dtype=np.int64)
    sweep_actions = np.empty(cfg.n_steps)
    i_cur = i0
    i_min = i0
    accepted = 0

    for start in range(0, cfg.n_steps, _BLOCK_SWEEPS):
        stop = min(start + _BLOCK_SWEEPS, cfg.n_steps)
        block = stop - start
        z_shape = (block, n_upd) if scalar_mode else (block, n_upd, dim)
        if n_upd > 0:
            sites = rng.integers(1, n_nodes - 1, size=(block, n_upd), dtype=np.int64)
            zs = rng.standard_normal(z_shape)
            us = rng.random((block, n_upd))
        else:
            sites = np.empty((block, 0), dtype=np.int64)
            zs = np.empty(z_shape)
            us = np.empty((block, 0))
        acc, i_cur, i_min = runner(
            q, seg_pot, sites, zs, us, batch_of_sweep[start:stop],
            sweep_actions[start:stop], form.mass, init.dt, cfg.beta, width,
            i_cur, i_min, q_min, batch_sums, batch_counts,
        )
        accepted += acc

    total_proposals = cfg.n_steps * n_upd
    rate = accepted / total_proposals if total_proposals > 0 else 1.0

    live = batch_counts > 0
    counts = batch_counts[live]
    sums = batch_sums[live]
    batch_means = sums / counts.reshape((-1,) + (1,) * (sums.ndim - 1))
    mean_nodes = np.sum(sums, axis=0) / np.sum(counts)
    if len(counts) > 1:
        spread = np.std(batch_means, axis=0, ddof=1) / math.sqrt(len(counts))
    else:
        spread = np.zeros_like(mean_nodes)
    if scalar_mode:
        mean_nodes = mean_nodes[:, None]
        stderr = spread
        argmin_nodes = q_min[:, None]
        final_nodes = q[:, None]
    else:
        stderr = np.linalg.norm(spread, axis=-1)
        argmin_nodes = q_min
        final_nodes = q

    argmin_path = Trajectory(init.t0, init.dt, argmin_nodes)
    stats = ChainStats(
        mean_path=Trajectory(init.t0, init.dt, mean_nodes),
        stderr=np.asarray(stderr, dtype=float).reshape(n_nodes),
        acceptance_rate=rate,
        min_action_seen=action_of_path(model, argmin_path),
        argmin_path=argmin_path,
    )
    samples = np.column_stack([retained.astype(float), sweep_actions[retained]])
    return stats, final_nodes, samples


def metropolis_chain(model: DynamicalModel, init: Trajectory, cfg: McmcConfig) -> ChainStats:
    """Sample the path ensemble at ``cfg.beta`` from the fixed endpoints of ``init``."""
    stats, _, _ = _run_chain(model, init, cfg)
    return stats


def chain_samples(model: DynamicalModel, init: Trajectory, cfg: McmcConfig):
    """Like :func:`metropolis_chain` but also returns the retained
    ``(sweep, action)`` records as an ``(n_retained, 2)`` array."""
    stats, _, samples = _run_chain(model, init, cfg)
    return stats, samples


def minimize_action(model: DynamicalModel, init: Trajectory,
                    cfg: OptimizerConfig = OptimizerConfig()) -> Trajectory:
    """Gradient descent on the discrete action with fixed endpoints.

    Stops when the sup norm of the interior gradient drops below
    ``grad_tol``; raises :class:`NonConvergenceError` (carrying the last
    iterate) if the iteration budget runs out first.
    """
    form = model.lagrangian_form
    if form is None:
        raise UnsupportedModelError(
            f"action minimization needs a kinetic/potential split; model '{model.name}' has none"
        )
    if init.n_segments < 2:
        raise UnsupportedModelError("path has no interior nodes to optimize")

    nodes = np.array(init.nodes, dtype=float)
    dt = init.dt
    f_cur = _lagrangian_action_nodes(form, nodes, dt)
    step = cfg.step_size
    for _ in range(cfg.max_iters):
        grad = _gradient_interior(form, nodes, dt)
        if np.max(np.abs(grad)) <= cfg.grad_tol:
            return Trajectory(init.t0, dt, nodes)
        if cfg.step_rule == "fixed":
            nodes[1:-1] -= cfg.step_size * grad
            continue
        gsq = float(np.sum(grad * grad))
        accepted = False
        for _ in range(60):
            trial = nodes.copy()
            trial[1:-1] -= step * grad
            f_trial = _lagrangian_action_nodes(form, trial, dt)
            if f_trial <= f_cur - 1e-4 * step * gsq:
                nodes = trial
                f_cur = f_trial
                step *= 2.0
                accepted = True
                break
            step *= 0.5
        if not accepted:
            raise NonConvergenceError(
                "backtracking line search stalled",
                last_path=Trajectory(init.t0, dt, nodes),
            )
    raise NonConvergenceError(
        f"no convergence within {cfg.max_iters} iterations (grad_tol={cfg.grad_tol:g})",
        last_path=Trajectory(init.t0, dt, nodes),
    )


def anneal_to_classical(model: DynamicalModel, init: Trajectory, schedule,
                        seed: int = 0) -> ChainStats:
    """Chained Metropolis segments with increasing ``beta``.

    The default proposal width shrinks as ``beta**-0.5`` from segment to
    segment.  Returns the statistics of the final segment, except that
    ``min_action_seen``/``argmin_path`` cover the whole schedule.
    """
    schedule = list(schedule)
    if not schedule:
        raise ValueError("annealing schedule must not be empty")
    betas = [b for b, _ in schedule]
    if any(b2 <= b1 for b1, b2 in zip(betas, betas[1:])):
        raise ValueError("annealing schedule must be strictly increasing in beta")

    seeds = np.random.SeedSequence(int(seed)).spawn(len(schedule))
    current = init
    best_action = math.inf
    best_path = init
    stats = None
    for (beta, n_steps), seq in zip(schedule, seeds):
        cfg = McmcConfig(
            beta=beta,
            n_steps=n_steps,
            burn_in=n_steps // 2 if n_steps > 1 else 0,
            thin=1,
            seed=int(seq.generate_state(1, dtype=np.uint64)[0]),
        )
        stats, final_nodes, _ = _run_chain(model, current, cfg)
        if stats.min_action_seen < best_action:
            best_action = stats.min_action_seen
            best_path = stats.argmin_path
        current = Trajectory(init.t0, init.dt, final_nodes)
    return ChainStats(
        mean_path=stats.mean_path,
        stderr=stats.stderr,
        acceptance_rate=stats.acceptance_rate,
        min_action_seen=best_action,
        argmin_path=best_path,
    )
