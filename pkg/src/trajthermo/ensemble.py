"""Exact canonical ensemble over an enumerable lattice of fixed-endpoint paths.

The path space is a finite surrogate: one spatial dimension, ``n_slices``
uniform time steps, interior nodes restricted to ``levels`` equally spaced
values centered on the endpoint midpoint.  Everything downstream (partition
function, weights, entropy, mean action) is then an exact finite sum, which
is what makes the maximum-entropy statements checkable to round-off.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, DomainError, InfeasibleConstraintError, NonConvergenceError
from .models import DynamicalModel
from .trajectory import Trajectory

__all__ = [
    "PathLattice",
    "PathDistribution",
    "MultiplierState",
    "enumerate_paths",
    "path_actions",
    "boltzmann_distribution",
    "path_entropy",
    "mean_action",
    "solve_beta",
    "maxent_stationarity",
    "most_probable_path",
]

DEFAULT_CAPACITY = 10**7
_CHUNK = 1 << 15

# Weights below this threshold contribute nothing to the entropy sum.
_ENTROPY_FLOOR = 1e-300


@dataclass(frozen=True)
class PathLattice:
    """Finite path space: ``levels**(n_slices - 1)`` fixed-endpoint paths."""

    n_slices: int
    dt: float
    levels: int
    dx: float
    q_start: float
    q_end: float
    capacity: int = DEFAULT_CAPACITY

    def __post_init__(self):
        if self.n_slices < 1:
            raise ValueError(f"n_slices must be >= 1, got {self.n_slices}")
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.levels < 1 or self.levels % 2 == 0:
            raise ValueError(f"levels must be an odd integer >= 1, got {self.levels}")
        if self.dx <= 0:
            raise ValueError(f"dx must be positive, got {self.dx}")

    @property
    def n_interior(self) -> int:
        return self.n_slices - 1

    @property
    def n_paths(self) -> int:
        return self.levels ** self.n_interior

    @property
    def q_mid(self) -> float:
        return 0.5 * (self.q_start + self.q_end)

    @property
    def level_values(self) -> np.ndarray:
        half = (self.levels - 1) // 2
        return self.q_mid + self.dx * np.arange(-half, half + 1)

    def check_capacity(self) -> None:
        if self.n_paths > self.capacity:
            raise CapacityError(
                f"path space size {self.levels}^({self.n_slices}-1) = {self.n_paths} "
                f"exceeds the limit {self.capacity}"
            )

    def nodes_for_indices(self, indices: np.ndarray) -> np.ndarray:
        """Coordinate arrays ``(len(indices), n_slices + 1)`` for path indices.

        Index digits are decoded most-significant-first, i.e. enumeration is
        lexicographic over the interior-node level indices.
        """
        indices = np.asarray(indices, dtype=np.int64)
        n_int = self.n_interior
        nodes = np.empty((indices.shape[0], self.n_slices + 1))
        nodes[:, 0] = self.q_start
        nodes[:, -1] = self.q_end
        values = self.level_values
        rem = indices
        for j in range(n_int):
            power = self.levels ** (n_int - 1 - j)
            digit, rem = np.divmod(rem, power)
            nodes[:, 1 + j] = values[digit]
        return nodes

    def trajectory(self, index: int) -> Trajectory:
        nodes = self.nodes_for_indices(np.array([index]))[0]
        return Trajectory(t0=0.0, dt=self.dt, nodes=nodes[:, None])


@dataclass(frozen=True)
class MultiplierState:
    alpha: float
    beta: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and math.isfinite(self.beta)):
            raise ValueError("multipliers must be finite")


@dataclass(frozen=True)
class PathDistribution:
    """Boltzmann weights over an enumerated lattice, with summary statistics.

    ``Z`` is the shifted partition sum ``sum exp(-beta (I - shift))`` with
    ``shift = min(actions)``; the unshifted log partition function is
    ``log_Z = log(Z) - beta * shift``.  Immutable snapshot.
    """

    lattice: PathLattice
    beta: float
    actions: np.ndarray
    weights: np.ndarray
    Z: float
    shift: float
    entropy: float = field(default=float("nan"))
    mean_action: float = field(default=float("nan"))

    def __post_init__(self):
        actions = np.array(self.actions, dtype=float)
        weights = np.array(self.weights, dtype=float)
        if actions.shape != weights.shape or actions.ndim != 1:
            raise ValueError("actions and weights must be 1-d arrays of equal length")
        total = float(np.sum(weights))
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1 within 1e-12, got {total!r}")
        if np.any(weights < 0.0) or np.any(weights > 1.0):
            raise ValueError("weights must lie in [0, 1]")
        actions.flags.writeable = False
        weights.flags.writeable = False
        object.__setattr__(self, "actions", actions)
        object.__setattr__(self, "weights", weights)
        if math.isnan(self.entropy):
            object.__setattr__(self, "entropy", _entropy_of_weights(weights))
        if math.isnan(self.mean_action):
            object.__setattr__(self, "mean_action", float(np.dot(weights, actions)))

    @property
    def log_Z(self) -> float:
        return math.log(self.Z) - self.beta * self.shift

    @property
    def argmax_index(self) -> int:
        return int(np.argmin(self.actions))

    def summary(self) -> dict:
        return {
            "beta": self.beta,
            "Z_shifted": self.Z,
            "shift": self.shift,
            "entropy": self.entropy,
            "mean_action": self.mean_action,
            "argmax_index": self.argmax_index,
        }


def enumerate_paths(lattice: PathLattice) -> list[Trajectory]:
    """All lattice paths in lexicographic interior-level order."""
    lattice.check_capacity()
    nodes = lattice.nodes_for_indices(np.arange(lattice.n_paths))
    return [Trajectory(t0=0.0, dt=lattice.dt, nodes=row[:, None]) for row in nodes]


def path_actions(lattice: PathLattice, model: DynamicalModel) -> np.ndarray:
    """Action of every enumerated path, computed in fixed chunks."""
    lattice.check_capacity()
    form = model.lagrangian_form
    if form is None:
        raise DomainError(
            f"path ensembles need a kinetic/potential split; model '{model.name}' has none"
        )
    n = lattice.n_paths
    out = np.empty(n)
    for start in range(0, n, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, n))
        nodes = lattice.nodes_for_indices(idx)[..., None]
        dq = np.diff(nodes, axis=1)
        mid = 0.5 * (nodes[:, :-1] + nodes[:, 1:])
        kinetic = form.mass * np.sum(dq * dq, axis=-1) / (2.0 * lattice.dt)
        out[idx] = np.sum(kinetic - form.potential(mid) * lattice.dt, axis=-1)
    return out


def _entropy_of_weights(weights: np.ndarray) -> float:
    live = weights[weights >= _ENTROPY_FLOOR]
    return float(-np.sum(live * np.log(live)))


def boltzmann_distribution(lattice: PathLattice, model: DynamicalModel,
                           beta: float) -> PathDistribution:
    """Canonical weights ``exp(-beta I) / Z`` over the lattice paths.

    Actions are shifted by their minimum before exponentiation; the shift
    only rescales ``Z`` and leaves every weight ratio unchanged.
    """
    if beta <= 0:
        raise DomainError(f"beta must be positive, got {beta}")
    actions = path_actions(lattice, model)
    return _distribution_from_actions(lattice, beta, actions)


def _distribution_from_actions(lattice, beta, actions) -> PathDistribution:
    shift = float(np.min(actions))
    raw = np.exp(-beta * (actions - shift))
    z = float(np.sum(raw))
    return PathDistribution(
        lattice=lattice, beta=beta, actions=actions, weights=raw / z, Z=z, shift=shift
    )


def path_entropy(dist: PathDistribution) -> float:
    """Shannon entropy ``-sum p log p`` (natural log) of the path weights."""
    return _entropy_of_weights(dist.weights)


def mean_action(dist: PathDistribution) -> float:
    """Probability-weighted mean of the path actions."""
    return float(np.dot(dist.weights, dist.actions))


def _mean_action_at(actions: np.ndarray, shift: float, beta: float) -> float:
    raw = np.exp(-beta * (actions - shift))
    return float(np.dot(raw, actions) / np.sum(raw))


def solve_beta(lattice: PathLattice, model: DynamicalModel, target_mean_action: float,
               tol: float) -> float:
    """Invert the strictly decreasing map ``beta -> mean action`` by bisection.

    Feasible targets lie strictly between the minimum action (the
    ``beta -> inf`` limit) and the arithmetic mean (the ``beta -> 0`` limit).
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    actions = path_actions(lattice, model)
    i_min = float(np.min(actions))
    mean0 = float(np.mean(actions))
    if not (i_min < target_mean_action < mean0):
        raise InfeasibleConstraintError(
            f"target mean action {target_mean_action!r} is outside the open interval "
            f"({i_min!r}, {mean0!r}); the multiplier would be 0, infinite or negative"
        )

    def f(beta):
        return _mean_action_at(actions, i_min, beta)

    lo, hi = 1e-6, 1e6
    for _ in range(200):
        if f(lo) > target_mean_action:
            break
        lo *= 0.015625
    else:
        raise NonConvergenceError("could not bracket beta from below")
    for _ in range(200):
        if f(hi) < target_mean_action:
            break
        hi *= 64.0
    else:
        raise NonConvergenceError("could not bracket beta from above")

    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if hi - lo <= 1e-13 * max(1.0, hi):
            break
        if f(mid) > target_mean_action:
            lo = mid
        else:
            hi = mid
    beta = 0.5 * (lo + hi)
    if abs(f(beta) - target_mean_action) > tol:
        raise NonConvergenceError(
            f"bisection stalled: |mean action - target| = "
            f"{abs(f(beta) - target_mean_action):.3e} > tol = {tol:.3e}"
        )
    return beta


def maxent_stationarity(dist: PathDistribution, mult: MultiplierState) -> float:
    """Max residual of the multiplier stationarity identity over all paths.

    For Boltzmann weights with ``alpha = log_Z - 1`` the identity
    ``log p + 1 + alpha + beta I = 0`` holds exactly; any other weight
    assignment leaves a nonzero residual.
    """
    if np.any(dist.weights <= 0.0):
        raise DomainError("stationarity residual undefined for zero weights")
    residual = np.log(dist.weights) + 1.0 + mult.alpha + mult.beta * dist.actions
    return float(np.max(np.abs(residual)))


def most_probable_path(dist: PathDistribution):
    """Index and trajectory of the maximal weight (ties: lowest index).

    Computed as the argmin of the action list, which coincides with the
    argmax of the weights because ``exp(-beta x)`` is strictly decreasing.
    """
    index = dist.argmax_index
    return index, dist.lattice.trajectory(index)
