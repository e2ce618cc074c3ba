"""Discretized fixed-endpoint paths on a uniform grid of the order parameter."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError

__all__ = ["Trajectory", "write_trajectory_csv", "read_trajectory_csv"]

# Full double precision: 17 significant digits round-trip exactly.
_FLOAT_FMT = "%.17g"


def _as_node_array(values, name: str) -> np.ndarray:
    # Copy so that freezing the trajectory never locks a caller's buffer.
    arr = np.array(values, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise DimensionMismatchError(f"{name} must be a (n_nodes, dim) array, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class Trajectory:
    """A path sampled on the uniform grid ``t0 + k*dt``, ``k = 0..N``.

    ``nodes`` holds the coordinate vector at each grid point; ``momenta``
    is optional and, when present, is synchronized with the nodes.  The
    two endpoint nodes are considered fixed under any variation.
    """

    t0: float
    dt: float
    nodes: np.ndarray
    momenta: np.ndarray | None = field(default=None)

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        nodes = _as_node_array(self.nodes, "nodes")
        if nodes.shape[0] < 2:
            raise ValueError("a trajectory needs at least two nodes (N >= 1 segments)")
        nodes.flags.writeable = False
        object.__setattr__(self, "nodes", nodes)
        if self.momenta is not None:
            momenta = _as_node_array(self.momenta, "momenta")
            if momenta.shape != nodes.shape:
                raise DimensionMismatchError(
                    f"momenta shape {momenta.shape} does not match nodes shape {nodes.shape}"
                )
            momenta.flags.writeable = False
            object.__setattr__(self, "momenta", momenta)

    @property
    def n_segments(self) -> int:
        return self.nodes.shape[0] - 1

    @property
    def dim(self) -> int:
        return self.nodes.shape[1]

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.nodes.shape[0])

    @property
    def t_end(self) -> float:
        return self.t0 + self.dt * self.n_segments

    def with_nodes(self, nodes: np.ndarray) -> "Trajectory":
        """Copy of this trajectory with replaced coordinates (momenta dropped)."""
        return Trajectory(self.t0, self.dt, np.array(nodes, dtype=float))


def write_trajectory_csv(path, traj: Trajectory) -> None:
    """Write ``t,q0..q{n-1}[,p0..p{n-1}]``, one node per row, full precision."""
    dim = traj.dim
    header = ["t"] + [f"q{i}" for i in range(dim)]
    columns = [traj.times[:, None], traj.nodes]
    if traj.momenta is not None:
        header += [f"p{i}" for i in range(dim)]
        columns.append(traj.momenta)
    data = np.hstack(columns)
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in data:
            fh.write(",".join(_FLOAT_FMT % v for v in row) + "\n")


def read_trajectory_csv(path) -> Trajectory:
    """Inverse of :func:`write_trajectory_csv` (uniform grid is re-derived)."""
    with open(path, "r", newline="") as fh:
        header = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    if header[0] != "t":
        raise ValueError(f"unexpected trajectory CSV header: {header!r}")
    dim = sum(1 for name in header if name.startswith("q"))
    has_momenta = any(name.startswith("p") for name in header)
    t = data[:, 0]
    if len(t) < 2:
        raise ValueError("trajectory CSV must contain at least two nodes")
    dts = np.diff(t)
    dt = dts[0]
    if not np.allclose(dts, dt, rtol=1e-10, atol=0.0):
        raise ValueError("trajectory CSV grid is not uniform")
    nodes = data[:, 1 : 1 + dim]
    momenta = data[:, 1 + dim : 1 + 2 * dim] if has_momenta else None
    return Trajectory(t0=float(t[0]), dt=float(dt), nodes=nodes, momenta=momenta)
