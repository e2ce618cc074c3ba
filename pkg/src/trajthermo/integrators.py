"""Time evolution of phase points along the canonical flow.

Two schemes are provided: a synchronized kick-drift-kick leapfrog for models
with a kinetic/potential split (second order, symplectic) and classical RK4
for arbitrary generators (the gas flows have non-separable ``H``).  Both
operate on batched states of shape ``(..., dim)`` so that loops of phase
points evolve in one vectorized pass.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UnsupportedSchemeError
from .models import DynamicalModel, PhasePoint
from .trajectory import Trajectory

__all__ = ["IntegratorConfig", "integrate_characteristic", "evolve_batch"]

SCHEMES = ("leapfrog", "rk4")


@dataclass(frozen=True)
class IntegratorConfig:
    scheme: str
    dt: float
    n_steps: int

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise UnsupportedSchemeError(
                f"scheme must be one of {SCHEMES}, got {self.scheme!r}"
            )
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise ValueError(f"n_steps must be a positive integer, got {self.n_steps}")

    @property
    def span(self) -> float:
        return self.dt * self.n_steps

    @classmethod
    def for_span(cls, scheme: str, span: float, dt_target: float) -> "IntegratorConfig":
        """Config covering ``span`` with a step as close as possible to ``dt_target``."""
        if span <= 0 or dt_target <= 0:
            raise ValueError("span and dt_target must be positive")
        n = max(1, int(round(span / dt_target)))
        return cls(scheme=scheme, dt=span / n, n_steps=n)

    def check_span(self, span: float) -> None:
        """dt * n_steps must reproduce the requested span to 1e-12 relative."""
        target = self.span
        if abs(target - span) > 1e-12 * max(abs(span), abs(target)):
            raise ValueError(
                f"integrator covers span {target!r}, requested {span!r} "
                "(dt * n_steps must match the evolution span)"
            )


def _leapfrog_steps(model, t0, q, p, dt, n_steps, record):
    form = model.lagrangian_form
    m = form.mass
    grad = form.grad_potential
    for k in range(n_steps):
        p_half = p - 0.5 * dt * grad(q)
        q = q + dt * p_half / m
        p = p_half - 0.5 * dt * grad(q)
        if record is not None:
            record[0][k + 1] = q
            record[1][k + 1] = p
    return q, p


def _rk4_steps(model, t0, q, p, dt, n_steps, record):
    def rhs(t, q, p):
        return model.grad_p(t, q, p), -model.grad_q(t, q, p)

    t = t0
    for k in range(n_steps):
        k1q, k1p = rhs(t, q, p)
        k2q, k2p = rhs(t + 0.5 * dt, q + 0.5 * dt * k1q, p + 0.5 * dt * k1p)
        k3q, k3p = rhs(t + 0.5 * dt, q + 0.5 * dt * k2q, p + 0.5 * dt * k2p)
        k4q, k4p = rhs(t + dt, q + dt * k3q, p + dt * k3p)
        q = q + (dt / 6.0) * (k1q + 2.0 * k2q + 2.0 * k3q + k4q)
        p = p + (dt / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        t = t0 + (k + 1) * dt
        if record is not None:
            record[0][k + 1] = q
            record[1][k + 1] = p
    return q, p


def _stepper_for(model: DynamicalModel, cfg: IntegratorConfig):
    if cfg.scheme == "leapfrog":
        if model.lagrangian_form is None:
            raise UnsupportedSchemeError(
                f"leapfrog needs a kinetic/potential split; model '{model.name}' "
                "has none (use rk4)"
            )
        return _leapfrog_steps
    return _rk4_steps


def integrate_characteristic(
    model: DynamicalModel, x0: PhasePoint, cfg: IntegratorConfig
) -> Trajectory:
    """Evolve ``x0`` for ``n_steps`` steps; returns the full trajectory with momenta."""
    if x0.dim != model.dim:
        raise UnsupportedSchemeError(
            f"initial point has dim {x0.dim}, model expects {model.dim}"
        ) from None
    stepper = _stepper_for(model, cfg)
    n = cfg.n_steps
    nodes = np.empty((n + 1, model.dim))
    momenta = np.empty((n + 1, model.dim))
    nodes[0] = x0.q
    momenta[0] = x0.p
    stepper(model, x0.t, x0.q.copy(), x0.p.copy(), cfg.dt, n, (nodes, momenta))
    return Trajectory(t0=x0.t, dt=cfg.dt, nodes=nodes, momenta=momenta)


def evolve_batch(model: DynamicalModel, t0: float, q: np.ndarray, p: np.ndarray,
                 cfg: IntegratorConfig):
    """Final ``(q, p)`` of a batch of phase points evolved side by side.

    ``q`` and ``p`` have shape ``(..., dim)``; model callables broadcast.
    """
    stepper = _stepper_for(model, cfg)
    q = np.array(q, dtype=float)
    p = np.array(p, dtype=float)
    return stepper(model, t0, q, p, cfg.dt, cfg.n_steps, None)
