"""Discrete action of a path and its exact gradient.

The canonical discretization sums forward-difference kinetic terms and the
potential at segment midpoints:

    I = sum_k  m * |q_{k+1} - q_k|^2 / (2 dt)  -  V((q_k + q_{k+1}) / 2) * dt

The same time-slicing rule is shared by the path ensemble, the sampler and
the short-time propagator kernel, so one action definition covers them all.
"""

from __future__ import annotations

import numpy as np

from .errors import UnsupportedModelError
from .models import DynamicalModel
from .trajectory import Trajectory

__all__ = ["action_of_path", "action_gradient", "one_form_action"]


def _lagrangian_action_nodes(form, nodes: np.ndarray, dt: float) -> float:
    dq = np.diff(nodes, axis=0)
    mid = 0.5 * (nodes[:-1] + nodes[1:])
    kinetic = form.mass * np.sum(dq * dq, axis=-1) / (2.0 * dt)
    return float(np.sum(kinetic - form.potential(mid) * dt))


def one_form_action(model: DynamicalModel, path: Trajectory) -> float:
    """Diagnostic ``sum p.dq - H dt`` along a trajectory that carries momenta.

    Both the momentum and the generator are averaged per segment (trapezoid),
    matching the node-synchronized output of the integrators.
    """
    if path.momenta is None:
        raise UnsupportedModelError("one-form action needs a trajectory with momenta")
    q, p, t = path.nodes, path.momenta, path.times
    p_mid = 0.5 * (p[:-1] + p[1:])
    pdq = np.sum(p_mid * np.diff(q, axis=0), axis=-1)
    h = np.asarray(model.hamiltonian(t, q, p), dtype=float)
    h_mid = 0.5 * (h[:-1] + h[1:])
    return float(np.sum(pdq - h_mid * path.dt))


def action_of_path(model: DynamicalModel, path: Trajectory) -> float:
    """Discrete action of ``path``; pure function of the nodes.

    Uses the kinetic/potential split when the model has one; otherwise falls
    back to the momentum 1-form sum (requires momenta on the path).
    """
    if model.lagrangian_form is not None:
        return _lagrangian_action_nodes(model.lagrangian_form, path.nodes, path.dt)
    if path.momenta is not None:
        return one_form_action(model, path)
    raise UnsupportedModelError(
        f"model '{model.name}' has no kinetic/potential split and the path "
        "carries no momenta; no action form applies"
    )


def action_gradient(model: DynamicalModel, path: Trajectory) -> np.ndarray:
    """Exact gradient of :func:`action_of_path` w.r.t. the interior nodes.

    Returns a flat vector of length ``(N - 1) * dim`` (endpoints are fixed).
    Component at interior node k:

        m (2 q_k - q_{k-1} - q_{k+1}) / dt
            - dt/2 * [V'((q_{k-1}+q_k)/2) + V'((q_k+q_{k+1})/2)]
    """
    form = model.lagrangian_form
    if form is None:
        raise UnsupportedModelError(
            f"action gradient needs a kinetic/potential split; model '{model.name}' has none"
        )
    if path.n_segments < 2:
        raise UnsupportedModelError("path has no interior nodes (N < 2)")
    return _gradient_interior(form, path.nodes, path.dt).ravel()


def _gradient_interior(form, nodes: np.ndarray, dt: float) -> np.ndarray:
    q = nodes
    mid = 0.5 * (q[:-1] + q[1:])
    vprime = form.grad_potential(mid)
    kinetic = form.mass * (2.0 * q[1:-1] - q[:-2] - q[2:]) / dt
    return kinetic - 0.5 * dt * (vprime[:-1] + vprime[1:])
