"""Hamiltonian-style dynamical models and phase-space points.

A :class:`DynamicalModel` packages a scalar generator ``H(t, q, p)`` with its
partial derivatives.  ``t`` is the order parameter (time for mass points,
entropy or temperature for the gas flows), ``q`` the coordinate vector and
``p`` the momentum vector.  All callables follow a broadcasting convention:
``q`` and ``p`` have shape ``(..., dim)``, ``t`` is a scalar or ``(...)``
array, ``H`` and ``dH_dt`` return shape ``(...)`` while ``dH_dq``/``dH_dp``
return ``(..., dim)``.  This lets integrators evolve batches of phase points
(e.g. every vertex of a loop) in one vectorized sweep.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DimensionMismatchError

__all__ = [
    "LagrangianForm",
    "DynamicalModel",
    "PhasePoint",
    "eval_hamiltonian",
    "characteristic_rhs",
    "free_particle",
    "harmonic_oscillator",
    "polynomial_potential_model",
]

# Step rule for derivative fallbacks: h scales with the coordinate magnitude.
_FD_SCALE = 1e-6


@dataclass(frozen=True)
class LagrangianForm:
    """Explicit kinetic/potential split ``L = m*|qdot|^2/2 - V(q)``.

    ``potential`` maps ``(..., dim)`` coordinate arrays to ``(...)`` values;
    ``potential_grad`` is optional (centered differences otherwise).
    ``scalar_potential``, when provided for one-dimensional models, is a
    plain ``float -> float`` version of ``potential`` used by compiled
    sampling kernels; it must agree with ``potential`` exactly.
    """

    mass: float
    potential: Callable[[np.ndarray], np.ndarray]
    potential_grad: Optional[Callable[[np.ndarray], np.ndarray]] = None
    scalar_potential: Optional[Callable[[float], float]] = None

    def __post_init__(self):
        if self.mass <= 0:
            raise ValueError(f"mass must be positive, got {self.mass}")

    def grad_potential(self, q: np.ndarray) -> np.ndarray:
        if self.potential_grad is not None:
            return np.asarray(self.potential_grad(q), dtype=float)
        return _centered_gradient(self.potential, np.asarray(q, dtype=float))


def _centered_gradient(fun, x: np.ndarray) -> np.ndarray:
    grad = np.empty_like(x, dtype=float)
    for j in range(x.shape[-1]):
        h = _FD_SCALE * (1.0 + np.abs(x[..., j]))
        xp = x.copy()
        xm = x.copy()
        xp[..., j] += h
        xm[..., j] -= h
        grad[..., j] = (fun(xp) - fun(xm)) / (2.0 * h)
    return grad


@dataclass(frozen=True)
class DynamicalModel:
    """Scalar generator ``H`` plus partials, with finite-difference fallbacks."""

    name: str
    dim: int
    hamiltonian: Callable
    dH_dq: Optional[Callable] = None
    dH_dp: Optional[Callable] = None
    dH_dt: Optional[Callable] = None
    lagrangian_form: Optional[LagrangianForm] = None

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dim must be a positive integer, got {self.dim}")

    def hamiltonian_at(self, t, q, p):
        return self.hamiltonian(t, np.asarray(q, dtype=float), np.asarray(p, dtype=float))

    def grad_q(self, t, q, p) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        p = np.asarray(p, dtype=float)
        if self.dH_dq is not None:
            return np.asarray(self.dH_dq(t, q, p), dtype=float)
        return _centered_gradient(lambda qq: self.hamiltonian(t, qq, p), q)

    def grad_p(self, t, q, p) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        p = np.asarray(p, dtype=float)
        if self.dH_dp is not None:
            return np.asarray(self.dH_dp(t, q, p), dtype=float)
        return _centered_gradient(lambda pp: self.hamiltonian(t, q, pp), p)

    def grad_t(self, t, q, p):
        q = np.asarray(q, dtype=float)
        p = np.asarray(p, dtype=float)
        if self.dH_dt is not None:
            return self.dH_dt(t, q, p)
        h = _FD_SCALE * (1.0 + abs(float(np.max(np.abs(t)))))
        return (self.hamiltonian(t + h, q, p) - self.hamiltonian(t - h, q, p)) / (2.0 * h)


@dataclass(frozen=True)
class PhasePoint:
    """A point ``(t, q, p)`` of the extended phase space."""

    t: float
    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        q = np.atleast_1d(np.array(self.q, dtype=float))
        p = np.atleast_1d(np.array(self.p, dtype=float))
        if q.ndim != 1 or p.ndim != 1 or q.shape != p.shape:
            raise DimensionMismatchError(
                f"q and p must be 1-d vectors of equal length, got {q.shape} and {p.shape}"
            )
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    @property
    def dim(self) -> int:
        return self.q.shape[0]


def _check_point(model: DynamicalModel, x: PhasePoint) -> None:
    if x.dim != model.dim:
        raise DimensionMismatchError(
            f"phase point has dim {x.dim}, model '{model.name}' expects {model.dim}"
        )


def eval_hamiltonian(model: DynamicalModel, x: PhasePoint) -> float:
    """Value of the generator ``H(t, q, p)`` at a phase point."""
    _check_point(model, x)
    return float(model.hamiltonian_at(x.t, x.q, x.p))


def characteristic_rhs(model: DynamicalModel, x: PhasePoint):
    """Right-hand side of the canonical flow equations at ``x``.

    Returns ``(dq, dp, dH)`` with ``dq = dH/dp``, ``dp = -dH/dq`` and
    ``dH = dH/dt``.
    """
    _check_point(model, x)
    dq = model.grad_p(x.t, x.q, x.p)
    dp = -model.grad_q(x.t, x.q, x.p)
    dH = float(model.grad_t(x.t, x.q, x.p))
    return dq, dp, dH


def _from_lagrangian(name: str, dim: int, form: LagrangianForm) -> DynamicalModel:
    m = form.mass

    def hamiltonian(t, q, p):
        return np.sum(p * p, axis=-1) / (2.0 * m) + form.potential(q)

    def dH_dq(t, q, p):
        return form.grad_potential(q)

    def dH_dp(t, q, p):
        return p / m

    def dH_dt(t, q, p):
        return np.zeros(np.shape(np.sum(q, axis=-1)))

    return DynamicalModel(
        name=name,
        dim=dim,
        hamiltonian=hamiltonian,
        dH_dq=dH_dq,
        dH_dp=dH_dp,
        dH_dt=dH_dt,
        lagrangian_form=form,
    )


def free_particle(mass: float = 1.0, dim: int = 1) -> DynamicalModel:
    """``H = |p|^2 / (2m)``; the flow is a linear shear in phase space."""

    def potential(q):
        return np.zeros(np.shape(np.sum(q, axis=-1)))

    def potential_grad(q):
        return np.zeros_like(np.asarray(q, dtype=float))

    form = LagrangianForm(
        mass=mass,
        potential=potential,
        potential_grad=potential_grad,
        scalar_potential=_zero_scalar if dim == 1 else None,
    )
    return _from_lagrangian(f"free_particle(m={mass:g})", dim, form)


def _zero_scalar(x: float) -> float:
    return 0.0


def harmonic_oscillator(mass: float = 1.0, omega: float = 1.0, dim: int = 1) -> DynamicalModel:
    """``H = |p|^2/(2m) + m w^2 |q|^2 / 2``."""
    k = mass * omega * omega

    def potential(q):
        return 0.5 * k * np.sum(q * q, axis=-1)

    def potential_grad(q):
        return k * np.asarray(q, dtype=float)

    def scalar_potential(x: float) -> float:
        return 0.5 * k * (x * x)

    form = LagrangianForm(
        mass=mass,
        potential=potential,
        potential_grad=potential_grad,
        scalar_potential=scalar_potential if dim == 1 else None,
    )
    return _from_lagrangian(f"harmonic_oscillator(m={mass:g},omega={omega:g})", dim, form)


def polynomial_potential_model(coeffs, mass: float = 1.0) -> DynamicalModel:
    """One-dimensional model with ``V(q) = sum_k coeffs[k] * q**k``."""
    c = tuple(float(v) for v in coeffs)
    if not c:
        raise ValueError("coeffs must contain at least one term")
    dc = tuple(k * c[k] for k in range(1, len(c)))

    def potential(q):
        return _horner(c, np.asarray(q, dtype=float)[..., 0])

    def potential_grad(q):
        q = np.asarray(q, dtype=float)
        if not dc:
            return np.zeros_like(q)
        return _horner(dc, q[..., 0])[..., None]

    def scalar_potential(x: float) -> float:
        acc = 0.0
        for coef in reversed(c):
            acc = acc * x + coef
        return acc

    form = LagrangianForm(
        mass=mass,
        potential=potential,
        potential_grad=potential_grad,
        scalar_potential=scalar_potential,
    )
    return _from_lagrangian(f"polynomial(deg={len(c) - 1})", 1, form)


def _horner(coeffs, x):
    acc = np.zeros_like(x)
    for coef in reversed(coeffs):
        acc = acc * x + coef
    return acc
