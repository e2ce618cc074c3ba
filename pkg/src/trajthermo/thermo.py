"""Ideal-gas flows as canonical systems, plus the formal analogy table.

Two worked flows are provided.  In the adiabatic one the order parameter is
entropy, the coordinate is volume, the momentum is pressure and the
generator is the temperature ``T(p, V) = p V / nR`` (conserved along the
flow).  In the second the order parameter is temperature, the coordinate is
pressure, the momentum is volume and the generator is the entropy
``S(p, V) = cv log p + (cv + nR) log V`` (conserved; the flow follows an
isentrope).  The canonical flow equations of these models are the Maxwell
relations, which :func:`maxwell_residual` verifies numerically with no use
of the analytic partial derivatives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .errors import DomainError, UnsupportedSchemeError
from .integrators import IntegratorConfig, integrate_characteristic
from .models import DynamicalModel, PhasePoint

__all__ = [
    "GasState",
    "GasModelKind",
    "td_characteristic",
    "gas_model",
    "maxwell_residual",
    "analogy_table",
    "format_analogy_table",
    "gibbs_form_integral",
    "ideal_gas_volume",
    "ideal_gas_entropy",
]


class GasModelKind(str, Enum):
    # "isothermal" follows the conventional label of the constant-pressure
    # heat-bath example even though the flow itself conserves entropy.
    ADIABATIC = "adiabatic"
    ISOTHERMAL_NAMED = "isothermal_named"


@dataclass(frozen=True)
class GasState:
    """Snapshot of an ideal-gas system; unset fields stay ``None``.

    When ``p``, ``V`` and ``nR`` are set and ``T`` is not, the temperature is
    filled in from ``T = p V / nR``; when all four are set they must satisfy
    that relation to 1e-12 relative.
    """

    p: Optional[float] = None
    V: Optional[float] = None
    S: Optional[float] = None
    T: Optional[float] = None
    nR: Optional[float] = None
    cv: Optional[float] = None

    def __post_init__(self):
        if self.V is not None and self.V <= 0:
            raise DomainError(f"V must be positive, got {self.V}")
        if self.nR is not None and self.nR <= 0:
            raise DomainError(f"nR must be positive, got {self.nR}")
        if self.cv is not None and self.cv <= 0:
            raise DomainError(f"cv must be positive, got {self.cv}")
        if self.p is not None and self.V is not None and self.nR is not None:
            ideal = self.p * self.V / self.nR
            if self.T is None:
                object.__setattr__(self, "T", ideal)
            elif abs(self.T - ideal) > 1e-12 * max(abs(self.T), abs(ideal)):
                raise DomainError(
                    f"inconsistent ideal-gas state: T = {self.T!r} but pV/nR = {ideal!r}"
                )
        if self.T is not None and self.T <= 0:
            raise DomainError(f"T must be positive, got {self.T}")


def td_characteristic(state: GasState) -> float:
    """The scalar ``p V - S T`` of a fully specified gas state."""
    for name in ("p", "V", "S", "T"):
        if getattr(state, name) is None:
            raise DomainError(f"gas state field {name!r} is not set")
    return state.p * state.V - state.S * state.T


def gas_model(kind, nR: float, cv: float) -> DynamicalModel:
    """Canonical-system form of one of the two gas flows.

    The returned model has no kinetic/potential split, so only the rk4
    scheme applies to it.
    """
    kind = GasModelKind(kind)
    if nR <= 0:
        raise DomainError(f"nR must be positive, got {nR}")
    if cv <= 0:
        raise DomainError(f"cv must be positive, got {cv}")

    if kind is GasModelKind.ADIABATIC:
        # order parameter S, coordinate V, momentum p, generator T = pV/nR
        def hamiltonian(t, q, p):
            return np.sum(p * q, axis=-1) / nR

        def dH_dq(t, q, p):
            return p / nR

        def dH_dp(t, q, p):
            return q / nR

    else:
        # order parameter T, coordinate p, momentum V,
        # generator S = cv log p + (cv + nR) log V (additive constant 0)
        cp = cv + nR

        def hamiltonian(t, q, p):
            return cv * np.log(q[..., 0]) + cp * np.log(p[..., 0])

        def dH_dq(t, q, p):
            return cv / q

        def dH_dp(t, q, p):
            return cp / p

    def dH_dt(t, q, p):
        return np.zeros(np.shape(np.sum(q, axis=-1)))

    return DynamicalModel(
        name=f"gas_{kind.value}(nR={nR:g},cv={cv:g})",
        dim=1,
        hamiltonian=hamiltonian,
        dH_dq=dH_dq,
        dH_dp=dH_dp,
        dH_dt=dH_dt,
    )


def _flow_start(kind: GasModelKind, state: GasState) -> PhasePoint:
    if state.p is None or state.V is None:
        raise DomainError("gas state must set both p and V")
    if kind is GasModelKind.ADIABATIC:
        t0 = state.S if state.S is not None else 0.0
        return PhasePoint(t=t0, q=np.array([state.V]), p=np.array([state.p]))
    t0 = state.T if state.T is not None else 0.0
    return PhasePoint(t=t0, q=np.array([state.p]), p=np.array([state.V]))


def maxwell_residual(kind, nR: float, cv: float, state0: GasState, span: float,
                     cfg: IntegratorConfig, h: float):
    """Numerical check of the flow equations along an integrated gas flow.

    Returns ``(r1, r2, r3)``: the max over trajectory nodes of
    ``|dq/ds - dH/dp|`` and ``|dp/ds + dH/dq|`` (flow derivatives by
    fourth-order centered differences along the trajectory, partials by
    centered differences of the generator with step ``h``), and the
    conservation residual ``max |H - H0|``.  Nodes without a full stencil
    are skipped; a zero span has no flow derivatives and returns
    ``(0, 0, 0)``.
    """
    if h <= 0:
        raise DomainError(f"h must be positive, got {h}")
    kind = GasModelKind(kind)
    if cfg.scheme != "rk4":
        raise UnsupportedSchemeError("gas generators are not separable; use the rk4 scheme")
    if span == 0.0:
        return 0.0, 0.0, 0.0
    cfg.check_span(span)

    model = gas_model(kind, nR, cv)
    x0 = _flow_start(kind, state0)
    traj = integrate_characteristic(model, x0, cfg)

    q = traj.nodes
    p = traj.momenta
    t = traj.times
    h_values = np.asarray(model.hamiltonian(t, q, p), dtype=float)
    r3 = float(np.max(np.abs(h_values - h_values[0])))
    if traj.n_segments < 4:
        return 0.0, 0.0, r3

    def stencil(y):
        return (y[:-4] - 8.0 * y[1:-3] + 8.0 * y[3:-1] - y[4:]) / (12.0 * cfg.dt)

    def fd_dH_dp(tk, qk, pk):
        return (model.hamiltonian(tk, qk, pk + h) - model.hamiltonian(tk, qk, pk - h)) / (2.0 * h)

    def fd_dH_dq(tk, qk, pk):
        return (model.hamiltonian(tk, qk + h, pk) - model.hamiltonian(tk, qk - h, pk)) / (2.0 * h)

    ti, qi, pi = t[2:-2], q[2:-2], p[2:-2]
    r1 = float(np.max(np.abs(stencil(q)[:, 0] - fd_dH_dp(ti, qi, pi))))
    r2 = float(np.max(np.abs(stencil(p)[:, 0] + fd_dH_dq(ti, qi, pi))))
    return r1, r2, r3


def ideal_gas_volume(p, T, nR: float):
    """Equation of state ``V = nR T / p``."""
    return nR * T / p


def ideal_gas_entropy(p, T, nR: float, cv: float):
    """Entropy of the ideal gas as a function of ``(p, T)``, constant 0."""
    return cv * np.log(p) + (cv + nR) * np.log(ideal_gas_volume(p, T, nR))


def gibbs_form_integral(nR: float, cv: float, p_points, T_points) -> float:
    """Line integral of ``V dp - S dT`` along a sampled path in ``(p, T)``.

    The 1-form is exact for the ideal gas, so the value depends only on the
    endpoints; comparing several discretized routes between the same states
    checks that numerically.  Trapezoidal rule per sampled segment.
    """
    p = np.asarray(p_points, dtype=float)
    T = np.asarray(T_points, dtype=float)
    if p.shape != T.shape or p.ndim != 1 or p.size < 2:
        raise ValueError("p_points and T_points must be equal-length 1-d arrays (>= 2 samples)")
    V = ideal_gas_volume(p, T, nR)
    S = ideal_gas_entropy(p, T, nR, cv)
    v_mid = 0.5 * (V[:-1] + V[1:])
    s_mid = 0.5 * (S[:-1] + S[1:])
    return float(np.sum(v_mid * np.diff(p) - s_mid * np.diff(T)))


_TABLE_ROWS = (
    ("order_parameter", "Order parameter",
     ("entropy", "S"), ("temperature", "T"), ("time", "t")),
    ("momentum_vector", "Momentum vector",
     ("pressure", "p"), ("volume", "V"), ("momentum", "π")),
    ("space_coordinate", "Space coordinate",
     ("volume", "V"), ("pressure", "p"), ("position", "γ(t)")),
    ("hamiltonian", "Hamiltonian",
     ("temperature", "T"), ("entropy", "S"), ("Hamiltonian", "H")),
    ("lagrangian", "Lagrangian",
     ("internal energy", "-dU = p dV - T dS"),
     ("Gibbs free energy", "dG = V dp - S dT"),
     ("Lagrangian", "L dt = π dγ - H dt")),
)

_TABLE_COLUMNS = (
    "adiabatic_free_expansion",
    "isothermal_reversible_transition",
    "path_dynamics",
)


def analogy_table() -> list[dict]:
    """Correspondence between the two gas flows and particle-path dynamics.

    Five rows (order parameter, momentum vector, space coordinate,
    Hamiltonian, Lagrangian), three columns, each cell a name/symbol pair.
    """
    rows = []
    for key, label, *cells in _TABLE_ROWS:
        row = {"quantity": key, "label": label}
        for column, (name, symbol) in zip(_TABLE_COLUMNS, cells):
            row[column] = {"name": name, "symbol": symbol}
        rows.append(row)
    return rows


def format_analogy_table() -> str:
    """Plain-text rendering of :func:`analogy_table` for docs and the CLI."""
    headers = ("", "adiabatic free expansion", "isothermal reversible transition",
               "dynamics of paths")
    body = []
    for key, label, *cells in _TABLE_ROWS:
        body.append([label] + [f"{name}: {symbol}" for name, symbol in cells])
    widths = [max(len(row[i]) for row in [list(headers)] + body) for i in range(4)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    for row in body:
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
    return "\n".join(lines)
