"""Diagnostics: convergence orders, symplecticity defect, energy and invariants."""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import OrderUnresolvable
from .integrators import Method, integrate, step
from .mechanics import PhaseState
from .newton import DEFAULT_CONFIG

REFERENCE_KIND = "gauss-legendre"
REFERENCE_STAGES = 3
REFERENCE_LEVEL = 14
FLOOR_FACTOR = 1e3
REFERENCE_TOL = 1e-14


@dataclass
class ConvergenceStudy:
    h_values: np.ndarray
    errors: np.ndarray
    slope: float
    pairwise_orders: np.ndarray
    retained: np.ndarray
    floor: float

    def to_dict(self):
        return {
            "h_values": self.h_values.tolist(),
            "errors": self.errors.tolist(),
            "slope": self.slope,
            "pairwise_orders": self.pairwise_orders.tolist(),
            "retained": self.retained.tolist(),
            "floor": self.floor,
        }


@dataclass(frozen=True)
class SymplecticityReport:
    defect: float
    fd_step: float
    h: float


def _steps_for(T, h):
    n = int(round(T / h))
    if n < 1 or abs(n * h - T) > 1e-9 * max(1.0, abs(T)):
        raise ValueError(f"T={T} is not an integer multiple of h={h}")
    return n


def reference_state(system, initial, T, config=None, level=REFERENCE_LEVEL,
                    family="sprk", stages=REFERENCE_STAGES):
    """High-accuracy state at time ``T``.

    Closed form for the harmonic oscillator; otherwise ``stages``-stage
    Gauss-Legendre steps with ``h = T / 2**level``.  The solver tolerance
    is tightened to 1e-14 because per-step residuals add up over the
    ``2**level`` steps.
    """
    if not T > 0:
        raise ValueError(f"T must be positive, got {T}")
    if system.name == "harmonic-oscillator":
        m, k = system.params["m"], system.params["k"]
        w = math.sqrt(k / m)
        q0, p0 = initial.q, initial.p
        q = q0 * math.cos(w * T) + p0 / (m * w) * math.sin(w * T)
        p = -m * w * q0 * math.sin(w * T) + p0 * math.cos(w * T)
        return PhaseState(q, p)
    cfg = config or DEFAULT_CONFIG
    cfg = dataclasses.replace(cfg, tol=min(cfg.tol, REFERENCE_TOL))
    steps = 2 ** level
    method = Method.create(family, REFERENCE_KIND, stages, T / steps)
    traj = integrate(system, method, initial, steps, cfg)
    return PhaseState(traj.q[-1], traj.p[-1])


def final_error(system, method, initial, T, reference, config=None):
    traj = integrate(system, method, initial, _steps_for(T, method.h), config)
    diff = np.concatenate([traj.q[-1] - reference.q, traj.p[-1] - reference.p])
    return float(np.max(np.abs(diff)))


def convergence_order(system, family, kind, s, initial, T, h_values, config=None,
                      reference=None):
    """Final-time errors over a sequence of step sizes and the fitted order.

    Errors at or below ``1e3 * tol`` sit on the solver floor and are left
    out of the least-squares fit of ``log(error)`` against ``log(h)``.
    """
    h = np.asarray(h_values, dtype=float)
    if h.size < 3:
        raise ValueError("a convergence study needs at least 3 step sizes")
    if np.any(np.diff(h) >= 0):
        raise ValueError(f"step sizes must be strictly decreasing, got {h}")
    cfg = config or DEFAULT_CONFIG
    ref = reference if reference is not None else reference_state(system, initial, T, cfg)
    errors = np.array([
        final_error(system, Method.create(family, kind, s, hk), initial, T, ref, cfg)
        for hk in h])
    floor = FLOOR_FACTOR * cfg.tol
    keep = errors > floor
    if keep.sum() < 2:
        raise OrderUnresolvable(
            f"only {keep.sum()} errors above the solver floor {floor:g}: {errors}")
    slope = float(np.polyfit(np.log(h[keep]), np.log(errors[keep]), 1)[0])
    with np.errstate(divide="ignore", invalid="ignore"):
        pairwise = np.log(errors[:-1] / errors[1:]) / np.log(h[:-1] / h[1:])
    return ConvergenceStudy(h, errors, slope, pairwise, keep, floor)


def step_jacobian(system, method, state, fd_step=1e-5, config=None):
    """Central-difference Jacobian of the step map with respect to (q0, p0)."""
    n = state.q.size
    z0 = state.as_vector()
    M = np.empty((2 * n, 2 * n))
    for j in range(2 * n):
        dz = np.zeros(2 * n)
        dz[j] = fd_step
        out = []
        for sign in (1.0, -1.0):
            z = z0 + sign * dz
            nxt, _, _ = step(z[:n], z[n:], method, system, config)
            out.append(nxt.as_vector())
        M[:, j] = (out[0] - out[1]) / (2 * fd_step)
    return M


def symplectic_form(n):
    I = np.eye(n)
    Z = np.zeros((n, n))
    return np.block([[Z, I], [-I, Z]])


def symplecticity_defect(system, method, state, fd_step=1e-5, config=None):
    """``max |M^T J M - J|`` for the finite-difference step Jacobian ``M``."""
    cfg = config or DEFAULT_CONFIG
    cfg = dataclasses.replace(cfg, tol=min(cfg.tol, 1e-13))
    M = step_jacobian(system, method, state, fd_step, cfg)
    J = symplectic_form(state.q.size)
    defect = float(np.max(np.abs(M.T @ J @ M - J)))
    return SymplecticityReport(defect, fd_step, method.h)


def energy_drift(trajectory):
    """Maximum energy deviation from the start and the linear drift rate."""
    H = trajectory.energies
    t = trajectory.times
    dev = float(np.max(np.abs(H - H[0])))
    if len(t) < 2:
        return dev, 0.0
    slope = float(np.polyfit(t, H - H[0], 1)[0])
    return dev, slope


def invariant_history(trajectory, invariant):
    return np.array([invariant(q, p) for q, p in zip(trajectory.q, trajectory.p)])
