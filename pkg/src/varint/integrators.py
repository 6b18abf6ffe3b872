"""One-step maps ``(q0, p0) -> (q1, p1)`` for the two variational families.

``SPRK`` parameterizes a step by the stage velocities ``Qdot_i`` and closes
it with the conjugate tableau ``(abar, bbar)``.  ``SG`` parameterizes it by
the stage positions ``Q_i`` of an interpolating polynomial, obtains
velocities from the differentiation matrix, and closes the step with the
source/target coefficients ``alpha``/``beta``.  Both add an external force,
when the system has one, to the momentum rate ``Pdot_i``.

Unknowns are flattened stage-major (all components of stage 1, then stage
2, ...); for SG the new momentum ``p1`` is the last block.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import newton
from .collocation import Tableau, tableau as make_tableau
from .exceptions import IntegrationFailed, NonConvergence, StageCountTooSmall
from .mechanics import PhaseState, energy, velocity_from_momentum


class Family(enum.Enum):
    SPRK = "sprk"
    SG = "sg"

    @classmethod
    def parse(cls, name):
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).strip().lower())
        except ValueError:
            raise ValueError(f"unknown method {name!r}; choose 'sprk' or 'sg'") from None


@dataclass(frozen=True)
class Method:
    family: Family
    tableau: Tableau
    h: float

    def __post_init__(self):
        object.__setattr__(self, "family", Family.parse(self.family))
        if not self.h > 0:
            raise ValueError(f"time step must be positive, got {self.h}")
        if self.family is Family.SG and self.tableau.s < 2:
            raise StageCountTooSmall("the sG family needs at least 2 stages")

    @classmethod
    def create(cls, family, kind, s, h):
        return cls(Family.parse(family), make_tableau(kind, s), float(h))


@dataclass(frozen=True)
class StageSet:
    Q: np.ndarray
    Qdot: np.ndarray
    P: np.ndarray
    Pdot: np.ndarray


@dataclass
class Trajectory:
    times: np.ndarray
    q: np.ndarray
    p: np.ndarray
    energies: np.ndarray
    reports: list = field(default_factory=list)

    @property
    def states(self):
        return [PhaseState(q, p) for q, p in zip(self.q, self.p)]

    def __len__(self):
        return len(self.times)


def _stages(Q, Qdot, system):
    s = Q.shape[0]
    P = np.empty_like(Q)
    Pdot = np.empty_like(Q)
    for i in range(s):
        P[i] = system.dLdv(Q[i], Qdot[i])
        Pdot[i] = system.momentum_rate(Q[i], Qdot[i])
    return P, Pdot


# --------------------------------------------------------------------------
# spRK
# --------------------------------------------------------------------------

def sprk_stages(Qdot_flat, q0, method, system):
    T, h = method.tableau, method.h
    Qdot = np.reshape(Qdot_flat, (T.s, -1))
    Q = q0 + h * (T.a @ Qdot)
    P, Pdot = _stages(Q, Qdot, system)
    return StageSet(Q, Qdot, P, Pdot)


def sprk_residual(Qdot_flat, q0, p0, method, system):
    """Stage equations ``P_i - p0 - h sum_j abar_ij Pdot_j`` as a flat vector."""
    st = sprk_stages(Qdot_flat, q0, method, system)
    return (st.P - p0 - method.h * (method.tableau.abar @ st.Pdot)).ravel()


def sprk_step(q0, p0, method, system, config=None):
    T, h = method.tableau, method.h
    q0 = np.atleast_1d(np.asarray(q0, dtype=float))
    p0 = np.atleast_1d(np.asarray(p0, dtype=float))
    v0 = velocity_from_momentum(system, q0, p0, config)
    guess = np.tile(v0, T.s)
    x, report = newton.solve(
        lambda z: sprk_residual(z, q0, p0, method, system), guess, config)
    st = sprk_stages(x, q0, method, system)
    q1 = q0 + h * (T.b @ st.Qdot)
    p1 = p0 + h * (T.bbar @ st.Pdot)
    return PhaseState(q1, p1), st, report


# --------------------------------------------------------------------------
# sG
# --------------------------------------------------------------------------

def sg_stages(Z_flat, q0, method, system):
    """Stage data from offsets ``Z_j = Q_j - q0``.

    Velocities are formed from the offsets so the ``1/h`` scaling does not
    amplify the rounding error of the absolute positions.
    """
    T, h = method.tableau, method.h
    Z = np.reshape(Z_flat, (T.s, -1))
    Qdot = (T.dmat @ Z) / h
    Q = q0 + Z
    P, Pdot = _stages(Q, Qdot, system)
    return StageSet(Q, Qdot, P, Pdot)


def _sg_offset_residual(unknowns, q0, p0, method, system):
    T, h = method.tableau, method.h
    n = q0.size
    Z = unknowns[:-n]
    st = sg_stages(Z, q0, method, system)
    p1 = unknowns[-n:]
    dl = (h * T.b[:, None] * st.Pdot + T.dmat.T @ (T.b[:, None] * st.P)
          + np.outer(T.alpha, p0) - np.outer(T.beta, p1))
    # sum(alpha) == 1, so sum_j alpha_j Q_j - q0 == sum_j alpha_j Z_j
    src = T.alpha @ np.reshape(Z, (T.s, -1))
    return np.concatenate([dl.ravel(), src])


def sg_residual(unknowns, q0, p0, method, system):
    """Discrete Euler-Lagrange blocks for every node plus the source constraint.

    ``unknowns`` holds the stage positions ``Q`` followed by ``p1``.  Block
    ``j`` is ``h b_j Pdot_j + sum_i b_i dmat_ij P_i + alpha_j p0 - beta_j p1``;
    the final block is ``sum_j alpha_j Q_j - q0``.
    """
    q0 = np.atleast_1d(np.asarray(q0, dtype=float))
    n = q0.size
    unknowns = np.asarray(unknowns, dtype=float)
    Z = (np.reshape(unknowns[:-n], (-1, n)) - q0).ravel()
    return _sg_offset_residual(np.concatenate([Z, unknowns[-n:]]), q0,
                               np.atleast_1d(np.asarray(p0, dtype=float)), method, system)


def sg_step(q0, p0, method, system, config=None):
    T, h = method.tableau, method.h
    if T.s < 2:
        raise StageCountTooSmall("the sG family needs at least 2 stages")
    q0 = np.atleast_1d(np.asarray(q0, dtype=float))
    p0 = np.atleast_1d(np.asarray(p0, dtype=float))
    n = q0.size
    v0 = velocity_from_momentum(system, q0, p0, config)
    guess = np.concatenate([(h * T.c[:, None] * v0).ravel(), p0])
    x, report = newton.solve(
        lambda z: _sg_offset_residual(z, q0, p0, method, system), guess, config)
    st = sg_stages(x[:-n], q0, method, system)
    Z = np.reshape(x[:-n], (T.s, n))
    q1 = q0 + T.beta @ Z
    return PhaseState(q1, x[-n:].copy()), st, report


def step(q0, p0, method, system, config=None):
    if method.family is Family.SPRK:
        return sprk_step(q0, p0, method, system, config)
    return sg_step(q0, p0, method, system, config)


def integrate(system, method, initial, steps, config=None):
    """Apply the step map ``steps`` times from ``initial``.

    On a solver failure raises :class:`IntegrationFailed` carrying the
    trajectory computed so far and the index of the failing step.
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    n = initial.q.size
    qs = np.empty((steps + 1, n))
    ps = np.empty((steps + 1, n))
    H = np.empty(steps + 1)
    reports = []
    q, p = initial.q, initial.p
    qs[0], ps[0] = q, p
    H[0] = energy(system, q, velocity_from_momentum(system, q, p, config))
    for k in range(steps):
        try:
            state, _, report = step(q, p, method, system, config)
        except NonConvergence as exc:
            partial = Trajectory(method.h * np.arange(k + 1), qs[:k + 1].copy(),
                                 ps[:k + 1].copy(), H[:k + 1].copy(), reports)
            raise IntegrationFailed(k, partial, exc.report) from exc
        q, p = state.q, state.p
        qs[k + 1], ps[k + 1] = q, p
        H[k + 1] = energy(system, q, velocity_from_momentum(system, q, p, config))
        reports.append(report)
    return Trajectory(method.h * np.arange(steps + 1), qs, ps, H, reports)
