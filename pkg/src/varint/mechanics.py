"""Lagrangian systems on R^n and the benchmark problems shipped with the package."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import newton

Vec = np.ndarray


@dataclass(frozen=True)
class LagrangianSystem:
    """A mechanical system given by its Lagrangian and first partials.

    ``force`` is an external generalized force entering the momentum rate;
    ``inverse_legendre`` is an optional closed form for the velocity that
    produces a given momentum, and ``exact_energy`` an optional closed form
    of the Hamiltonian used to cross-check :func:`energy`.
    """

    n: int
    lagrangian: Callable[[Vec, Vec], float]
    dLdq: Callable[[Vec, Vec], Vec]
    dLdv: Callable[[Vec, Vec], Vec]
    force: Optional[Callable[[Vec, Vec], Vec]] = None
    inverse_legendre: Optional[Callable[[Vec, Vec], Vec]] = None
    exact_energy: Optional[Callable[[Vec, Vec], float]] = None
    name: str = "custom"
    params: dict = field(default_factory=dict)

    def momentum_rate(self, q, v):
        """dL/dq plus the external force, if any."""
        r = self.dLdq(q, v)
        if self.force is not None:
            r = r + self.force(q, v)
        return r


@dataclass(frozen=True)
class PhaseState:
    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        q = np.atleast_1d(np.asarray(self.q, dtype=float))
        p = np.atleast_1d(np.asarray(self.p, dtype=float))
        if q.shape != p.shape or q.ndim != 1:
            raise ValueError(f"q and p must be matching vectors, got {q.shape} and {p.shape}")
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(p))):
            raise ValueError("phase state has non-finite entries")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    def as_vector(self):
        return np.concatenate([self.q, self.p])


def legendre(system, q, v):
    return np.asarray(system.dLdv(q, v), dtype=float)


def velocity_from_momentum(system, q, p, config=None):
    """Invert the Legendre transform at fixed ``q``.

    Uses the system's closed form when present; otherwise Newton on
    ``v -> dL/dv(q, v) - p`` from ``v = p``.
    """
    q = np.atleast_1d(np.asarray(q, dtype=float))
    p = np.atleast_1d(np.asarray(p, dtype=float))
    if system.inverse_legendre is not None:
        return np.asarray(system.inverse_legendre(q, p), dtype=float)
    v, _ = newton.solve(lambda v: system.dLdv(q, v) - p, p.copy(), config)
    return v


def energy(system, q, v):
    """Hamiltonian ``dL/dv . v - L`` evaluated at a velocity state."""
    return float(np.dot(system.dLdv(q, v), v) - system.lagrangian(q, v))


# --------------------------------------------------------------------------
# Benchmark systems
# --------------------------------------------------------------------------

def free_particle(m=1.0, n=1):
    m = float(m)
    return LagrangianSystem(
        n=int(n),
        lagrangian=lambda q, v: 0.5 * m * float(v @ v),
        dLdq=lambda q, v: np.zeros_like(q),
        dLdv=lambda q, v: m * v,
        inverse_legendre=lambda q, p: p / m,
        exact_energy=lambda q, v: 0.5 * m * float(v @ v),
        name="free-particle",
        params={"m": m, "n": int(n)},
    )


def harmonic_oscillator(m=1.0, k=1.0):
    m, k = float(m), float(k)
    return LagrangianSystem(
        n=1,
        lagrangian=lambda q, v: 0.5 * m * float(v @ v) - 0.5 * k * float(q @ q),
        dLdq=lambda q, v: -k * q,
        dLdv=lambda q, v: m * v,
        inverse_legendre=lambda q, p: p / m,
        exact_energy=lambda q, v: 0.5 * m * float(v @ v) + 0.5 * k * float(q @ q),
        name="harmonic-oscillator",
        params={"m": m, "k": k},
    )


def pendulum():
    return LagrangianSystem(
        n=1,
        lagrangian=lambda q, v: 0.5 * float(v @ v) + float(np.cos(q[0])),
        dLdq=lambda q, v: -np.sin(q),
        dLdv=lambda q, v: v.copy(),
        inverse_legendre=lambda q, p: p.copy(),
        exact_energy=lambda q, v: 0.5 * float(v @ v) - float(np.cos(q[0])),
        name="pendulum",
    )


def kepler():
    def dLdq(q, v):
        r = np.sqrt(q @ q)
        return -q / r**3

    return LagrangianSystem(
        n=2,
        lagrangian=lambda q, v: 0.5 * float(v @ v) + 1.0 / float(np.sqrt(q @ q)),
        dLdq=dLdq,
        dLdv=lambda q, v: v.copy(),
        inverse_legendre=lambda q, p: p.copy(),
        exact_energy=lambda q, v: 0.5 * float(v @ v) - 1.0 / float(np.sqrt(q @ q)),
        name="kepler",
    )


def forced_oscillator(m=1.0, k=1.0, damping=0.1):
    """Harmonic oscillator with linear damping force ``-damping * v``."""
    base = harmonic_oscillator(m, k)
    rho = float(damping)
    return LagrangianSystem(
        n=1,
        lagrangian=base.lagrangian,
        dLdq=base.dLdq,
        dLdv=base.dLdv,
        force=lambda q, v: -rho * v,
        inverse_legendre=base.inverse_legendre,
        exact_energy=base.exact_energy,
        name="forced-oscillator",
        params={"m": m, "k": k, "damping": rho},
    )


def angular_momentum(q, p):
    """Planar angular momentum ``q_1 p_2 - q_2 p_1``."""
    return float(q[0] * p[1] - q[1] * p[0])


SYSTEMS = {
    "free-particle": (free_particle, ("m", "n")),
    "harmonic-oscillator": (harmonic_oscillator, ("m", "k")),
    "pendulum": (pendulum, ()),
    "kepler": (kepler, ()),
    "forced-oscillator": (forced_oscillator, ("m", "k", "damping")),
}


def make_system(name, params=()):
    """Build a built-in system by name with optional positional parameters."""
    try:
        ctor, names = SYSTEMS[name]
    except KeyError:
        raise ValueError(f"unknown system {name!r}; choose from {sorted(SYSTEMS)}") from None
    params = list(params)
    if len(params) > len(names):
        raise ValueError(f"system {name!r} takes at most {len(names)} parameters "
                         f"({', '.join(names) or 'none'}), got {len(params)}")
    return ctor(*params)
