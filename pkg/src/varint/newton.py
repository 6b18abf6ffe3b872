"""Damped Newton iteration with a forward-difference Jacobian."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

from .exceptions import NonConvergence, SingularJacobian


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-12
    max_iter: int = 50
    fd_step: float = 1e-7
    damping: float = 0.5
    max_halvings: int = 20

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")
        if not 0 < self.fd_step < 1:
            raise ValueError(f"fd_step must lie in (0, 1), got {self.fd_step}")


@dataclass(frozen=True)
class SolveReport:
    iterations: int
    final_residual: float
    converged: bool


DEFAULT_CONFIG = SolverConfig()


def fd_jacobian(F, x, fx, step):
    """Forward-difference Jacobian of ``F`` at ``x``, one column per component."""
    m = x.size
    J = np.empty((fx.size, m))
    xp = x.copy()
    for j in range(m):
        # power-of-two steps keep x + h and the difference quotient free of
        # representation error
        hj = 2.0 ** round(math.log2(step * max(1.0, abs(x[j]))))
        xp[j] = x[j] + hj
        J[:, j] = (F(xp) - fx) / hj
        xp[j] = x[j]
    return J


def _inf(r):
    return float(np.max(np.abs(r))) if r.size else 0.0


def solve(F, x0, config=None, jac=None):
    """Solve ``F(x) = 0`` starting from ``x0``.

    Returns ``(x, SolveReport)``.  ``jac`` optionally replaces the
    finite-difference Jacobian.  Raises :class:`NonConvergence` when the
    iteration budget or the backtracking line search runs out, and
    :class:`SingularJacobian` when LU factorization meets a zero pivot.
    """
    cfg = config or DEFAULT_CONFIG
    x = np.array(x0, dtype=float).ravel()
    fx = np.asarray(F(x), dtype=float)
    r = _inf(fx)
    it = 0
    while not r <= cfg.tol:
        if it >= cfg.max_iter or not np.isfinite(r):
            report = SolveReport(it, r, False)
            raise NonConvergence(f"Newton did not converge: {report}", report)
        J = jac(x) if jac is not None else fd_jacobian(F, x, fx, cfg.fd_step)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", LinAlgWarning)
            lu, piv = lu_factor(J, check_finite=False)
        pivots = np.abs(np.diag(lu))
        if not np.all(pivots > np.finfo(float).tiny) or not np.all(np.isfinite(pivots)):
            report = SolveReport(it, r, False)
            raise SingularJacobian(f"singular Jacobian at iteration {it}: {report}", report)
        dx = lu_solve((lu, piv), -fx, check_finite=False)

        lam = 1.0
        for _ in range(cfg.max_halvings + 1):
            xn = x + lam * dx
            fn = np.asarray(F(xn), dtype=float)
            rn = _inf(fn)
            if rn < r or rn <= cfg.tol:
                break
            lam *= cfg.damping
        else:
            report = SolveReport(it, r, False)
            raise NonConvergence(f"line search failed at iteration {it}: {report}", report)
        x, fx, r = xn, fn, rn
        it += 1
    return x, SolveReport(it, r, True)
