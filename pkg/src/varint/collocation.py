"""Collocation nodes on [0, 1] and the coefficient tables built from them.

All node families are computed in double precision with Newton's method on
the defining Legendre-type polynomial.  Coefficients that are integrals of
Lagrange basis polynomials are evaluated with a Gauss-Legendre reference
rule, which is exact for the polynomial degrees involved, instead of going
through a monomial (Vandermonde) expansion.

Indices are zero-based throughout: ``l_j`` below is the basis polynomial
attached to ``c[j]``.
"""
from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateEndpoints, UnsupportedStageCount, ZeroWeight

MAX_STAGES = 10
NEWTON_TOL = 1e-15
NEWTON_MAXITER = 100


class QuadratureKind(enum.Enum):
    GAUSS_LEGENDRE = "gauss-legendre"
    GAUSS_LOBATTO = "gauss-lobatto"
    RADAU_IIA = "radau-iia"
    CHEBYSHEV = "chebyshev"

    @classmethod
    def parse(cls, name):
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower().replace("_", "-")
        aliases = {"radau": "radau-iia", "lobatto": "gauss-lobatto",
                   "gauss": "gauss-legendre", "legendre": "gauss-legendre"}
        key = aliases.get(key, key)
        for kind in cls:
            if kind.value == key:
                return kind
        raise ValueError(f"unknown quadrature kind {name!r}; "
                         f"choose from {[k.value for k in cls]}")

    @property
    def min_stages(self):
        return 2 if self is QuadratureKind.GAUSS_LOBATTO else 1


# --------------------------------------------------------------------------
# Legendre polynomials and node computation
# --------------------------------------------------------------------------

def _legendre(n, x):
    """Return (P_n, P_n', P_n'') at scalar ``x`` by three-term recurrence."""
    if n == 0:
        return 1.0, 0.0, 0.0
    p0, p1 = 1.0, x
    d0, d1 = 0.0, 1.0
    dd0, dd1 = 0.0, 0.0
    for k in range(1, n):
        p2 = ((2 * k + 1) * x * p1 - k * p0) / (k + 1)
        # P'_{k+1} = P'_{k-1} + (2k+1) P_k, and the same again for P''
        d2 = d0 + (2 * k + 1) * p1
        dd2 = dd0 + (2 * k + 1) * d1
        p0, p1 = p1, p2
        d0, d1 = d1, d2
        dd0, dd1 = dd1, dd2
    return p1, d1, dd1


def _newton_roots(f, m, known=()):
    """Find ``m`` roots of ``f`` in (-1, 1) with deflated Newton iterations.

    ``f(x)`` returns (value, derivative).  Already known roots in ``known`` are
    deflated away so every start converges to a new root.
    """
    roots = list(known)
    found = []
    for i in range(1, m + 1):
        x = -math.cos((2 * i - 1) * math.pi / (2 * m))
        for _ in range(NEWTON_MAXITER):
            fx, dfx = f(x)
            defl = sum(1.0 / (x - r) for r in roots)
            dx = fx / (dfx - fx * defl)
            x -= dx
            if abs(dx) <= NEWTON_TOL:
                break
        roots.append(x)
        found.append(x)
    return sorted(found)


def _symmetrize(t):
    # families symmetric about 1/2 get exactly mirrored nodes
    s = len(t)
    out = t.copy()
    for i in range(s // 2):
        lo = 0.5 * (t[i] + (1.0 - t[s - 1 - i]))
        out[i] = lo
        out[s - 1 - i] = 1.0 - lo
    if s % 2:
        out[s // 2] = 0.5
    return out


def nodes(kind, s):
    """Collocation times ``0 <= c_1 < ... < c_s <= 1`` for the given family."""
    kind = QuadratureKind.parse(kind)
    if not isinstance(s, (int, np.integer)) or not kind.min_stages <= s <= MAX_STAGES:
        raise UnsupportedStageCount(
            f"{kind.value} supports s in [{kind.min_stages}, {MAX_STAGES}], got {s}")

    if kind is QuadratureKind.GAUSS_LEGENDRE:
        x = _newton_roots(lambda x: _legendre(s, x)[:2], s)
    elif kind is QuadratureKind.GAUSS_LOBATTO:
        x = [-1.0] + _newton_roots(lambda x: _legendre(s - 1, x)[1:], s - 2) + [1.0]
    elif kind is QuadratureKind.RADAU_IIA:
        def f(x):
            p, dp, _ = _legendre(s, x)
            q, dq, _ = _legendre(s - 1, x)
            return p - q, dp - dq
        x = _newton_roots(f, s - 1, known=(1.0,)) + [1.0]
    else:
        i = np.arange(1, s + 1)
        return (1.0 - np.cos((2 * i - 1) * np.pi / (2 * s))) / 2.0

    t = (np.asarray(x) + 1.0) / 2.0
    if kind is not QuadratureKind.RADAU_IIA:
        t = _symmetrize(t)
    if np.any(np.diff(t) <= 0) or t[0] < 0 or t[-1] > 1:
        raise AssertionError(f"node computation produced invalid nodes {t}")
    return t


@functools.lru_cache(maxsize=None)
def _reference_rule(m):
    """m-point Gauss-Legendre rule on [0, 1], exact to degree 2m-1."""
    t = nodes(QuadratureKind.GAUSS_LEGENDRE, m)
    w = np.empty(m)
    for k, tk in enumerate(t):
        _, dp, _ = _legendre(m, 2.0 * tk - 1.0)
        x = 2.0 * tk - 1.0
        w[k] = 1.0 / ((1.0 - x * x) * dp * dp)  # half of the [-1, 1] weight
    w.flags.writeable = False
    return t, w


# --------------------------------------------------------------------------
# Lagrange basis
# --------------------------------------------------------------------------

def barycentric_weights(c):
    c = np.asarray(c, dtype=float)
    diff = c[:, None] - c[None, :]
    np.fill_diagonal(diff, 1.0)
    return 1.0 / np.prod(diff, axis=1)


def lagrange_basis(c, t):
    """Values of every basis polynomial at ``t``.

    Returns an array of shape ``t.shape + (s,)`` using the second
    barycentric formula; evaluation exactly at a node returns the
    corresponding unit vector.
    """
    c = np.asarray(c, dtype=float)
    t = np.asarray(t, dtype=float)
    w = barycentric_weights(c)
    tt = t[..., None]
    diff = tt - c
    exact = diff == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = w / diff
        out = terms / terms.sum(axis=-1, keepdims=True)
    hit = exact.any(axis=-1)
    if np.any(hit):
        out[hit] = exact[hit].astype(float)
    return out


def lagrange_eval(c, j, t):
    """Value of the ``j``-th (zero-based) Lagrange basis polynomial at ``t``."""
    s = len(c)
    if not 0 <= j < s:
        raise IndexError(f"basis index {j} out of range for {s} nodes")
    return float(lagrange_basis(c, float(t))[j])


# --------------------------------------------------------------------------
# Coefficient tables
# --------------------------------------------------------------------------

def weights(c):
    """Nodal weights ``b_j``: the integral of ``l_j`` over [0, 1]."""
    c = np.asarray(c, dtype=float)
    x, w = _reference_rule(len(c))
    return w @ lagrange_basis(c, x)


def sprk_coeffs(c):
    """Matrix ``a[i, j]``: integral of ``l_j`` from 0 to ``c[i]``."""
    c = np.asarray(c, dtype=float)
    x, w = _reference_rule(len(c))
    # rule on [0, c_i] is (c_i x, c_i w)
    vals = lagrange_basis(c, c[:, None] * x[None, :])   # (s, m, s)
    return c[:, None] * np.einsum("m,imj->ij", w, vals)


def conjugate_coeffs(a, b):
    """Conjugate (``abar``, ``bbar``) making the partitioned pair symplectic.

    ``bbar = b`` and ``abar[i, j] = b[j] * (1 - a[j, i] / b[i])``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any(np.abs(b) <= 1e-14 * np.max(np.abs(b))):
        raise ZeroWeight(f"weights {b} contain a zero entry")
    abar = b[None, :] * (1.0 - a.T / b[:, None])
    return abar, b.copy()


def differentiation_matrix(c):
    """``dmat[i, j]`` is the derivative of ``l_j`` at ``c[i]``."""
    c = np.asarray(c, dtype=float)
    w = barycentric_weights(c)
    diff = c[:, None] - c[None, :]
    np.fill_diagonal(diff, 1.0)
    d = (w[None, :] / w[:, None]) / diff
    np.fill_diagonal(d, 0.0)
    np.fill_diagonal(d, -d.sum(axis=1))
    return d


def sg_coeffs(c):
    """Differentiation matrix, source/target coefficients and their determinant."""
    c = np.asarray(c, dtype=float)
    dmat = differentiation_matrix(c)
    alpha = lagrange_basis(c, 0.0)
    beta = lagrange_basis(c, 1.0)
    gamma = alpha[0] * beta[-1] - alpha[-1] * beta[0]
    if len(c) < 2 or abs(gamma) < 1e-14:
        raise DegenerateEndpoints(f"gamma={gamma} for nodes {c}")
    return dmat, alpha, beta, float(gamma)


def _readonly(x):
    x = np.array(x, dtype=float)
    x.flags.writeable = False
    return x


@dataclass(frozen=True)
class Tableau:
    """Every coefficient both integrator families need for one (kind, s)."""

    kind: QuadratureKind
    s: int
    c: np.ndarray
    b: np.ndarray
    a: np.ndarray
    abar: np.ndarray
    bbar: np.ndarray
    dmat: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    gamma: float

    def to_dict(self):
        return {
            "kind": self.kind.value,
            "s": self.s,
            "c": self.c.tolist(),
            "b": self.b.tolist(),
            "a": self.a.tolist(),
            "abar": self.abar.tolist(),
            "bbar": self.bbar.tolist(),
            "dmat": self.dmat.tolist(),
            "alpha": self.alpha.tolist(),
            "beta": self.beta.tolist(),
            "gamma": self.gamma,
        }

    @classmethod
    def from_dict(cls, d):
        fields = {k: _readonly(d[k]) for k in
                  ("c", "b", "a", "abar", "bbar", "dmat", "alpha", "beta")}
        return cls(kind=QuadratureKind.parse(d["kind"]), s=int(d["s"]),
                   gamma=float(d["gamma"]), **fields)


@functools.lru_cache(maxsize=None)
def _cached_tableau(kind, s):
    c = nodes(kind, s)
    b = weights(c)
    a = sprk_coeffs(c)
    abar, bbar = conjugate_coeffs(a, b)
    if s >= 2:
        dmat, alpha, beta, gamma = sg_coeffs(c)
    else:
        # a single node interpolates constants only; there is no sG scheme
        dmat, alpha, beta, gamma = np.zeros((1, 1)), np.ones(1), np.ones(1), 0.0
    return Tableau(kind=kind, s=s, c=_readonly(c), b=_readonly(b), a=_readonly(a),
                   abar=_readonly(abar), bbar=_readonly(bbar), dmat=_readonly(dmat),
                   alpha=_readonly(alpha), beta=_readonly(beta), gamma=float(gamma))


def tableau(kind, s):
    """Build (and cache) the :class:`Tableau` for ``kind`` with ``s`` stages."""
    return _cached_tableau(QuadratureKind.parse(kind), int(s))
