"""Symplectic partitioned Runge-Kutta and symplectic Galerkin variational integrators."""
from .collocation import QuadratureKind, Tableau, tableau
from .integrators import Family, Method, StageSet, Trajectory, integrate, step
from .mechanics import LagrangianSystem, PhaseState
from .newton import SolveReport, SolverConfig

__all__ = [
    "Family", "LagrangianSystem", "Method", "PhaseState", "QuadratureKind",
    "SolveReport", "SolverConfig", "StageSet", "Tableau", "Trajectory",
    "integrate", "step", "tableau",
]
