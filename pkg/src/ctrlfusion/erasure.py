"""Deleting members from a controlled fusion system.

Covers the fixed-point subspaces ``M_i = {f : R_i f = f}``, the three-case
deletion theorem, the single-packet erasure operators ``T^* D_i T`` and the
1-erasure reconstruction error with its optimality criterion.
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import numerics
from .errors import DimensionMismatch, EmptyRemainder, PositivityViolated
from .fusion import fusion_frame_operator
from .numerics import RANK_TOL, SYM_TOL
from .vector_frames import FrameBounds, classify_operator

__all__ = [
    "FIXED_POINT_TOL",
    "ErasureCase",
    "ErasureReport",
    "E1Report",
    "fixed_point_subspace",
    "erasure_analysis",
    "erasure_operator",
    "erasure_operator_norm",
    "reconstruction_error",
]

FIXED_POINT_TOL = 1e-8


class ErasureCase(str, Enum):
    ABOVE_B = "AboveB"
    EQUALS_B = "EqualsB"
    BELOW_A = "BelowA"
    INCONCLUSIVE = "Inconclusive"


def _require(system, indices):
    bad = [i for i in indices if not system.positivity_ok[i]]
    if bad:
        raise PositivityViolated(bad)


def fixed_point_subspace(system, i, tol=FIXED_POINT_TOL):
    """Basis of ``{f : R_i f = f}``; may have zero columns."""
    _require(system, [i])
    w, V = numerics.hermitian_spectrum(system.roots[i])
    return V[:, np.abs(w - 1.0) <= tol]


@dataclass(frozen=True)
class ErasureReport:
    erased_indices: tuple
    alpha: float
    case: ErasureCase
    A: float
    B: float
    predicted_lower: float | None
    actual_bounds: FrameBounds
    intersection_dim: int
    kernel_check: bool
    theorem_holds: bool
    # A minus sum_{J} v_i^2 ||C^* pi_i C'||: a lower bound valid without norm assumptions
    operator_lower: float = field(default=0.0)

    def to_dict(self):
        return {
            "erased_indices": list(self.erased_indices),
            "alpha": self.alpha,
            "case": self.case.value,
            "A": self.A,
            "B": self.B,
            "predicted_lower": self.predicted_lower,
            "actual_bounds": self.actual_bounds.to_dict(),
            "intersection_dim": self.intersection_dim,
            "kernel_check": self.kernel_check,
            "theorem_holds": self.theorem_holds,
            "operator_lower": self.operator_lower,
        }


def _select_case(alpha, A, B, tol):
    if abs(alpha - B) <= tol * max(1.0, B):
        return ErasureCase.EQUALS_B
    if alpha > B:
        return ErasureCase.ABOVE_B
    if alpha < A - tol * max(1.0, A):
        return ErasureCase.BELOW_A
    return ErasureCase.INCONCLUSIVE


def erasure_analysis(system, erased, tol=SYM_TOL, fixed_point_tol=FIXED_POINT_TOL):
    """Check the deletion theorem for the index set ``erased`` (0-based).

    ``A`` and ``B`` are the optimal bounds of the full system. The case is
    chosen by comparing ``alpha = sum_{i in J} v_i^2`` against them:

    * ``AboveB``: the fixed-point subspaces of ``J`` must intersect in {0}.
    * ``EqualsB``: that intersection must be killed by every remaining root.
    * ``BelowA``: the remaining members must have bounds ``A - alpha`` and ``B``.
    * ``Inconclusive``: nothing is claimed; the verdict is vacuously true.

    Erasing every member is allowed for the first two cases only.
    """
    system.require_positive()
    m = len(system)
    J = sorted(set(int(i) for i in erased))
    if not J:
        raise DimensionMismatch("erased index set is empty")
    if J[0] < 0 or J[-1] >= m:
        raise DimensionMismatch(f"indices must lie in 0..{m - 1}")
    rest = [k for k in range(m) if k not in J]

    w, _ = numerics.hermitian_spectrum(fusion_frame_operator(system), tol)
    A, B = float(w[0]), float(w[-1])
    weights = system.weights
    alpha = float(np.sum(weights[J] ** 2))
    case = _select_case(alpha, A, B, tol)
    if not rest and case is ErasureCase.BELOW_A:
        raise EmptyRemainder("cannot keep a frame after erasing every member")

    inter = numerics.subspace_intersection(
        [fixed_point_subspace(system, i, fixed_point_tol) for i in J], RANK_TOL
    )
    kernel_check = True
    for k in rest:
        if inter.shape[1] and np.max(np.linalg.norm(system.roots[k] @ inter, axis=0)) > max(tol, fixed_point_tol):
            kernel_check = False
            break

    if rest:
        reduced = classify_operator(fusion_frame_operator(system.subsystem(rest)), tol)
    else:
        reduced = classify_operator(np.zeros((system.dim, system.dim)), tol)

    predicted = None
    if case is ErasureCase.ABOVE_B:
        holds = inter.shape[1] == 0
    elif case is ErasureCase.EQUALS_B:
        holds = kernel_check
    elif case is ErasureCase.BELOW_A:
        predicted = A - alpha
        holds = (reduced.lower >= predicted - tol * max(1.0, B)
                 and reduced.upper <= B + tol * max(1.0, B))
    else:
        holds = True

    op_alpha = sum(weights[i] ** 2 * numerics.operator_norm(system.products[i]) for i in J)
    return ErasureReport(
        erased_indices=tuple(J),
        alpha=alpha,
        case=case,
        A=A,
        B=B,
        predicted_lower=predicted,
        actual_bounds=reduced,
        intersection_dim=int(inter.shape[1]),
        kernel_check=bool(kernel_check),
        theorem_holds=bool(holds),
        operator_lower=float(A - op_alpha),
    )


def erasure_operator(system, i):
    """Block selector ``D_i`` on the stacked sequence space (size n*m)."""
    m, n = len(system), system.dim
    if not 0 <= i < m:
        raise DimensionMismatch(f"index {i} out of range")
    D = np.zeros((n * m, n * m))
    D[i * n:(i + 1) * n, i * n:(i + 1) * n] = np.eye(n)
    return D


def erasure_operator_norm(system, i):
    """``||T^* D_i T|| = v_i^2 ||C^* pi_i C'||``."""
    system.require_positive()
    return float(system.members[i].weight ** 2 * numerics.operator_norm(system.products[i]))


@dataclass(frozen=True)
class E1Report:
    per_index_norm: tuple
    e1_exact: float
    e1_nominal: float
    optimal: bool
    optimality_residuals: tuple

    def to_dict(self):
        return {
            "per_index_norm": list(self.per_index_norm),
            "e1_exact": self.e1_exact,
            "e1_nominal": self.e1_nominal,
            "optimal": self.optimal,
            "optimality_residuals": list(self.optimality_residuals),
        }


def reconstruction_error(system, tol=SYM_TOL):
    """1-erasure reconstruction error and the per-index optimality test.

    ``e1_exact`` is the largest ``||T^* D_i T||``; ``e1_nominal`` replaces
    ``||C^* pi_i C'||`` by ``||C|| ||C'||``. The system counts as optimal when
    ``v_i^2 ||C|| ||C'|| = n / (m dim W_i)`` for every ``i`` within ``tol``.
    """
    system.require_positive()
    n, m = system.dim, len(system)
    cc = numerics.operator_norm(system.pair.C) * numerics.operator_norm(system.pair.Cprime)
    norms = tuple(erasure_operator_norm(system, i) for i in range(m))
    residuals = tuple(
        abs(mem.weight ** 2 * cc - n / (m * mem.subspace.dim)) for mem in system.members
    )
    nominal = max(mem.weight ** 2 * cc for mem in system.members)
    return E1Report(
        per_index_norm=norms,
        e1_exact=max(norms),
        e1_nominal=float(nominal),
        optimal=all(r <= tol for r in residuals),
        optimality_residuals=residuals,
    )
