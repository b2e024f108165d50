"""Composition of two controlled fusion systems and the approximation operator.

``cross_operator(W, Z) = T_W^* T_Z`` and, for a shared weight family,
``approximation_operator(W, Z) = sum_i v_i^2 R_{Z,i} R_{W,i} = T_Z^* T_W``.
"""

from dataclasses import dataclass

import numpy as np

from . import numerics
from .errors import DimensionMismatch, ValidationError
from .fusion import fusion_frame_operator
from .numerics import SYM_TOL, adjoint
from .vector_frames import FrameBounds, classify_operator

__all__ = [
    "TraceClassReport",
    "ApproxReport",
    "cross_operator",
    "trace_class_check",
    "approximation_operator",
    "block_synthesis_bound",
    "approximation_analysis",
]


def _check_shapes(W, Z):
    if W.dim != Z.dim:
        raise DimensionMismatch(f"dimensions differ: {W.dim} vs {Z.dim}")
    if len(W) != len(Z):
        raise DimensionMismatch(f"member counts differ: {len(W)} vs {len(Z)}")
    W.require_positive()
    Z.require_positive()


def _check_shared_weights(W, Z):
    if not np.allclose(W.weights, Z.weights, rtol=1e-12, atol=0.0):
        raise ValidationError("the approximation operator needs one shared weight family")


def cross_operator(W, Z):
    """``phi = sum_i v_i w_i R_{W,i} R_{Z,i}``."""
    _check_shapes(W, Z)
    phi = 0
    for mw, mz, Rw, Rz in zip(W.members, Z.members, W.roots, Z.roots):
        phi = phi + mw.weight * mz.weight * (Rw @ Rz)
    return phi


def _lambda_max(S, tol):
    w, _ = numerics.hermitian_spectrum(S, tol)
    return float(w[-1])


@dataclass(frozen=True)
class TraceClassReport:
    trace_norm_phi: float
    B_W: float
    B_Z: float
    bound: float
    holds: bool
    bound_dim: float
    holds_dim: bool

    def to_dict(self):
        return dict(self.__dict__)


def trace_class_check(W, Z, tol=SYM_TOL):
    """``tr|phi|`` against ``sqrt(B_W B_Z) * m`` (partial isometry norm 1).

    ``bound_dim`` uses ``max(m, n)`` in place of ``m``, which is what the
    sum over an orthonormal basis of the space actually produces.
    """
    phi = cross_operator(W, Z)
    tn = numerics.trace_norm(phi)
    bw = _lambda_max(fusion_frame_operator(W), tol)
    bz = _lambda_max(fusion_frame_operator(Z), tol)
    root = float(np.sqrt(bw * bz))
    bound = root * len(W)
    bound_dim = root * max(len(W), W.dim)
    return TraceClassReport(
        trace_norm_phi=tn,
        B_W=bw,
        B_Z=bz,
        bound=bound,
        holds=bool(tn <= bound + 1e-9 * max(1.0, bound)),
        bound_dim=bound_dim,
        holds_dim=bool(tn <= bound_dim + 1e-9 * max(1.0, bound_dim)),
    )


def approximation_operator(W, Z):
    """``Phi = sum_i v_i^2 R_{Z,i} R_{W,i}`` with the weights of ``W``."""
    _check_shapes(W, Z)
    _check_shared_weights(W, Z)
    Phi = 0
    for mw, Rw, Rz in zip(W.members, W.roots, Z.roots):
        Phi = Phi + mw.weight ** 2 * (Rz @ Rw)
    return Phi


def block_synthesis_bound(system):
    """``m * max_i v_i^2 ||C^* pi_i C'||``, a synthesis bound on all sequences.

    By Cauchy-Schwarz, ``||sum_i v_i R_i g_i||^2`` never exceeds this times
    ``sum_i ||g_i||^2``.
    """
    return len(system) * max(
        m.weight ** 2 * numerics.operator_norm(P)
        for m, P in zip(system.members, system.products)
    )


@dataclass(frozen=True)
class ApproxReport:
    gamma: float
    applicable: bool
    A1: float
    A2: float
    A1_conservative: float
    A2_conservative: float
    predicted_W: tuple | None
    predicted_Z: tuple | None
    predicted_W_conservative: tuple | None
    predicted_Z_conservative: tuple | None
    actual_W: FrameBounds
    actual_Z: FrameBounds
    holds: bool | None
    holds_conservative: bool | None
    holds_sqrt_gamma: bool | None
    dual_ok: bool

    def to_dict(self):
        out = dict(self.__dict__)
        out["actual_W"] = self.actual_W.to_dict()
        out["actual_Z"] = self.actual_Z.to_dict()
        for key in ("predicted_W", "predicted_Z", "predicted_W_conservative",
                    "predicted_Z_conservative"):
            if out[key] is not None:
                out[key] = list(out[key])
        return out


def _within(bounds, predicted, tol):
    lo, hi = predicted
    return (bounds.lower >= lo - tol * max(1.0, lo)
            and bounds.upper <= hi + tol * max(1.0, hi))


def approximation_analysis(W, Z, tol=SYM_TOL):
    """Predicted versus actual frame bounds from ``||f - Phi f||^2 <= gamma ||f||^2``.

    ``gamma = ||I - Phi||^2``, the optimal constant. The tight constants are
    ``A1 = lambda_max(S_W)`` and ``A2 = lambda_max(S_Z)``; the conservative
    ones are :func:`block_synthesis_bound` of each system. When
    ``gamma < 1`` the predicted bounds are ``((1-gamma)^2 / A2, A1)`` for W and
    ``((1-gamma)^2 / A1, A2)`` for Z.

    ``holds_sqrt_gamma`` repeats the tight check with ``(1 - sqrt(gamma))^2``,
    the lower constant that ``||Phi^{-1}|| <= 1 / (1 - ||I - Phi||)`` supports.
    """
    Phi = approximation_operator(W, Z)
    n = W.dim
    dual = approximation_operator(Z, W)
    dual_ok = numerics.operator_norm(dual - adjoint(Phi)) <= 1e-10 * max(1.0, numerics.operator_norm(Phi))

    gamma = numerics.operator_norm(np.eye(n) - Phi) ** 2
    S_W = fusion_frame_operator(W)
    S_Z = fusion_frame_operator(Z)
    A1 = _lambda_max(S_W, tol)
    A2 = _lambda_max(S_Z, tol)
    A1c = block_synthesis_bound(W)
    A2c = block_synthesis_bound(Z)
    actual_W = classify_operator(S_W, tol)
    actual_Z = classify_operator(S_Z, tol)

    applicable = gamma < 1.0
    pw = pz = pwc = pzc = None
    holds = holds_c = holds_sqrt = None
    if applicable:
        c = (1.0 - gamma) ** 2
        pw, pz = (c / A2, A1), (c / A1, A2)
        pwc, pzc = (c / A2c, A1c), (c / A1c, A2c)
        holds = _within(actual_W, pw, tol) and _within(actual_Z, pz, tol)
        holds_c = _within(actual_W, pwc, tol) and _within(actual_Z, pzc, tol)
        cs = (1.0 - np.sqrt(gamma)) ** 2
        holds_sqrt = (_within(actual_W, (cs / A2, A1), tol)
                      and _within(actual_Z, (cs / A1, A2), tol))
    return ApproxReport(
        gamma=float(gamma),
        applicable=bool(applicable),
        A1=A1,
        A2=A2,
        A1_conservative=float(A1c),
        A2_conservative=float(A2c),
        predicted_W=pw,
        predicted_Z=pz,
        predicted_W_conservative=pwc,
        predicted_Z_conservative=pzc,
        actual_W=actual_W,
        actual_Z=actual_Z,
        holds=None if holds is None else bool(holds),
        holds_conservative=None if holds_c is None else bool(holds_c),
        holds_sqrt_gamma=None if holds_sqrt is None else bool(holds_sqrt),
        dual_ok=bool(dual_ok),
    )
