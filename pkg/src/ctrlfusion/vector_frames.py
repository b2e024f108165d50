"""(C, C')-controlled frames of vectors.

A family ``{f_i}`` is a controlled frame when

    A ||f||^2 <= sum_i <C' f, f_i> <f_i, C f> <= B ||f||^2

for all ``f``. The middle term equals ``<S f, f>`` for the controlled frame
operator ``S f = sum_i <C' f, f_i> C^* f_i``.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import numerics
from .errors import DimensionMismatch, NotInvertible
from .numerics import SYM_TOL, adjoint

__all__ = [
    "MAX_COND",
    "Classification",
    "ControlledPair",
    "VectorFrame",
    "FrameBounds",
    "EigensumResult",
    "classify_operator",
    "controlled_frame_operator",
    "controlled_frame_bounds",
    "eigensum_identity",
]

MAX_COND = 1e12


class Classification(str, Enum):
    NOT_A_FRAME = "NotAFrame"
    FRAME = "Frame"
    TIGHT = "Tight"
    PARSEVAL = "Parseval"
    INDEFINITE = "Indefinite"


def _condition_number(M):
    _, s, _ = numerics.svd(M)
    if s[-1] == 0.0:
        return np.inf
    return float(s[0] / s[-1])


@dataclass(frozen=True, eq=False)
class ControlledPair:
    """The two control operators ``C`` and ``C'``.

    Build instances through :meth:`create`, which checks shapes and the
    condition-number gate for invertibility.
    """

    C: np.ndarray
    Cprime: np.ndarray
    cond_C: float
    cond_Cprime: float

    @classmethod
    def create(cls, C, Cprime=None, max_cond=MAX_COND):
        C = np.array(C)
        Cprime = C.copy() if Cprime is None else np.array(Cprime)
        for name, M in (("C", C), ("Cprime", Cprime)):
            if M.ndim != 2 or M.shape[0] != M.shape[1]:
                raise DimensionMismatch(f"{name} must be square, got shape {M.shape}")
            if not np.all(np.isfinite(M)):
                raise NotInvertible(f"{name} has non-finite entries")
        if C.shape != Cprime.shape:
            raise DimensionMismatch(
                f"C is {C.shape} but Cprime is {Cprime.shape}"
            )
        cond_C = _condition_number(C)
        cond_Cp = _condition_number(Cprime)
        for name, cond in (("C", cond_C), ("Cprime", cond_Cp)):
            if not cond <= max_cond:
                raise NotInvertible(f"{name} has condition number {cond:.3e}")
        C.setflags(write=False)
        Cprime.setflags(write=False)
        return cls(C, Cprime, cond_C, cond_Cp)

    @classmethod
    def identity(cls, n, dtype=float):
        return cls.create(np.eye(n, dtype=dtype))

    @classmethod
    def inverse_adjoint(cls, C):
        """Pair ``(C, (C^*)^{-1})``, for which ``C^* C' = I``."""
        C = np.asarray(C)
        return cls.create(C, np.linalg.inv(adjoint(C)))

    @property
    def dim(self):
        return self.C.shape[0]

    @property
    def is_same(self):
        return np.array_equal(self.C, self.Cprime)


@dataclass(frozen=True, eq=False)
class VectorFrame:
    """Vectors ``f_i`` stored as the columns of ``vectors`` (n x m)."""

    vectors: np.ndarray
    pair: ControlledPair

    def __post_init__(self):
        V = np.asarray(self.vectors)
        if V.ndim != 2 or V.shape[1] == 0:
            raise DimensionMismatch("need an n x m array with at least one column")
        if V.shape[0] != self.pair.dim:
            raise DimensionMismatch(
                f"vectors live in dimension {V.shape[0]}, controls in {self.pair.dim}"
            )
        object.__setattr__(self, "vectors", V)

    @classmethod
    def c_controlled(cls, vectors, C):
        """Frame with ``S f = sum_i <f, f_i> C f_i`` (single control ``C``).

        Realized as the pair ``(C^*, I)`` so that the general formula applies.
        """
        C = np.asarray(C)
        pair = ControlledPair.create(adjoint(C), np.eye(C.shape[0], dtype=C.dtype))
        return cls(vectors, pair)

    @property
    def dim(self):
        return self.vectors.shape[0]

    def __len__(self):
        return self.vectors.shape[1]


@dataclass(frozen=True)
class FrameBounds:
    lower: float
    upper: float
    classification: Classification
    selfadjoint_defect: float = 0.0

    def to_dict(self):
        return {
            "lower": self.lower,
            "upper": self.upper,
            "classification": self.classification.value,
            "selfadjoint_defect": self.selfadjoint_defect,
        }


def classify_operator(S, tol=SYM_TOL):
    """Optimal bounds and classification of a frame operator ``S``.

    A Hermitian ``S`` yields its extreme eigenvalues. Otherwise the result is
    ``Indefinite`` with the extreme eigenvalues of ``(S + S^*)/2``, whose
    quadratic form is the real part of ``<S f, f>``.
    """
    S = np.asarray(S)
    norm = numerics.operator_norm(S)
    defect_abs = numerics.operator_norm(S - adjoint(S))
    defect = defect_abs / norm if norm > 0 else 0.0
    w, _ = numerics.hermitian_spectrum(0.5 * (S + adjoint(S)), tol)
    A, B = float(w[0]), float(w[-1])
    if defect_abs > tol * max(1.0, norm):
        kind = Classification.INDEFINITE
    elif A <= tol:
        kind = Classification.NOT_A_FRAME
    elif abs(A - 1.0) <= tol and abs(B - 1.0) <= tol:
        kind = Classification.PARSEVAL
    elif abs(A - B) <= tol * max(1.0, B):
        kind = Classification.TIGHT
    else:
        kind = Classification.FRAME
    return FrameBounds(A, B, kind, defect)


def controlled_frame_operator(frame):
    """``S = sum_i (C^* f_i)(C'^* f_i)^*``."""
    F = frame.vectors
    C, Cp = frame.pair.C, frame.pair.Cprime
    if F.shape[0] != C.shape[0]:
        raise DimensionMismatch("frame and controls disagree on dimension")
    return (adjoint(C) @ F) @ adjoint(adjoint(Cp) @ F)


def controlled_frame_bounds(frame, tol=SYM_TOL):
    return classify_operator(controlled_frame_operator(frame), tol)


@dataclass(frozen=True)
class EigensumResult:
    lhs: complex
    rhs: complex
    holds: bool
    parseval_sum_ok: bool | None = None

    def to_dict(self):
        return {
            "lhs": _scalar(self.lhs),
            "rhs": _scalar(self.rhs),
            "holds": self.holds,
            "parseval_sum_ok": self.parseval_sum_ok,
        }


def _scalar(z):
    z = complex(z)
    return z.real if z.imag == 0.0 else [z.real, z.imag]


def eigensum_identity(frame, tol=SYM_TOL):
    """Compare ``tr S`` with ``sum_i <C^* f_i, C'^* f_i>``.

    The right-hand side is accumulated one vector at a time, never forming
    ``S``. For a Parseval frame, also checks that the sum equals the
    dimension.
    """
    S = controlled_frame_operator(frame)
    lhs = complex(np.trace(S))
    Cs = adjoint(frame.pair.C)
    Cps = adjoint(frame.pair.Cprime)
    rhs = 0j
    for k in range(len(frame)):
        f = frame.vectors[:, k]
        a = Cs @ f
        b = Cps @ f
        rhs += complex(np.vdot(b, a))  # <a, b> = b^* a
    holds = abs(lhs - rhs) <= tol * max(1.0, abs(lhs))
    parseval = None
    if classify_operator(S, tol).classification is Classification.PARSEVAL:
        parseval = bool(abs(rhs - frame.dim) <= tol)
    return EigensumResult(lhs, rhs, bool(holds), parseval)
