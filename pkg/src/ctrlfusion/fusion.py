"""Controlled fusion systems and their analysis, synthesis and frame operators.

A system is a list of weighted subspaces ``(W_i, v_i)`` with a control pair
``(C, C')``. For each index the control product ``C^* pi_i C'`` is tested for
Hermitian positivity; where it passes, its square root ``R_i`` is cached and
the analysis operator ``T f = {v_i R_i f}`` becomes available.
"""

from dataclasses import dataclass

import numpy as np

from . import numerics
from .errors import DimensionMismatch, NotHermitian, NotPositive, PositivityViolated, ValidationError
from .numerics import RANK_TOL, SYM_TOL, adjoint
from .vector_frames import (
    ControlledPair,
    VectorFrame,
    classify_operator,
)

__all__ = [
    "RAYLEIGH_SAMPLES",
    "Subspace",
    "WeightedSubspace",
    "ControlledFusionSystem",
    "Characterization",
    "projection",
    "build_system",
    "analysis_matrix",
    "analysis_apply",
    "synthesis_apply",
    "in_range",
    "fusion_frame_operator",
    "fusion_frame_bounds",
    "rayleigh_extremes",
    "synthesis_characterization",
]

RAYLEIGH_SAMPLES = 1000


@dataclass(frozen=True, eq=False)
class Subspace:
    """A subspace of C^n held as an n x k orthonormal basis."""

    basis: np.ndarray

    def __post_init__(self):
        U = np.asarray(self.basis)
        if U.ndim != 2 or U.shape[1] < 1 or U.shape[1] > U.shape[0]:
            raise DimensionMismatch(f"basis shape {U.shape} is not n x k with 1 <= k <= n")
        gram = adjoint(U) @ U
        if np.max(np.abs(gram - np.eye(U.shape[1]))) > 1e-10:
            raise ValidationError("basis columns are not orthonormal")
        U.setflags(write=False)
        object.__setattr__(self, "basis", U)

    @classmethod
    def span(cls, columns, tol=RANK_TOL):
        """Subspace spanned by arbitrary columns (orthonormalized here)."""
        return cls(numerics.orthonormalize(columns, tol))

    @classmethod
    def full(cls, n, dtype=float):
        return cls(np.eye(n, dtype=dtype))

    @property
    def ambient_dim(self):
        return self.basis.shape[0]

    @property
    def dim(self):
        return self.basis.shape[1]


@dataclass(frozen=True, eq=False)
class WeightedSubspace:
    subspace: Subspace
    weight: float

    def __post_init__(self):
        if not (np.isfinite(self.weight) and self.weight > 0):
            raise ValidationError("weight must be positive")


@dataclass(frozen=True, eq=False)
class ControlledFusionSystem:
    """Immutable system; construct with :func:`build_system`."""

    pair: ControlledPair
    members: tuple
    products: tuple
    roots: tuple
    positivity_ok: tuple

    @property
    def dim(self):
        return self.pair.dim

    def __len__(self):
        return len(self.members)

    @property
    def weights(self):
        return np.array([m.weight for m in self.members], dtype=float)

    @property
    def all_positive(self):
        return all(self.positivity_ok)

    def offending_indices(self):
        return [i for i, ok in enumerate(self.positivity_ok) if not ok]

    def require_positive(self):
        bad = self.offending_indices()
        if bad:
            raise PositivityViolated(bad)

    def subsystem(self, indices):
        """System restricted to ``indices`` (cached roots are reused)."""
        idx = list(indices)
        return ControlledFusionSystem(
            self.pair,
            tuple(self.members[i] for i in idx),
            tuple(self.products[i] for i in idx),
            tuple(self.roots[i] for i in idx),
            tuple(self.positivity_ok[i] for i in idx),
        )

    def with_weights(self, weights):
        weights = list(weights)
        if len(weights) != len(self):
            raise DimensionMismatch("one weight per member required")
        members = tuple(
            WeightedSubspace(m.subspace, float(w)) for m, w in zip(self.members, weights)
        )
        return ControlledFusionSystem(
            self.pair, members, self.products, self.roots, self.positivity_ok
        )

    def as_vector_frame(self):
        """The vector frame ``{v_i e_ij}`` built from every member's basis.

        Its controlled frame operator under the same pair is ``S_W``.
        """
        cols = [m.weight * m.subspace.basis for m in self.members]
        return VectorFrame(np.hstack(cols), self.pair)


def projection(W):
    U = W.basis
    return U @ adjoint(U)


def build_system(pair, members, tol=SYM_TOL):
    """Assemble a system, testing positivity of each ``C^* pi_i C'``.

    Parameters
    ----------
    pair : ControlledPair
    members : sequence of WeightedSubspace
    tol : float
        Relative tolerance for the Hermitian and positivity tests.
    """
    members = tuple(members)
    if not members:
        raise DimensionMismatch("a system needs at least one member")
    n = pair.dim
    Cs = adjoint(pair.C)
    products, roots, ok = [], [], []
    for i, m in enumerate(members):
        if m.subspace.ambient_dim != n:
            raise DimensionMismatch(
                f"member {i} lives in dimension {m.subspace.ambient_dim}, expected {n}"
            )
        P = Cs @ projection(m.subspace) @ pair.Cprime
        P.setflags(write=False)
        products.append(P)
        try:
            R = numerics.psd_sqrt(P, tol)
        except (NotHermitian, NotPositive):
            roots.append(None)
            ok.append(False)
        else:
            R.setflags(write=False)
            roots.append(R)
            ok.append(True)
    return ControlledFusionSystem(pair, members, tuple(products), tuple(roots), tuple(ok))


def analysis_matrix(system):
    """Block-stacked ``(n*m) x n`` matrix with blocks ``v_i R_i``."""
    system.require_positive()
    return np.vstack([m.weight * R for m, R in zip(system.members, system.roots)])


def analysis_apply(system, f):
    """``T f`` as an ``(m, n)`` array, one row per block."""
    system.require_positive()
    f = np.asarray(f)
    return np.stack([m.weight * (R @ f) for m, R in zip(system.members, system.roots)])


def synthesis_apply(system, g):
    """``T^* g = sum_i v_i R_i g_i`` for a block sequence ``g`` of shape (m, n)."""
    system.require_positive()
    g = np.asarray(g)
    if g.ndim != 2 or g.shape != (len(system), system.dim):
        raise DimensionMismatch(
            f"sequence must have shape ({len(system)}, {system.dim}), got {g.shape}"
        )
    out = np.zeros(system.dim, dtype=np.result_type(g, system.roots[0]))
    for m, R, gi in zip(system.members, system.roots, g):
        out = out + m.weight * (R @ gi)
    return out


def in_range(system, g, tol=1e-9):
    """Whether a block sequence lies in the range of the analysis operator."""
    T = analysis_matrix(system)
    x = np.asarray(g).reshape(-1)
    proj = T @ (numerics.pinv(T) @ x)
    return bool(np.linalg.norm(x - proj) <= tol * max(1.0, np.linalg.norm(x)))


def fusion_frame_operator(system):
    """``S_W = sum_i v_i^2 C^* pi_i C'``, from the raw products (no roots)."""
    out = np.zeros_like(system.products[0], dtype=np.result_type(system.products[0], float))
    for m, P in zip(system.members, system.products):
        out = out + m.weight ** 2 * P
    return out


def rayleigh_extremes(system, samples=RAYLEIGH_SAMPLES, seed=0):
    """Min and max of ``sum_i v_i^2 ||R_i f||^2`` over random unit vectors."""
    T = analysis_matrix(system)
    rng = np.random.default_rng(seed)
    n = system.dim
    X = rng.standard_normal((n, samples))
    if np.iscomplexobj(T):
        X = X + 1j * rng.standard_normal((n, samples))
    X /= np.linalg.norm(X, axis=0)
    q = np.sum(np.abs(T @ X) ** 2, axis=0)
    return float(q.min()), float(q.max())


def fusion_frame_bounds(system, tol=SYM_TOL, samples=RAYLEIGH_SAMPLES, seed=0):
    """Optimal bounds of ``S_W`` plus a Monte Carlo Rayleigh cross-check.

    Systems with a non-positive control product are classified from
    ``S_W`` alone (typically ``Indefinite``) and skip the Rayleigh check,
    which needs the roots. Returns ``(FrameBounds, rayleigh_ok)`` where
    ``rayleigh_ok`` is ``None`` when the check was skipped.
    """
    bounds = classify_operator(fusion_frame_operator(system), tol)
    if not system.all_positive or samples <= 0:
        return bounds, None
    lo, hi = rayleigh_extremes(system, samples, seed)
    ok = lo >= bounds.lower - 1e-8 and hi <= bounds.upper + 1e-8
    return bounds, bool(ok)


@dataclass(frozen=True)
class Characterization:
    surjective: bool
    norm: float
    upper_bound: float
    norm_matches_upper: bool
    pinv_lower: float
    lower_bound: float
    consistent: bool

    def to_dict(self):
        return dict(self.__dict__)


def synthesis_characterization(system, tol=SYM_TOL, rank_tol=RANK_TOL):
    """Surjectivity and norm facts about the synthesis operator ``T^*``.

    ``norm`` is ``||T^*||``, compared against ``sqrt(B)`` with
    ``B = lambda_max(S_W)``. ``pinv_lower`` is ``||pinv(T^*)||^{-2}``, which
    on a frame must equal ``lambda_min(S_W)``.
    """
    Ts = adjoint(analysis_matrix(system))
    _, s, _ = numerics.svd(Ts)
    n = system.dim
    rank = int(np.sum(s > rank_tol * s[0])) if s[0] > 0 else 0
    surjective = rank == n
    norm = float(s[0])
    w, _ = numerics.hermitian_spectrum(fusion_frame_operator(system), tol)
    A, B = float(w[0]), float(w[-1])
    pinv_norm = numerics.operator_norm(numerics.pinv(Ts))
    pinv_lower = pinv_norm ** -2 if pinv_norm > 0 else float("inf")
    consistent = surjective and abs(pinv_lower - A) <= tol * max(1.0, A)
    return Characterization(
        surjective=surjective,
        norm=norm,
        upper_bound=B,
        norm_matches_upper=bool(abs(norm ** 2 - B) <= tol * max(1.0, B)),
        pinv_lower=float(pinv_lower),
        lower_bound=A,
        consistent=bool(consistent),
    )
