"""JSON system configurations: parsing, validation, generation and fixtures.

A configuration looks like::

    {
      "dimension": 3,
      "field": "real",
      "C": "identity",
      "Cprime": "same",
      "subspaces": [
        {"basis": [[1, 0, 0], [0, 1, 0]], "weight": 0.7071067811865476}
      ],
      "expected": {"bounds": [0.5, 1.0]}
    }

``C`` is a matrix (list of rows) or ``"identity"``. ``Cprime`` is a matrix or
one of ``"same"``, ``"inverse-adjoint"``, ``"identity"``. A basis is a list
of columns. Complex entries are ``[re, im]`` pairs; ``"expected"`` is
optional and only read by :func:`check_expected`.
"""

import json
import math
from pathlib import Path

import numpy as np
import scipy.linalg

from . import numerics
from .errors import CFFError, GenerationFailure, NotInvertible, ParseError, ValidationError
from .fusion import Subspace, WeightedSubspace, build_system, fusion_frame_operator
from .numerics import SYM_TOL, adjoint
from .vector_frames import ControlledPair, classify_operator

__all__ = [
    "CPRIME_KEYWORDS",
    "GENERATOR_MAX_COND",
    "parse_config",
    "system_from_config",
    "load_config",
    "load_system",
    "generate_config",
    "generate_system",
    "generate_companion",
    "write_config",
    "matrix_to_json",
    "check_expected",
]

CPRIME_KEYWORDS = ("same", "inverse-adjoint", "identity")
GENERATOR_MAX_COND = 1e6
GENERATOR_ATTEMPTS = 100


def _entry(x, where, complex_ok):
    if isinstance(x, bool):
        raise ValidationError("expected a number", where)
    if isinstance(x, (int, float)):
        value = complex(x)
    elif isinstance(x, list) and len(x) == 2 and all(
        isinstance(p, (int, float)) and not isinstance(p, bool) for p in x
    ):
        if not complex_ok:
            raise ValidationError("complex entry in a real configuration", where)
        value = complex(x[0], x[1])
    else:
        raise ValidationError("expected a number or [re, im] pair", where)
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise ValidationError("entries must be finite", where)
    return value


def _matrix(rows, where, complex_ok, shape=None):
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ValidationError("expected a non-empty list of rows", where)
    width = len(rows[0])
    out = []
    for i, row in enumerate(rows):
        if len(row) != width:
            raise ValidationError("rows have different lengths", f"{where}[{i}]")
        out.append([_entry(x, f"{where}[{i}][{j}]", complex_ok) for j, x in enumerate(row)])
    M = np.array(out, dtype=complex)
    if shape is not None and M.shape != shape:
        raise ValidationError(f"expected shape {shape}, got {M.shape}", where)
    return M if complex_ok else M.real.copy()


def parse_config(data):
    """Validate a configuration mapping; returns ``(pair, members)``."""
    if not isinstance(data, dict):
        raise ValidationError("configuration must be a JSON object")
    n = data.get("dimension")
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ValidationError("dimension must be a positive integer", "dimension")
    fld = data.get("field", "real")
    if fld not in ("real", "complex"):
        raise ValidationError("field must be 'real' or 'complex'", "field")
    cplx = fld == "complex"
    dtype = complex if cplx else float

    c_raw = data.get("C", "identity")
    if c_raw == "identity":
        C = np.eye(n, dtype=dtype)
    else:
        C = _matrix(c_raw, "C", cplx, (n, n))
    cp_raw = data.get("Cprime", "same")
    try:
        if cp_raw == "same":
            pair = ControlledPair.create(C)
        elif cp_raw == "identity":
            pair = ControlledPair.create(C, np.eye(n, dtype=dtype))
        elif cp_raw == "inverse-adjoint":
            pair = ControlledPair.inverse_adjoint(C)
        elif isinstance(cp_raw, str):
            raise ValidationError(f"unknown keyword {cp_raw!r}; use one of {CPRIME_KEYWORDS}", "Cprime")
        else:
            pair = ControlledPair.create(C, _matrix(cp_raw, "Cprime", cplx, (n, n)))
    except (NotInvertible, np.linalg.LinAlgError) as exc:
        raise ValidationError(str(exc), "C/Cprime") from exc

    subs = data.get("subspaces")
    if not isinstance(subs, list) or not subs:
        raise ValidationError("need a non-empty list of subspaces", "subspaces")
    members = []
    for i, item in enumerate(subs):
        where = f"subspaces[{i}]"
        if not isinstance(item, dict):
            raise ValidationError("expected an object", where)
        w = item.get("weight")
        if isinstance(w, bool) or not isinstance(w, (int, float)) or not math.isfinite(w):
            raise ValidationError("weight must be a number", f"{where}.weight")
        if w <= 0:
            raise ValidationError("weight must be positive", f"{where}.weight")
        cols = _matrix(item.get("basis"), f"{where}.basis", cplx)
        if cols.shape[1] != n:
            raise ValidationError(
                f"basis columns must have length {n}, got {cols.shape[1]}", f"{where}.basis"
            )
        try:
            sub = Subspace.span(cols.T)
        except CFFError as exc:
            raise ValidationError(str(exc), f"{where}.basis") from exc
        members.append(WeightedSubspace(sub, float(w)))
    return pair, members


def system_from_config(data, tol=SYM_TOL):
    pair, members = parse_config(data)
    return build_system(pair, members, tol)


def load_config(path):
    text = Path(path).read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"{path}:{exc.lineno}:{exc.colno}") from exc


def load_system(path, tol=SYM_TOL):
    """Read, validate and build the system described by a JSON file."""
    return system_from_config(load_config(path), tol)


def _json_entry(z, cplx):
    z = complex(z)
    return [z.real, z.imag] if cplx else z.real


def matrix_to_json(M, cplx=None):
    M = np.asarray(M)
    if cplx is None:
        cplx = np.iscomplexobj(M)
    return [[_json_entry(z, cplx) for z in row] for row in M]


def _gaussian(rng, shape, cplx):
    G = rng.standard_normal(shape)
    if cplx:
        G = G + 1j * rng.standard_normal(shape)
    return G


def _random_control(rng, n, cplx, max_cond=GENERATOR_MAX_COND):
    for _ in range(GENERATOR_ATTEMPTS):
        C = _gaussian(rng, (n, n), cplx)
        s = np.linalg.svd(C, compute_uv=False)
        if s[-1] > 0 and s[0] / s[-1] <= max_cond:
            return C
    raise GenerationFailure(
        f"no control with condition number <= {max_cond:g} after {GENERATOR_ATTEMPTS} draws"
    )


def _parse_weight_law(law):
    if law == "random":
        return "random", None
    if isinstance(law, tuple):
        return law
    if isinstance(law, str) and law.startswith("uniform:"):
        return "uniform", float(law.split(":", 1)[1])
    if isinstance(law, (int, float)):
        return "uniform", float(law)
    raise ValueError(f"unknown weight law {law!r}")


def generate_config(dim, dims, mode="identity", weight_law="random", seed=0,
                    field="real", bases=None):
    """Seeded random configuration.

    Parameters
    ----------
    dim : int
        Ambient dimension.
    dims : sequence of int
        Subspace dimensions, each in ``[1, dim]``.
    mode : {"identity", "c2", "pair"}
        ``identity``: ``C = C' = I``. ``c2``: one Gaussian ``C`` (condition
        number at most 1e6) with ``C' = C``, so every control product is
        PSD. ``pair``: independent ``C`` and ``C'``; positivity is not
        guaranteed.
    weight_law : ``"random"``, ``"uniform:<v>"`` or ``("uniform", v)``
        Random weights are uniform on [0.5, 1.5].
    seed : int
    field : {"real", "complex"}
    bases : sequence of arrays, optional
        Use these spanning columns instead of random subspaces.
    """
    if mode not in ("identity", "c2", "pair"):
        raise ValueError(f"unknown mode {mode!r}")
    dims = [int(k) for k in dims]
    if not dims or any(k < 1 or k > dim for k in dims):
        raise ValueError(f"subspace dimensions must lie in [1, {dim}]")
    cplx = field == "complex"
    kind, value = _parse_weight_law(weight_law)
    rng = np.random.default_rng(seed)

    if mode == "identity":
        C, Cp = "identity", "same"
    elif mode == "c2":
        C, Cp = matrix_to_json(_random_control(rng, dim, cplx), cplx), "same"
    else:
        C = matrix_to_json(_random_control(rng, dim, cplx), cplx)
        Cp = matrix_to_json(_random_control(rng, dim, cplx), cplx)

    subspaces = []
    for i, k in enumerate(dims):
        if bases is not None:
            U = numerics.orthonormalize(np.asarray(bases[i]))
        else:
            U = numerics.orthonormalize(_gaussian(rng, (dim, k), cplx))
        subspaces.append({"basis": matrix_to_json(U.T, cplx)})
    for item in subspaces:
        item["weight"] = value if kind == "uniform" else float(rng.uniform(0.5, 1.5))

    return {
        "dimension": int(dim),
        "field": "complex" if cplx else "real",
        "C": C,
        "Cprime": Cp,
        "subspaces": subspaces,
    }


def generate_system(dim, dims, mode="identity", weight_law="random", seed=0,
                    field="real", bases=None, tol=SYM_TOL):
    """Build the system of :func:`generate_config` (same parse path as files)."""
    cfg = generate_config(dim, dims, mode, weight_law, seed, field, bases)
    return system_from_config(cfg, tol)


def generate_companion(cfg, seed=0, rotation=None):
    """A second configuration sharing the controls and weights of ``cfg``.

    With ``rotation=None`` the subspaces are fresh Gaussian draws of the same
    dimensions. Otherwise every basis is rotated by ``expm(rotation * K)``
    for one random skew-Hermitian ``K`` with unit-variance entries.
    """
    pair, members = parse_config(cfg)
    n = pair.dim
    cplx = cfg.get("field", "real") == "complex"
    rng = np.random.default_rng(seed)
    if rotation is not None:
        K = _gaussian(rng, (n, n), cplx)
        Q = scipy.linalg.expm(rotation * (K - adjoint(K)) / 2)
    subspaces = []
    for item, mem in zip(cfg["subspaces"], members):
        if rotation is None:
            U = numerics.orthonormalize(_gaussian(rng, (n, mem.subspace.dim), cplx))
        else:
            U = numerics.orthonormalize(Q @ mem.subspace.basis)
        subspaces.append({"basis": matrix_to_json(U.T, cplx), "weight": item["weight"]})
    out = {k: v for k, v in cfg.items() if k not in ("subspaces", "expected")}
    out["subspaces"] = subspaces
    return out


def write_config(cfg, path):
    Path(path).write_text(json.dumps(cfg, indent=2) + "\n", encoding="utf-8")


def check_expected(system, expected, tol=1e-9):
    """Compare a system against an ``expected`` block.

    Returns a list of ``(key, ok, detail)`` tuples. Supported keys:
    ``positivity_ok``, ``frame_operator``, ``bounds``, ``classification``,
    ``e1_exact``, ``optimal``, ``erasures`` (list of objects with 1-based
    ``indices`` and optional ``case``, ``predicted_lower``,
    ``actual_bounds``, ``intersection_dim``, ``theorem_holds``).
    """
    from .erasure import erasure_analysis, reconstruction_error

    results = []

    def close(a, b):
        return abs(float(a) - float(b)) <= tol * max(1.0, abs(float(b)))

    if "positivity_ok" in expected:
        got = list(system.positivity_ok)
        results.append(("positivity_ok", got == list(expected["positivity_ok"]), got))
    if "frame_operator" in expected:
        S = fusion_frame_operator(system)
        want = _matrix(expected["frame_operator"], "expected.frame_operator", True)
        ok = S.shape == want.shape and np.max(np.abs(S - want)) <= tol
        results.append(("frame_operator", bool(ok), matrix_to_json(S)))
    if "bounds" in expected or "classification" in expected:
        b = classify_operator(fusion_frame_operator(system))
        if "bounds" in expected:
            lo, hi = expected["bounds"]
            results.append(("bounds", close(b.lower, lo) and close(b.upper, hi), [b.lower, b.upper]))
        if "classification" in expected:
            got = b.classification.value
            results.append(("classification", got == expected["classification"], got))
    if "e1_exact" in expected or "optimal" in expected:
        rep = reconstruction_error(system)
        if "e1_exact" in expected:
            results.append(("e1_exact", close(rep.e1_exact, expected["e1_exact"]), rep.e1_exact))
        if "optimal" in expected:
            results.append(("optimal", rep.optimal == expected["optimal"], rep.optimal))
    for k, spec in enumerate(expected.get("erasures", [])):
        rep = erasure_analysis(system, [i - 1 for i in spec["indices"]])
        ok = True
        if "case" in spec:
            ok &= rep.case.value == spec["case"]
        if "predicted_lower" in spec:
            ok &= rep.predicted_lower is not None and close(rep.predicted_lower, spec["predicted_lower"])
        if "actual_bounds" in spec:
            lo, hi = spec["actual_bounds"]
            ok &= close(rep.actual_bounds.lower, lo) and close(rep.actual_bounds.upper, hi)
        if "intersection_dim" in spec:
            ok &= rep.intersection_dim == spec["intersection_dim"]
        if "theorem_holds" in spec:
            ok &= rep.theorem_holds == spec["theorem_holds"]
        results.append((f"erasures[{k}]", bool(ok), rep.case.value))
    return results
