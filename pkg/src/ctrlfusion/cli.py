"""Command line entry point (``cff``).

Exit codes: 0 success, 1 usage or input error, 2 valid input for which the
analysis does not apply (non-positive control product, ``gamma >= 1``),
3 numerical failure.
"""

import argparse
import hashlib
import json
import os
import sys
import time
from enum import Enum
from pathlib import Path

import numpy as np

from . import __version__
from .approx import approximation_analysis, cross_operator, trace_class_check
from .config import (
    check_expected,
    generate_config,
    load_config,
    matrix_to_json,
    system_from_config,
    write_config,
)
from .erasure import erasure_analysis, reconstruction_error
from .errors import (
    CFFError,
    DecompositionFailure,
    EmptyRemainder,
    GenerationFailure,
    NotHermitian,
    NotPositive,
    PositivityViolated,
)
from .fusion import (
    RAYLEIGH_SAMPLES,
    fusion_frame_bounds,
    fusion_frame_operator,
    synthesis_characterization,
)
from .numerics import SYM_TOL
from .vector_frames import eigensum_identity

SCHEMA = "cff-report/1"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INAPPLICABLE = 2
EXIT_NUMERICAL = 3


class _Inapplicable(Exception):
    """Carries a partial report for exit code 2."""

    def __init__(self, result, verdicts):
        super().__init__("inapplicable")
        self.result = result
        self.verdicts = verdicts


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _default_tol():
    raw = os.environ.get("CFF_DEFAULT_TOL")
    if raw is None:
        return SYM_TOL
    try:
        return float(raw)
    except ValueError:
        return SYM_TOL


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, Enum):
        return x.value
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if np.isfinite(x) else str(x)
    if isinstance(x, (complex, np.complexfloating)):
        z = complex(x)
        return z.real if z.imag == 0.0 else [z.real, z.imag]
    if isinstance(x, np.ndarray):
        return matrix_to_json(x) if x.ndim == 2 else _jsonable(x.tolist())
    if hasattr(x, "to_dict"):
        return _jsonable(x.to_dict())
    return x


def _file_digest(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _load(path, tol):
    return system_from_config(load_config(path), tol)


def _cmd_analyze(args, tol):
    system = _load(args.config, tol)
    bounds, rayleigh_ok = fusion_frame_bounds(system, tol, args.samples, args.seed)
    trace = eigensum_identity(system.as_vector_frame(), tol)
    result = {
        "dimension": system.dim,
        "members": len(system),
        "positivity_ok": list(system.positivity_ok),
        "frame_operator": fusion_frame_operator(system),
        "bounds": bounds,
        "rayleigh_ok": rayleigh_ok,
        "trace_identity": trace,
    }
    if not system.all_positive:
        result["offending_indices"] = [i + 1 for i in system.offending_indices()]
        raise _Inapplicable(result, {"positivity": False, "trace_identity": trace.holds})
    char = synthesis_characterization(system, tol)
    result["characterization"] = char
    verdicts = {
        "trace_identity": trace.holds,
        "rayleigh_ok": rayleigh_ok,
        "surjective": char.surjective,
        "norm_matches_upper": char.norm_matches_upper,
        "characterization_consistent": char.consistent,
    }
    if trace.parseval_sum_ok is not None:
        verdicts["parseval_sum_ok"] = trace.parseval_sum_ok
    return result, verdicts


def _parse_indices(raw):
    try:
        idx = [int(p) for p in raw.split(",") if p.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad index list {raw!r}") from exc
    if not idx or min(idx) < 1:
        raise argparse.ArgumentTypeError("indices are 1-based positive integers")
    return idx


def _cmd_erase(args, tol):
    system = _load(args.config, tol)
    rep = erasure_analysis(system, [i - 1 for i in args.indices], tol)
    result = rep.to_dict()
    result["erased_indices"] = [i + 1 for i in rep.erased_indices]
    return result, {"theorem_holds": rep.theorem_holds}


def _cmd_error(args, tol):
    system = _load(args.config, tol)
    rep = reconstruction_error(system, tol)
    bounds, _ = fusion_frame_bounds(system, tol, 0)
    result = rep.to_dict()
    result["bounds"] = bounds
    return result, {
        "optimal": rep.optimal,
        "e1_exact_le_nominal": rep.e1_exact <= rep.e1_nominal + 1e-9,
    }


def _cmd_compose(args, tol):
    W = _load(args.config_w, tol)
    Z = _load(args.config_z, tol)
    phi = cross_operator(W, Z)
    rep = trace_class_check(W, Z, tol)
    result = {"phi": phi, "trace_class": rep}
    return result, {"trace_class_holds": rep.holds, "trace_class_holds_dim": rep.holds_dim}


def _cmd_approx(args, tol):
    W = _load(args.config_w, tol)
    Z = _load(args.config_z, tol)
    rep = approximation_analysis(W, Z, tol)
    verdicts = {
        "applicable": rep.applicable,
        "holds": rep.holds,
        "holds_conservative": rep.holds_conservative,
        "dual_ok": rep.dual_ok,
    }
    if not rep.applicable:
        raise _Inapplicable(rep.to_dict(), verdicts)
    return rep.to_dict(), verdicts


def _cmd_generate(args, tol):
    try:
        dims = [int(p) for p in args.dims.split(",")]
        cfg = generate_config(args.dim, dims, args.mode, args.weights, args.seed, args.field)
    except ValueError as exc:
        raise CFFError(str(exc)) from exc
    system = system_from_config(cfg, tol)
    result = {
        "positivity_ok": list(system.positivity_ok),
        "bounds": fusion_frame_bounds(system, tol, 0)[0],
    }
    if args.out:
        write_config(cfg, args.out)
        result["written"] = str(args.out)
    else:
        result["config"] = cfg
    return result, {"positivity": system.all_positive}


def _cmd_check(args, tol):
    cfg = load_config(args.config)
    system = system_from_config(cfg, tol)
    rows = check_expected(system, cfg.get("expected", {}))
    result = {"checks": [{"key": k, "ok": ok, "got": got} for k, ok, got in rows]}
    return result, {"all_passed": all(ok for _, ok, _ in rows)}


def build_parser():
    common = _ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None,
                        help="relative tolerance (default 1e-9 or $CFF_DEFAULT_TOL)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None,
                        help="write the report here (for generate: the configuration)")
    common.add_argument("--pretty", action="store_true")
    common.add_argument("--samples", type=int, default=RAYLEIGH_SAMPLES,
                        help="Monte Carlo Rayleigh samples")

    parser = _ArgumentParser(prog="cff", description="Controlled fusion frame analyses")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    p = sub.add_parser("analyze", parents=[common], help="bounds, trace identity, characterization")
    p.add_argument("config")
    p.set_defaults(func=_cmd_analyze, inputs=("config",))

    p = sub.add_parser("erase", parents=[common], help="deletion theorem for an index set")
    p.add_argument("config")
    p.add_argument("--indices", type=_parse_indices, required=True,
                   help="comma-separated 1-based member indices")
    p.set_defaults(func=_cmd_erase, inputs=("config",))

    p = sub.add_parser("error", parents=[common], help="1-erasure reconstruction error")
    p.add_argument("config")
    p.set_defaults(func=_cmd_error, inputs=("config",))

    p = sub.add_parser("compose", parents=[common], help="cross operator and trace-class bound")
    p.add_argument("config_w")
    p.add_argument("config_z")
    p.set_defaults(func=_cmd_compose, inputs=("config_w", "config_z"))

    p = sub.add_parser("approx", parents=[common], help="approximation operator analysis")
    p.add_argument("config_w")
    p.add_argument("config_z")
    p.set_defaults(func=_cmd_approx, inputs=("config_w", "config_z"))

    p = sub.add_parser("generate", parents=[common], help="seeded random configuration")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--dims", required=True, help="comma-separated subspace dimensions")
    p.add_argument("--mode", choices=("identity", "c2", "pair"), default="identity")
    p.add_argument("--weights", default="random", help="'random' or 'uniform:<v>'")
    p.add_argument("--field", choices=("real", "complex"), default="real")
    p.set_defaults(func=_cmd_generate, inputs=())

    p = sub.add_parser("check", parents=[common], help="verify a fixture's expected block")
    p.add_argument("config")
    p.set_defaults(func=_cmd_check, inputs=("config",))
    return parser


def _digest(args, tol):
    payload = {
        "command": args.command,
        "inputs": [_file_digest(getattr(args, name)) for name in args.inputs],
        "tol": tol,
        "seed": args.seed,
        "samples": args.samples,
    }
    for key in ("indices", "dim", "dims", "mode", "weights", "field"):
        if hasattr(args, key):
            payload[key] = getattr(args, key)
    blob = json.dumps(payload, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()


def render_report(report, pretty=False):
    if pretty:
        return json.dumps(report, sort_keys=True, indent=2) + "\n"
    return json.dumps(report, sort_keys=True, separators=(",", ":")) + "\n"


def run_command(argv=None, stdout=None):
    """Run one CLI invocation and return its exit code."""
    stdout = sys.stdout if stdout is None else stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    tol = args.tol if args.tol is not None else _default_tol()

    start = time.perf_counter()
    report = {
        "schema": SCHEMA,
        "command": args.command,
        "tolerances": {"tol": tol, "samples": args.samples},
        "seed": args.seed,
    }
    try:
        report["input_digest"] = _digest(args, tol)
    except OSError as exc:
        print(f"cff: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    code = EXIT_OK
    try:
        result, verdicts = args.func(args, tol)
    except _Inapplicable as exc:
        result, verdicts, code = exc.result, exc.verdicts, EXIT_INAPPLICABLE
    except (PositivityViolated, EmptyRemainder) as exc:
        result = {"error": {"type": type(exc).__name__, "message": str(exc)}}
        if isinstance(exc, PositivityViolated):
            result["offending_indices"] = [i + 1 for i in exc.indices]
        verdicts, code = {}, EXIT_INAPPLICABLE
    except (DecompositionFailure, NotHermitian, NotPositive, GenerationFailure) as exc:
        result = {"error": {"type": type(exc).__name__, "message": str(exc)}}
        verdicts, code = {}, EXIT_NUMERICAL
    except (CFFError, OSError) as exc:
        print(f"cff: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    report["result"] = result
    report["verdicts"] = verdicts
    report["wall_time_s"] = round(time.perf_counter() - start, 6)
    text = render_report(_jsonable(report), args.pretty)
    if args.out and args.command != "generate":
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        stdout.write(text)
    return code


def main(argv=None):
    sys.exit(run_command(argv))


if __name__ == "__main__":
    main()
