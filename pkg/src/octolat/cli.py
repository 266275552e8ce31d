"""Command-line driver: kernel tables, verification suites and convergence runs.

Reports are deterministic functions of the command line.  JSON reports
carry the configuration, the kernel hash and the git description of the
source tree; wall-clock timings are added only with ``--timings``.

Exit codes: 0 when every executed check passes, 1 when a check fails and
2 on a configuration error.  Both failure kinds write a JSON error object
to stderr.
"""

import argparse
import json
import os
import subprocess
import sys
import time
from importlib import metadata
from pathlib import Path

import numpy as np

from . import verify
from .checks import CheckResult, algebra_suite, calculus_suite
from .convergence import (
    ContinuousDomain,
    constant_function,
    kernel_shift_function,
    nonregular_function,
    scaling_error,
)
from .kernel import (
    CoverageError,
    KernelTable,
    build_kernel_table,
    f1_value,
    srw_green_oracle,
    truncation_bias,
)
from .lattice import DIM, DomainError, LatticeDomain

KERNEL_ENV = "OCTOLAT_KERNEL_CACHE"
ERROR_RATIO = 0.75
DHF_FACTOR = (3.0, 5.0)
CONSTANT_TOL = 1e-8
ORACLE_SIGMAS = 3.0


class ConfigError(Exception):
    """Invalid command line, missing file or unusable input."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


# -- report plumbing ----------------------------------------------------------


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=True, default=_jsonable) + "\n"


def git_describe():
    root = Path(__file__).resolve().parent
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty", "--tags"],
            cwd=root, capture_output=True, text=True, timeout=10, check=True,
        )
    except (OSError, subprocess.SubprocessError):
        return "unknown"
    return out.stdout.strip() or "unknown"


def _version():
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


class Phases:
    """Wall-clock per named phase; only reported when requested."""

    def __init__(self):
        self.seconds = {}

    def run(self, name, fn, *args, **kwargs):
        start = time.perf_counter()
        out = fn(*args, **kwargs)
        self.seconds[name] = self.seconds.get(name, 0.0) + time.perf_counter() - start
        return out


def _config(args):
    skip = {"handler", "json", "timings"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _report(args, command, checks, info=None, kernel=None, phases=None):
    report = {
        "command": command,
        "config": _config(args),
        "provenance": {
            "package": _version(),
            "git": git_describe(),
            "kernel_sha256": kernel.sha256() if kernel is not None else None,
        },
        "passed": all(c.passed for c in checks),
        "checks": [c.as_dict() for c in checks],
        "info": info or {},
    }
    if args.timings and phases is not None:
        report["timings"] = {k: round(v, 3) for k, v in phases.seconds.items()}
    return report


def _write(path, text):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _emit(args, report):
    """Write the JSON report and print it (--json) or a line per check."""
    text = dumps(report)
    if getattr(args, "out", None):
        _write(args.out, text)
    if args.json:
        sys.stdout.write(text)
    else:
        for c in report["checks"]:
            flag = "PASS" if c["passed"] else "FAIL"
            print(f"{flag}  {c['name']:<32} residual={c['residual']:.3e}  tol={c['tolerance']:.1e}")
        print(f"{report['command']}: {'passed' if report['passed'] else 'FAILED'}")
    if not report["passed"]:
        failed = [c["name"] for c in report["checks"] if not c["passed"]]
        sys.stderr.write(json.dumps({"error": {"type": "check_failure", "failed": failed}}) + "\n")
        return 1
    return 0


# -- inputs -------------------------------------------------------------------


def _load_kernel(path):
    path = path or os.environ.get(KERNEL_ENV)
    if not path:
        raise ConfigError(f"no kernel file: pass --kernel or set {KERNEL_ENV}")
    try:
        return KernelTable.load(path)
    except OSError as exc:
        raise ConfigError(f"cannot read kernel file {path}: {exc.strerror}") from None


def _load_domain(path):
    try:
        return LatticeDomain.from_json(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read domain file {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"domain file {path} is not valid JSON: {exc.msg}") from None


def _floats(text, name):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"{name} must be a comma-separated list of numbers") from None


def _vector(text, name):
    vals = _floats(text, name)
    if len(vals) == 1:
        vals = vals + [0.0] * (DIM - 1)
    if len(vals) != DIM:
        raise ConfigError(f"{name} needs 1 or {DIM} numbers, got {len(vals)}")
    return np.array(vals)


# -- kernel commands ----------------------------------------------------------


def cmd_kernel_build(args):
    phases = Phases()
    table = phases.run("build", build_kernel_table, args.range, args.tol, workers=args.threads)
    table.save(args.out)
    info = {"path": args.out, "range": table.range, "tol": table.tol, "classes": len(table)}
    report = _report(args, "kernel build", [], info, table, phases)
    report["config"].pop("out", None)
    if args.json:
        sys.stdout.write(dumps(report))
    else:
        print(f"wrote {args.out}: range {table.range}, {len(table)} classes, sha256 {table.sha256()}")
    return 0


def cmd_kernel_check(args):
    table = _load_kernel(args.path)
    phases = Phases()
    results, info = phases.run("check", verify.kernel_suite, table, args.samples, args.seed)
    if args.figure:
        from .plotting import estimate_figure

        estimate_figure(info["estimate_scan"], args.figure)
    return _emit(args, _report(args, "kernel check", results, info, table, phases))


def cmd_kernel_export(args):
    table = _load_kernel(args.path)
    text = table.to_csv()
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_kernel_oracle(args):
    """Compare F^1(0) with -G(0)/4 from simple random walks."""
    phases = Phases()
    g, err = phases.run("walks", srw_green_oracle, args.walks, args.seed, args.steps)
    f0 = phases.run("quadrature", f1_value, np.zeros(DIM, dtype=np.int64), args.tol)
    gap = abs(f0 + g / 4)
    sigma = err / 4
    checks = [CheckResult("srw_green_agreement", gap, ORACLE_SIGMAS * sigma)]
    info = {
        "f1_origin": f0,
        "srw_green": g,
        "srw_stderr": err,
        "minus_quarter_green": -g / 4,
        "sigmas": gap / sigma if sigma else float("inf"),
        "truncation_bias_bound": truncation_bias(args.steps),
    }
    return _emit(args, _report(args, "kernel oracle", checks, info, phases=phases))


# -- verify commands ----------------------------------------------------------


def cmd_verify_algebra(args):
    phases = Phases()
    results = phases.run("algebra", algebra_suite, args.seed, args.samples)
    return _emit(args, _report(args, "verify algebra", results, {"octonions": args.samples}, phases=phases))


def cmd_verify_stokes(args):
    domain = _load_domain(args.domain) if args.domain else None
    phases = Phases()
    results = phases.run("calculus", calculus_suite, domain, args.seed)
    info = {"points": len(domain) if domain is not None else 3**DIM}
    return _emit(args, _report(args, "verify stokes", results, info, phases=phases))


_SUITES = {
    "pompeiu": verify.pompeiu_suite,
    "plemelj": verify.plemelj_suite,
    "extension": verify.extension_suite,
    "exterior": verify.exterior_suite,
}


def cmd_verify_boundary(args):
    domain = _load_domain(args.domain)
    table = _load_kernel(args.kernel)
    phases = Phases()
    suite = _SUITES[args.suite]
    results, info = phases.run(args.suite, suite, table, domain, args.samples, args.seed)
    info = {"points": len(domain), "boundary_points": len(domain.boundary), **info}
    return _emit(args, _report(args, f"verify {args.suite}", results, info, table, phases))


# -- convergence --------------------------------------------------------------


def _continuous_domain(args):
    if args.shape == "ball":
        center = _vector(args.center, "--center") if args.center else None
        return ContinuousDomain.ball(args.radius, center)
    if args.side is None:
        raise ConfigError("--shape box needs --side")
    corner = _vector(args.corner, "--corner") if args.corner else np.zeros(DIM)
    return ContinuousDomain.box(corner, args.side)


def _test_function(args, domain):
    if args.fn == "constant":
        return constant_function(np.eye(8)[0]), {}
    if args.fn == "nonregular":
        return nonregular_function(), {}
    pole = _vector(args.pole, "--pole")
    dist = float(domain.distance_to_closure(pole[None])[0])
    if dist < 1:
        raise ConfigError(f"the pole must lie at distance >= 1 from the closed domain, got {dist:.3f}")
    return kernel_shift_function(pole), {"pole": pole, "pole_distance": dist}


def _table_source(args, phases):
    if args.kernel or os.environ.get(KERNEL_ENV):
        fixed = _load_kernel(args.kernel)
        return lambda range_: fixed, [fixed]
    cache = {}

    def table_for(range_):
        if range_ not in cache:
            cache[range_] = phases.run("kernel", build_kernel_table, range_, args.tol, workers=args.threads)
        return cache[range_]

    return table_for, cache


def convergence_checks(fn, report):
    """Pass/fail criteria for a convergence run with the given test function."""
    rows = report.rows
    if fn == "constant":
        return [CheckResult("constant_sup_error", max(r.sup_error for r in rows), CONSTANT_TOL)]
    checks = []
    for k, (a, b) in enumerate(zip(rows, rows[1:])):
        tag = f"h{a.h:g}_to_h{b.h:g}"
        if fn == "nonregular":
            # negative control: the error must not decrease
            checks.append(CheckResult(f"error_not_decreasing_{tag}", max(0.0, a.sup_error - b.sup_error), 0.0))
            continue
        ratio = b.sup_error / a.sup_error if a.sup_error else float("inf")
        checks.append(CheckResult(f"error_ratio_{tag}", ratio, ERROR_RATIO))
        factor = a.dhf_max / b.dhf_max if b.dhf_max else float("inf")
        mid = sum(DHF_FACTOR) / 2
        checks.append(CheckResult(f"dhf_factor_offset_{tag}", abs(factor - mid), (DHF_FACTOR[1] - DHF_FACTOR[0]) / 2))
    return checks


def cmd_converge(args):
    hs = _floats(args.hs, "--hs")
    if not hs or any(h <= 0 for h in hs):
        raise ConfigError("--hs must list positive mesh widths")
    domain = _continuous_domain(args)
    f_cont, info = _test_function(args, domain)
    phases = Phases()
    table_for, tables = _table_source(args, phases)
    report = phases.run(
        "scaling", scaling_error, table_for, f_cont, domain, hs, args.samples, args.seed, args.surface_samples
    )
    checks = convergence_checks(args.fn, report)
    used = tables if isinstance(tables, list) else [tables[k] for k in sorted(tables)]
    info.update(report.as_dict())
    info["kernel_ranges"] = [t.range for t in used]
    info["kernel_sha256"] = [t.sha256() for t in used]
    info["sup_error_ratios"] = report.ratios("sup_error")
    info["dhf_factors"] = [1 / r if r else float("inf") for r in report.ratios("dhf_max")]
    if args.out:
        _write(args.out, report.to_csv())
    else:
        sys.stdout.write(report.to_csv())
    if args.figure:
        from .plotting import convergence_figure

        convergence_figure(report, args.figure, title=f"{args.fn}, {args.shape}")
    out = _report(args, "converge", checks, info, phases=phases)
    if args.report:
        _write(args.report, dumps(out))
    if args.json:
        sys.stdout.write(dumps(out))
    else:
        for c in out["checks"]:
            flag = "PASS" if c["passed"] else "FAIL"
            print(f"{flag}  {c['name']:<32} value={c['residual']:.4g}  tol={c['tolerance']:.4g}", file=sys.stderr)
    if not out["passed"]:
        failed = [c["name"] for c in out["checks"] if not c["passed"]]
        sys.stderr.write(json.dumps({"error": {"type": "check_failure", "failed": failed}}) + "\n")
        return 1
    return 0


# -- info ---------------------------------------------------------------------


def cmd_info(args):
    import scipy

    info = {
        "package": _version(),
        "git": git_describe(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "cpu_count": os.cpu_count(),
        "kernel_cache": os.environ.get(KERNEL_ENV),
        "tolerances": {
            "pompeiu": verify.POMPEIU_TOL,
            "regularity": verify.REGULARITY_TOL,
            "plemelj_branch": verify.BRANCH_TOL,
            "projection": verify.PROJECTION_TOL,
            "extension": verify.EXTENSION_TOL,
            "kernel_identity": verify.IDENTITY_TOL,
            "kernel_step": verify.STEP_TOL,
            "convergence_error_ratio": ERROR_RATIO,
            "convergence_dhf_factor": list(DHF_FACTOR),
        },
    }
    sys.stdout.write(dumps(info))
    return 0


# -- parser -------------------------------------------------------------------


def _common(p, samples=None, seed=True):
    p.add_argument("--json", action="store_true", help="print the JSON report to stdout")
    p.add_argument("--timings", action="store_true", help="add wall-clock seconds per phase to the report")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1, help="worker cap (default: all cores)")
    if samples is not None:
        p.add_argument("--samples", type=int, default=samples)
    if seed:
        p.add_argument("--seed", type=int, default=0)


def build_parser():
    parser = _Parser(prog="octolat", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)

    kernel = sub.add_parser("kernel", help="build, check and export F^1 tables")
    ksub = kernel.add_subparsers(dest="action", required=True, parser_class=_Parser)

    p = ksub.add_parser("build", help="tabulate F^1 up to a Chebyshev range")
    p.add_argument("--range", type=int, required=True)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--out", required=True)
    _common(p, seed=False)
    p.set_defaults(handler=cmd_kernel_build)

    p = ksub.add_parser("check", help="defining identities and estimate scan")
    p.add_argument("path", nargs="?")
    p.add_argument("--out", help="write the JSON report here")
    p.add_argument("--figure", help="render the estimate scan to this PNG")
    _common(p, samples=10)
    p.set_defaults(handler=cmd_kernel_check)

    p = ksub.add_parser("export-csv", help="dump the canonical classes as CSV")
    p.add_argument("path", nargs="?")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_kernel_export, json=False, timings=False)

    p = ksub.add_parser("oracle", help="compare F^1(0) with a random-walk estimate")
    p.add_argument("--walks", type=int, default=10_000_000)
    p.add_argument("--steps", type=int, default=128)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--out")
    _common(p)
    p.set_defaults(handler=cmd_kernel_oracle)

    ver = sub.add_parser("verify", help="run a verification suite")
    vsub = ver.add_subparsers(dest="suite", required=True, parser_class=_Parser)
    p = vsub.add_parser("algebra", help="sign law and octonion identities")
    p.add_argument("--out")
    _common(p, samples=10_000)
    p.set_defaults(handler=cmd_verify_algebra)
    p = vsub.add_parser("stokes", help="Leibniz, Gauss and Stokes identities")
    p.add_argument("--domain", help="domain JSON (default: the side-3 box)")
    p.add_argument("--out")
    _common(p)
    p.set_defaults(handler=cmd_verify_stokes)
    for name in _SUITES:
        p = vsub.add_parser(name, help=f"{name} identities of the boundary operators")
        p.add_argument("--domain", required=True)
        p.add_argument("--kernel", help=f"kernel file (default: ${KERNEL_ENV})")
        p.add_argument("--out")
        _common(p, samples=25)
        p.set_defaults(handler=cmd_verify_boundary)

    p = sub.add_parser("converge", help="scaling-limit experiment")
    p.add_argument("--shape", choices=("ball", "box"), default="ball")
    p.add_argument("--radius", type=float, default=2.2)
    p.add_argument("--center")
    p.add_argument("--corner")
    p.add_argument("--side", type=float)
    p.add_argument("--hs", default="1,0.5")
    p.add_argument("--fn", choices=("kernel-shift", "constant", "nonregular"), default="kernel-shift")
    p.add_argument("--pole", default="6", help="pole a: one number t for t e_0, or 8 numbers")
    p.add_argument("--kernel", help="use this kernel file instead of building tables in memory")
    p.add_argument("--tol", type=float, default=1e-10, help="quadrature tolerance for in-memory tables")
    p.add_argument("--surface-samples", type=int, default=10_000)
    p.add_argument("--out", help="CSV output (default: stdout)")
    p.add_argument("--report", help="write the JSON report here")
    p.add_argument("--figure", help="render the convergence plot to this PNG")
    _common(p, samples=20)
    p.set_defaults(handler=cmd_converge)

    p = sub.add_parser("info", help="versions, tolerances and environment")
    p.set_defaults(handler=cmd_info, json=True, timings=False)
    return parser


def run(argv=None):
    """Parse ``argv`` and execute; returns the process exit code."""
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "threads", 1) < 1:
            raise ConfigError("--threads must be >= 1")
        if getattr(args, "samples", 1) < 1:
            raise ConfigError("--samples must be >= 1")
        return args.handler(args)
    except (ConfigError, DomainError, CoverageError, ValueError) as exc:
        kind = "coverage" if isinstance(exc, CoverageError) else "config"
        sys.stderr.write(json.dumps({"error": {"type": kind, "message": str(exc)}}) + "\n")
        return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
