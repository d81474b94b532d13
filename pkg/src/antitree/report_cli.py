"""Configuration ingestion, orchestration, and machine-readable reports.

One JSON document describes one run: the antitree generators, the truncation
depth, and solver knobs.  Unknown keys are rejected with the offending path
so typos never silently fall back to defaults.  Every output file is written
atomically (temp file, then rename) with floats normalized to 15 significant
digits, so identical configs give byte-identical artifacts.

Exit codes: 0 success, 1 usage or config error, 2 verification failure,
3 internal consistency violation.
"""

from __future__ import annotations

import argparse
import dataclasses
import enum
import json
import math
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import criteria, graph_oracle, spectra
from .model import (AlternatingSpheres, AntitreeSpec, ConstantLength,
                    ExplicitLengths, ExplicitSpheres, ExponentialSpheres,
                    InvalidSpecError, PolynomialSpheres, PowerLength,
                    build_profile)

SCHEMA_VERSION = "1"
ANALYSES = ("classify", "spectrum", "verify", "weyl", "gap")


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# config parsing


@dataclass(frozen=True)
class SolverKnobs:
    h: float = 1.0 / 200.0
    k_max: int = 8
    lambda_max: float = 120.0
    oracle_count: int = 10
    tol: float = 1e-3
    m_max: int = 8
    right_bc: str = "dirichlet"
    robin_theta: float = 0.0
    weyl_lambdas: tuple[float, ...] = (1e4,)
    n_list: tuple[int, ...] = tuple(range(5, 31))

    def boundary_condition(self) -> spectra.BoundaryCondition:
        if self.right_bc == "dirichlet":
            return spectra.BoundaryCondition.dirichlet()
        if self.right_bc == "neumann":
            return spectra.BoundaryCondition.neumann()
        if self.right_bc == "robin":
            return spectra.BoundaryCondition.robin(self.robin_theta)
        raise ConfigError(f"config error at solver.right_bc: {self.right_bc!r}")


@dataclass(frozen=True)
class RunConfig:
    spec: AntitreeSpec
    truncation: int
    analyses: tuple[str, ...]
    solver: SolverKnobs
    out_dir: str | None
    echo: dict = field(repr=False, default_factory=dict)


def _expect_keys(obj: dict, allowed: set[str], path: str) -> None:
    for key in obj:
        if key not in allowed:
            raise ConfigError(f"config error at {path}.{key}: unknown key")


def _parse_spheres(obj, path):
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ConfigError(f"config error at {path}: expected an object with 'kind'")
    kind = obj["kind"]
    try:
        if kind == "explicit":
            _expect_keys(obj, {"kind", "values"}, path)
            return ExplicitSpheres(tuple(int(v) for v in obj["values"]))
        if kind == "exponential":
            _expect_keys(obj, {"kind", "beta"}, path)
            return ExponentialSpheres(int(obj["beta"]))
        if kind == "polynomial":
            _expect_keys(obj, {"kind", "q"}, path)
            return PolynomialSpheres(int(obj["q"]))
        if kind == "alternating":
            _expect_keys(obj, {"kind", "pattern"}, path)
            return AlternatingSpheres(tuple(int(v) for v in obj["pattern"]))
    except (InvalidSpecError, KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"config error at {path}: {e}") from e
    raise ConfigError(f"config error at {path}.kind: unknown kind {kind!r}")


def _parse_lengths(obj, path):
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ConfigError(f"config error at {path}: expected an object with 'kind'")
    kind = obj["kind"]
    try:
        if kind == "explicit":
            _expect_keys(obj, {"kind", "values"}, path)
            return ExplicitLengths(tuple(float(v) for v in obj["values"]))
        if kind == "constant":
            _expect_keys(obj, {"kind", "ell"}, path)
            return ConstantLength(float(obj["ell"]))
        if kind == "power":
            _expect_keys(obj, {"kind", "s"}, path)
            return PowerLength(float(obj["s"]))
    except (InvalidSpecError, KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"config error at {path}: {e}") from e
    raise ConfigError(f"config error at {path}.kind: unknown kind {kind!r}")


def load_config(path: str) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as f:
            raw = json.load(f)
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"config error at line {e.lineno}: {e.msg}") from e
    if not isinstance(raw, dict):
        raise ConfigError("config error at top level: expected an object")
    _expect_keys(raw, {"spec", "truncation", "analyses", "solver", "out_dir"}, "$")
    if "spec" not in raw:
        raise ConfigError("config error at $.spec: required")
    spec_obj = raw["spec"]
    if not isinstance(spec_obj, dict):
        raise ConfigError("config error at $.spec: expected an object")
    _expect_keys(spec_obj, {"spheres", "lengths"}, "spec")
    spec = AntitreeSpec(_parse_spheres(spec_obj.get("spheres"), "spec.spheres"),
                        _parse_lengths(spec_obj.get("lengths"), "spec.lengths"))

    truncation = raw.get("truncation", 30)
    if not isinstance(truncation, int) or truncation < 1:
        raise ConfigError("config error at $.truncation: expected an integer >= 1")

    analyses = raw.get("analyses", ["classify"])
    if (not isinstance(analyses, list)
            or any(a not in ANALYSES for a in analyses)):
        raise ConfigError(f"config error at $.analyses: entries must be among {ANALYSES}")

    knobs = raw.get("solver", {})
    if not isinstance(knobs, dict):
        raise ConfigError("config error at $.solver: expected an object")
    defaults = SolverKnobs()
    _expect_keys(knobs, {f.name for f in dataclasses.fields(SolverKnobs)}, "solver")
    try:
        solver = SolverKnobs(
            h=float(knobs.get("h", defaults.h)),
            k_max=int(knobs.get("k_max", defaults.k_max)),
            lambda_max=float(knobs.get("lambda_max", defaults.lambda_max)),
            oracle_count=int(knobs.get("oracle_count", defaults.oracle_count)),
            tol=float(knobs.get("tol", defaults.tol)),
            m_max=int(knobs.get("m_max", defaults.m_max)),
            right_bc=str(knobs.get("right_bc", defaults.right_bc)),
            robin_theta=float(knobs.get("robin_theta", defaults.robin_theta)),
            weyl_lambdas=tuple(float(v) for v in knobs.get(
                "weyl_lambdas", defaults.weyl_lambdas)),
            n_list=tuple(int(v) for v in knobs.get("n_list", defaults.n_list)),
        )
    except (TypeError, ValueError) as e:
        raise ConfigError(f"config error at solver: {e}") from e
    if solver.right_bc not in ("dirichlet", "neumann", "robin"):
        raise ConfigError("config error at solver.right_bc: expected "
                          "dirichlet, neumann, or robin")

    out_dir = raw.get("out_dir")
    if out_dir is not None and not isinstance(out_dir, str):
        raise ConfigError("config error at $.out_dir: expected a string")
    return RunConfig(spec, truncation, tuple(analyses), solver, out_dir, raw)


# ---------------------------------------------------------------------------
# deterministic serialization


def fmt(x: float) -> str:
    """Fixed 15-significant-digit, lowercase-scientific float format."""
    return f"{x:.15g}"


def _normalize(value):
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, float):
        if math.isfinite(value):
            return float(fmt(value))
        return "inf" if value > 0 else ("-inf" if value < 0 else "nan")
    if isinstance(value, enum.Enum):
        return value.value
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {f.name: _normalize(getattr(value, f.name))
                for f in dataclasses.fields(value)}
    if isinstance(value, dict):
        return {str(k): _normalize(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_normalize(v) for v in value]
    return str(value)


def atomic_write(path: str, text: str) -> None:
    d = os.path.dirname(path) or "."
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _csv(header: list[str], rows: list[list]) -> str:
    def cell(v):
        if isinstance(v, float):
            return fmt(v)
        if v is None:
            return ""
        return str(v)
    lines = [",".join(header)]
    lines.extend(",".join(cell(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("ANTITREE_WORKERS", "1")))
    except ValueError:
        return 1


def _pmap(fn, items):
    w = _workers()
    if w <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=w) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# the analyses


def run_classify(cfg: RunConfig, out_dir: str) -> int:
    report = criteria.classify(cfg.spec, cfg.truncation, cfg.solver.m_max)
    doc = {"schema_version": SCHEMA_VERSION,
           "config": _normalize(cfg.echo),
           "report": _normalize(report)}
    atomic_write(os.path.join(out_dir, "classify.json"),
                 json.dumps(doc, indent=2, sort_keys=True) + "\n")
    print(f"classify: wrote {os.path.join(out_dir, 'classify.json')}")
    return 0


def run_spectrum(cfg: RunConfig, out_dir: str) -> int:
    profile = build_profile(cfg.spec, cfg.truncation)
    spectrum = spectra.decomposed_spectrum(
        profile, cfg.solver.boundary_condition(), cfg.solver.lambda_max)
    rows = [[e.value, e.multiplicity, e.block, e.generation]
            for e in spectrum.entries]
    atomic_write(os.path.join(out_dir, "spectrum.csv"),
                 _csv(["lambda", "multiplicity", "block", "generation"], rows))
    print(f"spectrum: wrote {len(rows)} rows")
    return 0


def run_verify(cfg: RunConfig, out_dir: str) -> int:
    profile = build_profile(cfg.spec, cfg.truncation)
    report = graph_oracle.verify_decomposition(
        profile, cfg.solver.h, cfg.solver.oracle_count, cfg.solver.tol)
    rows = [[r.index, r.oracle, r.decomposed, r.block, r.generation,
             r.rel_err, r.allowed, "ok" if r.ok else "MISMATCH"]
            for r in report.rows]
    atomic_write(os.path.join(out_dir, "verify.csv"),
                 _csv(["index", "oracle", "decomposed", "block", "generation",
                       "rel_err", "allowed", "status"], rows))
    print(f"verify: {report.message}")
    return 0 if report.passed else 2


def run_weyl(cfg: RunConfig, out_dir: str) -> int:
    profile = build_profile(cfg.spec, cfg.truncation)
    lam_top = max(cfg.solver.weyl_lambdas)
    spectrum = spectra.decomposed_spectrum(
        profile, cfg.solver.boundary_condition(), lam_top)

    def row(lam):
        n = spectra.counting_function(spectrum, lam)
        ratio, target = spectra.weyl_ratio(spectrum, lam, cfg.spec)
        return [lam, n, ratio, target]

    rows = _pmap(row, sorted(cfg.solver.weyl_lambdas))
    atomic_write(os.path.join(out_dir, "weyl.csv"),
                 _csv(["lambda", "count", "ratio", "target"], rows))
    print(f"weyl: wrote {len(rows)} rows")
    return 0


def run_gap(cfg: RunConfig, out_dir: str) -> int:
    n_list = sorted(cfg.solver.n_list)
    lam0 = spectra.lambda0_estimate(cfg.spec, n_list)

    def sandwich(N):
        est = criteria.gap_constant(build_profile(cfg.spec, N), cfg.spec)
        return est.lambda0_lower, est.lambda0_upper

    bounds = _pmap(sandwich, n_list)
    rows = [[N, lam0[i], bounds[i][0], bounds[i][1]]
            for i, N in enumerate(n_list)]
    atomic_write(os.path.join(out_dir, "gap.csv"),
                 _csv(["N", "lambda0_upper", "sandwich_lo", "sandwich_hi"], rows))
    print(f"gap: wrote {len(rows)} rows")
    return 0


_RUNNERS = {"classify": run_classify, "spectrum": run_spectrum,
            "verify": run_verify, "weyl": run_weyl, "gap": run_gap}


def run(cfg: RunConfig, analysis: str, out_dir: str | None = None) -> int:
    target = out_dir or cfg.out_dir or "."
    return _RUNNERS[analysis](cfg, target)


# ---------------------------------------------------------------------------
# entry point


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def main(argv: list[str] | None = None) -> int:
    parser = _Parser(prog="antitree",
                     description="Spectral analysis of Kirchhoff Laplacians "
                                 "on radially symmetric antitrees")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ANALYSES:
        p = sub.add_parser(name, help=f"run the {name} analysis")
        p.add_argument("--config", required=True, help="run configuration (JSON)")
        p.add_argument("--out", default=None, help="output directory")
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        cfg = load_config(args.config)
        return run(cfg, args.command, args.out)
    except (ConfigError, InvalidSpecError) as e:
        print(f"antitree: {e}", file=sys.stderr)
        return 1
    except spectra.InternalConsistencyError as e:
        print(f"antitree: internal consistency error: {e}", file=sys.stderr)
        return 3
    except ValueError as e:
        print(f"antitree: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
