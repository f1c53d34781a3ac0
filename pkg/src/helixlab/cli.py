"""Command-line surface: analyze, classify, verify, generate, plot.

Exit codes: 0 = completed (for verify: every selected check passed or was
hypothesis-flagged), 1 = a verification check failed, 2 = input error.
Reports are deterministic JSON (see report.py); curve files use the
"t,x,y,z" CSV contract. HELIXLAB_THREADS caps internal grid parallelism.
"""

import argparse
import os
import sys

import numpy as np

from . import __version__, analysis, backend
from .analysis import ASSUMPTION_NOTES, PairContext
from .config import RunConfig, write_curve_csv
from .errors import ConfigError, HelixlabError, UnknownSeries
from .frenet import CurvatureProfile, frenet_series, slant_invariant_series
from .generate import integrate_frenet
from .report import dumps, to_jsonable

VERIFY_CHECKS = ("thm2.1", "cor2.2", "thm2.2", "thm2.3", "cor2.1-2.4")

SERIES_NEEDING_FIELD = ("grad_norm", "cos_theta", "n", "g_w")
SERIES_NAMES = (
    "kappa",
    "tau",
    "kappa2_plus_tau2",
    "slant_invariant",
) + SERIES_NEEDING_FIELD


def _base_report(cfg, command):
    return {
        "tool": {
            "name": "helixlab",
            "version": __version__,
            "backend": backend.backend_name(),
        },
        "command": command,
        "config": {k: cfg.raw[k] for k in sorted(cfg.raw)},
        "assumptions": list(ASSUMPTION_NOTES) + [
            "constant-precession phase read as mu*s (linear phase)",
            "equation-system constant mu bound to measured g(grad f, N) "
            "unless verify.mu overrides it",
        ],
    }


def _emit(report, out_path):
    text = dumps(report)
    if out_path:
        with open(out_path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_config(args):
    if not args.config:
        raise ConfigError("--config", "a config file is required")
    try:
        with open(args.config) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError("--config", str(exc)) from None
    cfg = RunConfig.from_text(text)
    if args.grid is not None:
        if args.grid < 32:
            raise ConfigError("--grid", "grid count must be >= 32")
        cfg.grid_count = args.grid
    if args.tol is not None:
        cfg.constancy_tol = args.tol
    return cfg


def _series_payload(cfg, curve, grid, field_f):
    series = frenet_series(curve, cfg.metric, grid)
    profile = CurvatureProfile.from_series(series)
    payload = {
        "s": series.s,
        "T": series.T,
        "N": series.N,
        "B": series.B,
        "kappa": series.kappa,
        "tau": series.tau,
        "W": series.W,
        "W0": series.W0,
        "kappa2_plus_tau2": series.kappa2_plus_tau2,
        "slant_invariant": slant_invariant_series(profile),
    }
    if field_f is not None:
        ctx = PairContext(field_f, curve, cfg.metric, grid)
        payload["grad_norm"] = ctx.grad_norms
        payload["cos_theta"] = ctx.cos_theta_series
        payload["n"] = ctx.n_series
        payload["g_w"] = ctx.gw_series
    return payload


def cmd_analyze(args):
    cfg = _load_config(args)
    curve, grid, _, derived = cfg.build_curve()
    field_f = cfg.build_field() or derived
    report = _base_report(cfg, "analyze")
    report["curve"] = {
        "length": curve.length,
        "grid_count": int(len(grid)),
        "grid_start": float(grid[0]),
        "grid_end": float(grid[-1]),
        "max_speed_deviation": curve.max_speed_deviation,
    }
    report["series"] = _series_payload(cfg, curve, grid, field_f)
    _emit(report, args.out)
    return 0


def cmd_classify(args):
    cfg = _load_config(args)
    curve, grid, _, derived = cfg.build_curve()
    field_f = cfg.build_field() or derived
    if field_f is None:
        raise ConfigError("field.f", "classification requires a scalar field")
    result = analysis.classify_pair(
        field_f, curve, cfg.metric, grid,
        tol=cfg.default_constancy_tol(), affine_tol=cfg.affine_tol,
    )
    report = _base_report(cfg, "classify")
    report["classification"] = to_jsonable(result)
    _emit(report, args.out)
    return 0


def _run_verify_checks(cfg, which):
    curve, grid, prescribed, derived = cfg.build_curve()
    field_f = cfg.build_field() or derived
    if field_f is None:
        raise ConfigError("field.f", "verification requires a scalar field")
    tol = cfg.theorem_tol
    ctol = cfg.default_constancy_tol()
    checks = {}
    for name in which:
        if name == "thm2.1":
            checks[name] = analysis.verify_theorem_2_1(
                field_f, curve, cfg.metric, grid, tol=tol, constancy_tol=ctol,
                affine_tol=cfg.affine_tol,
            )
        elif name == "cor2.2":
            ctx = PairContext(field_f, curve, cfg.metric, grid)
            if prescribed is not None:
                kappa, tau = prescribed.eval_batch(grid)
                profile = CurvatureProfile(grid, kappa, tau,
                                           provenance="prescribed")
            else:
                profile = ctx.profile()
            n_val = float(np.mean(ctx.n_series))
            mu_arg = (
                cfg.mu_override
                if cfg.mu_override is not None
                else float(np.mean(ctx.cos_theta_series))
            )
            result = analysis.verify_corollary_2_2(profile, n_val, mu_arg, tol=tol)
            # the corollary presumes an affine field and a slant helix; flag
            # rather than fail when those hypotheses are absent
            affine = analysis._affine(ctx, cfg.affine_tol)
            slant = analysis._slant(ctx, ctol)
            hypo = affine.is_affine and slant.is_slant_helix
            checks[name] = analysis.GatedCheck(
                hypotheses_met=hypo,
                affine=affine,
                slant_helix=slant.is_slant_helix,
                result=result,
                applicable=hypo,
                passed=result.passed if hypo else None,
            )
        elif name == "thm2.2":
            checks[name] = analysis.verify_theorem_2_2(
                field_f, curve, cfg.metric, grid, tol=tol, constancy_tol=ctol,
                affine_tol=cfg.affine_tol,
            )
        elif name == "thm2.3":
            checks[name] = analysis.verify_theorem_2_3(
                field_f, curve, cfg.metric, grid, tol=tol, constancy_tol=ctol,
                affine_tol=cfg.affine_tol,
            )
        elif name == "cor2.1-2.4":
            checks[name] = analysis.verify_corollaries_2_3_2_4(
                field_f, curve, cfg.metric, grid, constancy_tol=ctol,
            )
        else:
            raise ConfigError(
                "--which",
                f"unknown check {name!r}; choose from {', '.join(VERIFY_CHECKS)} "
                "or all",
            )
    return checks


def cmd_verify(args):
    cfg = _load_config(args)
    raw = args.which or "all"
    names = [w.strip() for w in raw.split(",") if w.strip()]
    if "all" in names:
        names = list(VERIFY_CHECKS)
    checks = _run_verify_checks(cfg, names)
    failed = []
    flagged = []
    for name, check in checks.items():
        passed = getattr(check, "passed", None)
        if passed is False:
            failed.append(name)
        elif passed is None:
            flagged.append(name)
    report = _base_report(cfg, "verify")
    report["checks"] = {name: to_jsonable(check) for name, check in checks.items()}
    report["summary"] = {
        "selected": names,
        "failed": failed,
        "hypothesis_flagged": flagged,
        "all_passed_or_flagged": not failed,
    }
    _emit(report, args.out)
    return 0 if not failed else 1


def cmd_generate(args):
    cfg = _load_config(args)
    if not cfg.curve_source.startswith("generator:"):
        raise ConfigError("curve.generator",
                          "generate requires a generator curve source")
    if not args.out:
        raise ConfigError("--out", "generate requires an output CSV path")
    spec = cfg._curve_spec
    if cfg.curve_source == "generator:precession":
        from .generate import constant_precession_profile

        profile = constant_precession_profile(
            spec["w"], spec["mu"], length=spec["length"], step=spec["step"]
        )
    else:
        from .generate import ProfileSpec

        profile = ProfileSpec(
            spec["kappa"], spec["tau"], spec["length"], step=spec["step"],
            constants=cfg.constants,
        )
    unit = integrate_frenet(profile)
    frames = unit.frames
    with open(args.out, "w", newline="") as fh:
        write_curve_csv(fh, frames.s, unit.eval_batch(frames.s))
    closure = float(np.linalg.norm(unit.eval(unit.length) - unit.eval(0.0)))
    prescribed_profile = CurvatureProfile(
        frames.s, frames.kappa, frames.tau, provenance="prescribed"
    )
    fit = analysis.check_constant_precession(prescribed_profile, tol=1e-6)
    cert = _base_report(cfg, "generate")
    cert["certificate"] = {
        "samples": int(len(frames.s)),
        "length": unit.length,
        "closure_error": closure,
        "max_frame_drift": float(np.max(unit.frame_drift)),
        "max_speed_deviation": unit.max_speed_deviation,
        "profile_fit": to_jsonable(fit),
    }
    cert_path = os.path.splitext(args.out)[0] + ".cert.json"
    with open(cert_path, "w", newline="") as fh:
        fh.write(dumps(cert))
    return 0


def cmd_plot(args):
    cfg = _load_config(args)
    if not args.series:
        raise ConfigError("--series", "plot requires a series name")
    name = args.series
    if name not in SERIES_NAMES:
        raise UnknownSeries(name, SERIES_NAMES)
    curve, grid, _, derived = cfg.build_curve()
    field_f = cfg.build_field() or derived
    if name in SERIES_NEEDING_FIELD and field_f is None:
        raise ConfigError("field.f", f"series {name!r} requires a scalar field")
    payload = _series_payload(cfg, curve, grid, field_f)
    values = payload[name]
    lines = ["s,value"]
    for s, v in zip(payload["s"], values):
        lines.append(f"{format(s, '.17g')},{format(v, '.17g')}")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="helixlab",
        description="Frenet apparatus and eikonal helix classification on "
        "chart-described 3D Riemannian manifolds",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn, extra in (
        ("analyze", cmd_analyze, ()),
        ("classify", cmd_classify, ()),
        ("verify", cmd_verify, ("which",)),
        ("generate", cmd_generate, ()),
        ("plot", cmd_plot, ("series",)),
    ):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="run configuration file")
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--grid", type=int, default=None,
                       help="override grid.count")
        p.add_argument("--tol", type=float, default=None,
                       help="override tol.constancy")
        if "which" in extra:
            p.add_argument(
                "--which", default="all",
                help=f"comma list from {', '.join(VERIFY_CHECKS)}, or all",
            )
        if "series" in extra:
            p.add_argument("--series", required=True,
                           help=f"one of {', '.join(SERIES_NAMES)}")
        p.set_defaults(fn=fn)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except HelixlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
