"""Command line front end: ``lsl <command> [options]``.

Commands
--------
verify ambient    Sasakian axioms, curvature identities, frame table.
verify model      Residual checks of a named model.
family integrate  One ODE trajectory (explicit parameters) or seeded random draws.
lift              Legendrian lift of a model's projection or of a CSV grid.
flow              Legendre curve shortening flow with a self-similarity trace.
report            Every gated check in one report.

Exit codes: 0 all gates pass, 1 a gate failed (report still written),
2 usage or parameter error.

Options may also come from ``--config FILE`` with ``key = value`` lines
(keys are option names without the leading dashes, ``-`` and ``_`` alike);
flags given on the command line win.  Without ``--output`` the report goes to
``$LSL_OUTPUT_DIR/<command>[-<target>].<format>`` when that variable is set, otherwise
to standard output.
"""
from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import checks, family, lift
from .errors import LSLError
from .report import FORMATS, VerificationReport, serialize_report

EXIT_OK, EXIT_GATE, EXIT_USAGE = 0, 1, 2
OUTPUT_ENV = "LSL_OUTPUT_DIR"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _positive(kind):
    def conv(text):
        value = kind(text)
        if not value > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return value
    return conv


def _resolution(text):
    value = int(text)
    if value < 8:
        raise argparse.ArgumentTypeError("resolution must be at least 8")
    return value


def _dt(text):
    if text == "auto":
        return None
    return _positive(float)(text)


def _pair(text):
    parts = [float(t) for t in text.replace(",", " ").split()]
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected two numbers, e.g. 0,0")
    return tuple(parts)


def _common(p: argparse.ArgumentParser, seed: bool = True):
    p.add_argument("--config", help="key = value file; command-line flags override it")
    p.add_argument("--output", help="report path (default: $LSL_OUTPUT_DIR or stdout)")
    p.add_argument("--format", choices=FORMATS, default="json")
    p.add_argument("--timing", action="store_true",
                   help="include wall-clock time (makes reports non-reproducible)")
    if seed:
        p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    root = _Parser(prog="lsl", description="Legendrian self-shrinker verification toolkit")
    sub = root.add_subparsers(dest="command", parser_class=_Parser, required=True)

    verify = sub.add_parser("verify", help="residual checks")
    vsub = verify.add_subparsers(dest="target", parser_class=_Parser, required=True)
    amb = vsub.add_parser("ambient", help="Sasakian structure checks")
    amb.add_argument("--n", type=int, choices=(1, 2), default=2)
    amb.add_argument("--samples", type=_positive(int), default=100)
    amb.add_argument("--curvature-samples", type=_positive(int), default=50)
    _common(amb)
    mod = vsub.add_parser("model", help="model residual checks")
    mod.add_argument("--name", choices=checks.MODEL_CHOICES, required=True)
    mod.add_argument("--a", type=float, default=-0.125)
    mod.add_argument("--check", choices=checks.CHECK_CHOICES, default="all")
    mod.add_argument("--resolution", type=_resolution, default=64)
    mod.add_argument("--gamma", type=float)
    mod.add_argument("--nu", type=float)
    mod.add_argument("--C", type=float)
    mod.add_argument("--variant")
    mod.add_argument("--B", type=_positive(float), default=1.0)
    mod.add_argument("--x0", type=_positive(float), default=0.5)
    mod.add_argument("--length", type=_positive(float), default=20.0)
    _common(mod)

    fam = sub.add_parser("family", help="ODE family")
    fsub = fam.add_subparsers(dest="target", parser_class=_Parser, required=True)
    fi = fsub.add_parser("integrate", help="integrate trajectories")
    fi.add_argument("--random", type=_positive(int),
                    help="number of seeded random configs (alternating sign cases)")
    for name in ("lambda1", "lambda2", "C", "alpha"):
        fi.add_argument(f"--{name}", type=float)
    fi.add_argument("--alpha1", type=_positive(float), default=1.0)
    fi.add_argument("--alpha2", type=_positive(float), default=1.0)
    fi.add_argument("--phi1", type=float, default=0.0)
    fi.add_argument("--phi2", type=float, default=0.0)
    fi.add_argument("--theta0", type=float, default=0.0)
    fi.add_argument("--s-range", type=_pair, default=(0.0, 5.0))
    fi.add_argument("--h0", type=_positive(float), default=1e-2)
    fi.add_argument("--tol", type=_positive(float), default=1e-13)
    fi.add_argument("--resolution", type=_resolution, default=24)
    fi.add_argument("--no-surface", action="store_true", help="skip surface residuals")
    fi.add_argument("--csv", help="write the trajectory (single config) to this path")
    _common(fi)

    lf = sub.add_parser("lift", help="Legendrian lift of a Lagrangian chart or grid")
    lf.add_argument("--input", required=True,
                    help="model name (cylinder, torus, psi, clifford) or CSV grid path")
    lf.add_argument("--basepoint", type=_pair, default=None)
    lf.add_argument("--resolution", type=_resolution, default=64)
    lf.add_argument("--a", type=float, default=-0.125)
    lf.add_argument("--csv", help="write the lifted heights to this path")
    _common(lf)

    fl = sub.add_parser("flow", help="Legendre curve shortening flow")
    fl.add_argument("--model", choices=("abresch-langer", "helix", "perturbed-circle"),
                    default="abresch-langer")
    fl.add_argument("--B", type=_positive(float), default=1.0)
    fl.add_argument("--steps", type=_positive(int), default=50)
    fl.add_argument("--dt", type=_dt, default=None, help="time step or 'auto'")
    fl.add_argument("--points", type=_resolution, default=300)
    fl.add_argument("--score-every", type=_positive(int), default=10)
    fl.add_argument("--csv", help="per-step point CSV")
    fl.add_argument("--trace", help="JSON self-similarity trace")
    _common(fl)

    rp = sub.add_parser("report", help="run every gated check")
    rp.add_argument("--resolution", type=_resolution, default=64)
    _common(rp)
    return root


# ---------------------------------------------------------------------------
# config files

def read_config(path: str) -> dict:
    """``key = value`` lines; ``#`` starts a comment; blank lines ignored."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def _subparser(parser: argparse.ArgumentParser, argv: Sequence[str]) -> argparse.ArgumentParser:
    """The parser that owns the options of ``argv``'s command."""
    p = parser
    for tok in argv:
        if tok.startswith("-"):
            break
        actions = [a for a in p._actions if isinstance(a, argparse._SubParsersAction)]
        if not actions or tok not in actions[0].choices:
            break
        p = actions[0].choices[tok]
    return p


def parse_args(argv: Sequence[str]) -> argparse.Namespace:
    parser = build_parser()
    config_path = None
    for k, tok in enumerate(argv):
        if tok == "--config" and k + 1 < len(argv):
            config_path = argv[k + 1]
        elif tok.startswith("--config="):
            config_path = tok.split("=", 1)[1]
    if config_path is None:
        return parser.parse_args(argv)
    try:
        values = read_config(config_path)
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}") from exc
    sp = _subparser(parser, argv)
    known = {a.dest: a for a in sp._actions if a.option_strings}
    given = {a.dest for a in sp._actions
             if any(tok.split("=", 1)[0] in a.option_strings for tok in argv)}
    extra = []
    for key, value in values.items():
        act = known.get(key)
        if act is None or key in ("config", "help"):
            raise UsageError(f"unknown config key {key!r}")
        if key in given:
            continue                      # the command line wins
        flag = act.option_strings[-1]
        if isinstance(act, argparse._StoreTrueAction):
            if value.lower() in ("1", "true", "yes", "on"):
                extra.append(flag)
        else:
            extra.append(f"{flag}={value}")
    return parser.parse_args(list(argv) + extra)


# ---------------------------------------------------------------------------
# commands

def _cmd_verify(args) -> tuple:
    if args.target == "ambient":
        return checks.verify_ambient(args.n, args.samples, args.seed, args.curvature_samples), {}
    if args.name == "abresch-langer":
        return checks.verify_abresch_langer(args.B, args.x0, args.length,
                                            max(args.resolution, 8) * 32 + 1, args.seed,
                                            args.check), {}
    params = {"gamma": args.gamma, "nu": args.nu, "C": args.C, "variant": args.variant}
    return checks.verify_surface_model(args.name, args.a, args.check, args.resolution,
                                       args.seed, **params), {}


def _cmd_family(args) -> tuple:
    if args.random:
        rep = VerificationReport("family integrate",
                                 {"random": args.random, "s_range": list(args.s_range),
                                  "resolution": args.resolution}, args.seed)
        length = args.s_range[1] - args.s_range[0]
        for k, cfg in enumerate(checks.family_configs(args.random, args.seed, length)):
            checks.family_rows(rep, family.integrate(cfg), f"family[{k}]-{cfg.case}",
                               args.resolution, not args.no_surface)
        return rep, {}
    missing = [n for n in ("lambda1", "lambda2", "C", "alpha") if getattr(args, n) is None]
    if missing:
        raise UsageError("family integrate needs --random or " + ", ".join(f"--{m}" for m in missing))
    cfg = family.FamilyConfig(args.lambda1, args.lambda2, args.C, args.alpha, args.alpha1,
                              args.alpha2, args.phi1, args.phi2, args.theta0,
                              tuple(args.s_range), None, args.h0, args.tol)
    config = {k: getattr(args, k) for k in ("lambda1", "lambda2", "C", "alpha", "alpha1",
                                            "alpha2", "phi1", "phi2", "theta0", "h0", "tol",
                                            "resolution")}
    config["s_range"] = list(args.s_range)
    rep = VerificationReport("family integrate", config, args.seed)
    traj = family.integrate(cfg)
    checks.family_rows(rep, traj, f"family-{cfg.case}", args.resolution, not args.no_surface)
    extra = {args.csv: traj.to_csv()} if args.csv else {}
    return rep, extra


def _read_grid(path: str) -> lift.LagrangianGrid:
    """CSV with header ``u,v,x1,y1[,x2,y2]`` listing a full grid in row-major order."""
    data = np.genfromtxt(path, delimiter=",", names=True)
    cols = data.dtype.names
    if cols[:2] != ("u", "v") or len(cols) not in (4, 6):
        raise UsageError("grid CSV needs columns u,v,x1,y1 or u,v,x1,y1,x2,y2")
    u, v = np.unique(data["u"]), np.unique(data["v"])
    if u.size * v.size != data.size:
        raise UsageError("grid CSV is not a full tensor grid")
    order = np.lexsort((data["v"], data["u"]))
    table = np.stack([data[c] for c in cols], axis=1)[order]
    shape = (u.size, v.size)
    uu = table[:, :2].reshape(shape + (2,))
    vals = table[:, 2:].reshape(shape + (len(cols) - 2,))
    return lift.LagrangianGrid(uu, vals, name=Path(path).stem)


def _cmd_lift(args) -> tuple:
    config = {"input": args.input, "resolution": args.resolution, "a": args.a,
              "basepoint": None if args.basepoint is None else list(args.basepoint)}
    rep = VerificationReport("lift", config, args.seed)
    if args.input in ("cylinder", "torus", "psi", "clifford"):
        chart = checks.build_model(args.input, args.a)
        if args.input == "clifford":
            chart = chart[0]
        f = lift.project(chart)
        res = lift.lift_chart(f, basepoint=args.basepoint,
                              shape=(args.resolution, args.resolution))
        for d, periodic in enumerate(f.periodic):
            if periodic:
                h = lift.loop_holonomy(f, direction=d)
                rep.add(f"holonomy_{d}", h, comparison="reported")
                k = np.round(h / (2 * np.pi))
                rep.add(f"holonomy_{d}_quantization", abs(h - 2 * np.pi * k),
                        checks.HOLONOMY_GATE)
        rep.add("lagrangian_residual", res.lagrangian_residual, lift.LAGRANGIAN_TOL)
    else:
        grid = _read_grid(args.input)
        res = lift.lift_chart(grid, basepoint=args.basepoint)
        rep.add("lagrangian_residual", res.lagrangian_residual, lift.GRID_LAGRANGIAN_TOL)
    rep.add("closure_residual", res.closure_residual, comparison="reported")
    extra = {args.csv: res.to_csv()} if args.csv else {}
    return rep, extra


def _cmd_flow(args) -> tuple:
    rep, run = checks.verify_flow(args.model, args.B, args.steps, args.dt, args.points,
                                  args.score_every, args.seed)
    extra = {}
    if args.csv:
        extra[args.csv] = run.to_csv()
    if args.trace:
        extra[args.trace] = run.to_json() + "\n"
    return rep, extra


def _cmd_report(args) -> tuple:
    return checks.full_report(args.seed, args.resolution), {}


COMMANDS = {"verify": _cmd_verify, "family": _cmd_family, "lift": _cmd_lift,
            "flow": _cmd_flow, "report": _cmd_report}


def _output_path(args) -> Optional[Path]:
    if args.output:
        return Path(args.output)
    root = os.environ.get(OUTPUT_ENV)
    if root:
        slug = "-".join(x for x in (args.command, getattr(args, "target", None)) if x)
        return Path(root) / f"{slug}.{args.format}"
    return None


def _write(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(data)


def run(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    start = time.perf_counter()
    try:
        args = parse_args(argv)
        report, extra = COMMANDS[args.command](args)
    except SystemExit as exc:            # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    except (UsageError, LSLError, ValueError) as exc:
        print(f"lsl: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.timing:
        report.wall_time = time.perf_counter() - start
    data = serialize_report(report, args.format)
    path = _output_path(args)
    if path is None:
        sys.stdout.write(data.decode())
    else:
        _write(path, data)
        print(f"lsl: wrote {path} ({'pass' if report.passed else 'FAIL'})")
    for extra_path, text in extra.items():
        _write(Path(extra_path), text.encode())
    for c in report.failures():
        print(f"lsl: gate failed: {c.name} = {c.value:.3e} (gate {c.gate:.1e})", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_GATE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
