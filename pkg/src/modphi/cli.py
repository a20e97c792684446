"""Command line entry point: ``modphi {experiment,constants,predict,bound}``.

Any subcommand accepts ``--config FILE``.  The file holds ``key=value``
lines using the long flag names without dashes (``param`` may repeat).
Flags given on the command line override the file.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys

from .bounds import best_norm_bound, classical_tv_bounds
from .experiment import (
    DISTANCES,
    LAMBDA_CONVENTIONS,
    ExperimentSpec,
    emit_constants_table,
    emit_plot_data,
    leading_prediction,
    log_scale_prediction,
    rows_to_csv,
    rows_to_json,
    run_experiment,
)
from .models import MODEL_NAMES, get_model, parse_params

__all__ = ["main", "build_parser", "parse_int_list", "read_config"]


def parse_int_list(text: str) -> list[int]:
    """Parse ``"10,100,1000"`` or ``"a:b:step"`` (``b`` included) or a mix of both."""
    out: list[int] = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            pieces = part.split(":")
            if len(pieces) not in (2, 3):
                raise ValueError(f"range {part!r} must be a:b or a:b:step")
            a, b = _to_int(pieces[0]), _to_int(pieces[1])
            step = _to_int(pieces[2]) if len(pieces) == 3 else 1
            if step <= 0:
                raise ValueError("range step must be positive")
            out.extend(range(a, b + 1, step))
        else:
            out.append(_to_int(part))
    if not out:
        raise ValueError("empty integer list")
    return out


def _to_int(text: str) -> int:
    value = float(text)
    if not value.is_integer():
        raise ValueError(f"{text!r} is not an integer")
    return int(value)


def read_config(path: str) -> list[str]:
    """Turn a ``key=value`` file into the equivalent command line tokens."""
    tokens: list[str] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key = key.strip().replace("_", "-")
            value = value.strip()
            if key == "bounds":
                if value.lower() in ("0", "false", "no", "off"):
                    tokens.append("--no-bounds")
                continue
            tokens += [f"--{key}", value]
    return tokens


def _add_model_args(p: argparse.ArgumentParser, need_n: bool = True):
    p.add_argument("--model", choices=MODEL_NAMES, required=True)
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                   help="model parameter, repeatable")
    p.add_argument("--n", required=need_n, help="comma list or a:b:step")
    p.add_argument("--order", default="0", help="scheme orders, comma list or a:b")
    p.add_argument("--lambda-convention", choices=LAMBDA_CONVENTIONS, default="theorem")


def _add_output_args(p: argparse.ArgumentParser):
    p.add_argument("--out", help="output file (default: standard output)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modphi",
        description="Exact laws, approximation schemes and their distances.",
    )
    parser.add_argument("--config", help="key=value file with default flag values")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("experiment", help="measure distances on an (n, order) grid")
    _add_model_args(p)
    p.add_argument("--dist", help=f"comma list from {','.join(DISTANCES)}")
    p.add_argument("--tol", type=float, default=1e-14, help="tail mass left out of Poisson laws")
    p.add_argument("--plot-dir", help="also write gnuplot .dat files here")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--no-bounds", action="store_true", help="skip the norm bound column")
    _add_output_args(p)

    p = sub.add_parser("constants", help="table of r, z_{r+1}, M_r, V_r")
    p.add_argument("--max-order", type=int, default=10)
    p.add_argument("--out")

    p = sub.add_parser("predict", help="leading-order distance predictions only")
    _add_model_args(p)
    p.add_argument("--dist", help=f"comma list from {','.join(DISTANCES)}")
    _add_output_args(p)

    p = sub.add_parser("bound", help="rigorous total variation bounds")
    _add_model_args(p)
    _add_output_args(p)
    return parser


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _spec(args) -> ExperimentSpec:
    return ExperimentSpec(
        model=args.model,
        params=parse_params(args.param),
        n_values=tuple(parse_int_list(args.n)),
        orders=tuple(parse_int_list(args.order)),
        distances=tuple(d.strip() for d in args.dist.split(",")) if getattr(args, "dist", None) else None,
        lambda_convention=args.lambda_convention,
        tol=getattr(args, "tol", 1e-14),
        bounds=not getattr(args, "no_bounds", False),
        workers=getattr(args, "workers", 1),
    )


def _table(header, rows, fmt) -> str:
    def cell(v):
        if v is None:
            return "n/a"
        return repr(float(v)) if isinstance(v, float) else str(v)

    if fmt == "json":
        import json

        return json.dumps([dict(zip(header, r)) for r in rows], indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([cell(v) for v in r])
    return buf.getvalue()


def _cmd_experiment(args):
    rows = run_experiment(_spec(args))
    _emit(rows_to_csv(rows) if args.format == "csv" else rows_to_json(rows), args.out)
    if args.plot_dir:
        for path in emit_plot_data(rows, args.plot_dir):
            print(f"wrote {path}", file=sys.stderr)


def _cmd_predict(args):
    spec = _spec(args)
    model = spec.validate()
    out = []
    for n in sorted(set(spec.n_values)):
        lam = model.lam(n, spec.lambda_convention)
        for order in sorted(set(spec.orders)):
            leading = model.leading_term(n, order)
            for kind in spec.resolved_distances(model.dimension):
                r_eff, pred = leading_prediction(model, kind, lam, leading)
                alt = log_scale_prediction(model, kind, n)
                out.append((model.name, n, lam, order, r_eff, kind, pred, alt))
    header = ("model", "n", "lambda", "order", "r_eff", "kind", "predicted", "predicted_alt")
    _emit(_table(header, out, args.format), args.out)


def _cmd_bound(args):
    spec = _spec(args)
    model = spec.validate()
    out = []
    for n in sorted(set(spec.n_values)):
        lam = model.lam(n, spec.lambda_convention)
        probs = model.probabilities(n) if hasattr(model, "probabilities") else None
        classical = classical_tv_bounds(probs) if probs is not None else None
        for order in sorted(set(spec.orders)):
            residue = model.residue(n, order)
            psi = model.psi(n, lam)
            r_bound = model.psi_vanishing_order(n, lam, residue)
            best = None
            if psi is not None and r_bound is not None and r_bound >= 0:
                best = best_norm_bound(psi, residue, model.exponent, lam, r_bound)
            # the classical bounds compare with the plain Poisson law only
            cl = classical if (classical is not None and order <= 1 and r_bound == 1) else None
            out.append((
                model.name, n, lam, order, r_bound,
                None if best is None else best[1].eps,
                None if best is None else best[0],
                None if cl is None else cl.chen_steele,
                None if cl is None else cl.le_cam,
                None if cl is None else cl.prohorov,
            ))
    header = ("model", "n", "lambda", "order", "r_bound", "eps", "norm_bound",
              "chen_steele", "le_cam", "prohorov")
    _emit(_table(header, out, args.format), args.out)


def _cmd_constants(args):
    _emit(emit_constants_table(args.max_order), args.out)


_COMMANDS = {
    "experiment": _cmd_experiment,
    "constants": _cmd_constants,
    "predict": _cmd_predict,
    "bound": _cmd_bound,
}


def _expand_config(argv: list[str]) -> list[str]:
    """Insert the config file tokens right after the subcommand name."""
    argv = list(argv)
    config = None
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            config = argv[i + 1]
            del argv[i : i + 2]
            break
        if tok.startswith("--config="):
            config = tok.split("=", 1)[1]
            del argv[i]
            break
    if config is None:
        return argv
    tokens = read_config(config)
    for i, tok in enumerate(argv):
        if tok in _COMMANDS:
            return argv[: i + 1] + tokens + argv[i + 1 :]
    # the file may also name the command
    if "--command" in tokens:
        j = tokens.index("--command")
        cmd = tokens[j + 1]
        rest = tokens[:j] + tokens[j + 2 :]
        return [cmd] + rest + argv
    raise ValueError("no subcommand given")


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        argv = _expand_config(argv)
    except (OSError, ValueError) as exc:
        parser.error(str(exc))
    args = parser.parse_args(argv)
    try:
        _COMMANDS[args.command](args)
    except ValueError as exc:
        print(f"modphi: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
