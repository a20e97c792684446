"""Batch comparison of exact laws against approximation schemes.

For every ``(n, order)`` cell the runner builds the exact law and the scheme
measure, measures the requested distances, and sets them beside the Hermite
predictions and, where available, the rigorous norm bound.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .bounds import best_norm_bound
from .hermite_asymptotics import (
    hermite_table,
    predict_kolmogorov,
    predict_local,
    predict_local_md,
    predict_tv,
    predict_tv_md,
)
from .lattice_measure import (
    distance_kolmogorov,
    distance_local,
    distance_tv,
    error_bar,
    scheme_measure,
)
from .models import MODEL_NAMES, get_model

__all__ = [
    "CSV_SCHEMA",
    "DISTANCES",
    "ExperimentSpec",
    "ExperimentRow",
    "run_experiment",
    "rows_to_csv",
    "rows_to_json",
    "write_rows",
    "emit_plot_data",
    "emit_constants_table",
    "LOG_SCALE_CANDIDATES",
    "LAMBDA_CONVENTIONS",
    "leading_prediction",
    "log_scale_prediction",
]

CSV_SCHEMA = "# modphi experiment table, schema v1"
CONSTANTS_SCHEMA = "# modphi hermite constants, schema v1"
DISTANCES = ("local", "kolmogorov", "tv")
LAMBDA_CONVENTIONS = ("theorem", "exact-sum")
NA = "n/a"

_DISTANCE_FN = {"local": distance_local, "kolmogorov": distance_kolmogorov, "tv": distance_tv}
_PREDICT_1D = {"local": predict_local, "kolmogorov": predict_kolmogorov, "tv": predict_tv}

#: Alternative constants for the coloured permutations, written against
#: ``log n`` instead of ``lambda``: ``d_L ~ c / (log n)^2`` and ``d_TV ~ c / log n``.
#: The TV integral is rounded to 12.162.
LOG_SCALE_CANDIDATES = {
    "local": (math.pi / 3.0, 2),
    "tv": (math.pi / 24.0 * 12.162, 1),
}


@dataclass(frozen=True)
class ExperimentSpec:
    model: str
    params: dict = field(default_factory=dict)
    n_values: tuple[int, ...] = ()
    orders: tuple[int, ...] = (0,)
    distances: tuple[str, ...] | None = None
    lambda_convention: str = "theorem"
    tol: float = 1e-14
    bounds: bool = True
    workers: int = 1

    def resolved_distances(self, dimension: int) -> tuple[str, ...]:
        if self.distances is None:
            return DISTANCES if dimension == 1 else ("local", "tv")
        return tuple(self.distances)

    def validate(self):
        """Build the model and check every field; returns the model."""
        if self.model not in MODEL_NAMES:
            raise ValueError(f"unknown model {self.model!r}; choose from {', '.join(MODEL_NAMES)}")
        model = get_model(self.model, **self.params)
        if not self.n_values:
            raise ValueError("at least one n is needed")
        for n in self.n_values:
            model.check_n(n)
        if not self.orders or any(o < 0 for o in self.orders):
            raise ValueError("orders must be non-negative")
        dists = self.resolved_distances(model.dimension)
        for d in dists:
            if d not in DISTANCES:
                raise ValueError(f"unknown distance {d!r}; choose from {', '.join(DISTANCES)}")
        if model.dimension != 1 and "kolmogorov" in dists:
            raise ValueError("the Kolmogorov distance needs a one-dimensional model")
        if self.lambda_convention not in LAMBDA_CONVENTIONS:
            raise ValueError(f"lambda convention must be one of {LAMBDA_CONVENTIONS}")
        if not 0 < self.tol < 1e-3:
            raise ValueError("tol must lie in (0, 1e-3)")
        return model


@dataclass(frozen=True)
class ExperimentRow:
    model: str
    n: int
    lam: float
    order: int
    r_eff: int | None
    kind: str
    measured: float
    error_bar: float
    predicted: float | None
    ratio: float | None
    bound: float | None
    predicted_alt: float | None = None

    @property
    def bound_respected(self) -> bool | None:
        if self.bound is None:
            return None
        return self.measured <= self.bound + self.error_bar


COLUMNS = (
    "model",
    "n",
    "lambda",
    "order",
    "r_eff",
    "kind",
    "measured",
    "error_bar",
    "predicted",
    "ratio",
    "bound",
    "predicted_alt",
)


def leading_prediction(model, kind, lam, leading):
    if leading is None:
        return None, None
    r, beta = leading
    if model.dimension == 1:
        return r, _PREDICT_1D[kind](beta, model.exponent.sigma2, lam, r)
    sigma = tuple(math.sqrt(s) for s in model.exponent.sigma2)
    fn = predict_local_md if kind == "local" else predict_tv_md
    return r, fn(beta, sigma, lam, r)


def log_scale_prediction(model, kind, n):
    if model.name != "coloured-perm" or kind not in LOG_SCALE_CANDIDATES or n < 2:
        return None
    const, power = LOG_SCALE_CANDIDATES[kind]
    return const / math.log(n) ** power


def _cell(spec: ExperimentSpec, model, n: int, order: int) -> list[ExperimentRow]:
    law = model.exact_law(n)
    lam = model.lam(n, spec.lambda_convention)
    residue = model.residue(n, order)
    scheme = scheme_measure(model.exponent, lam, residue, spec.tol)
    bar = error_bar(law, scheme)
    leading = model.leading_term(n, order)
    rows = []
    for kind in spec.resolved_distances(model.dimension):
        measured = _DISTANCE_FN[kind](law, scheme)
        r_eff, predicted = leading_prediction(model, kind, lam, leading)
        ratio = measured / predicted if predicted else None
        bound = None
        if spec.bounds and kind == "tv" and model.dimension == 1:
            psi = model.psi(n, lam)
            r_bound = model.psi_vanishing_order(n, lam, residue)
            if psi is not None and r_bound is not None and r_bound >= 0:
                best = best_norm_bound(psi, residue, model.exponent, lam, r_bound)
                bound = None if best is None else best[0]
        rows.append(
            ExperimentRow(
                model.name, n, lam, order, r_eff, kind, measured, bar, predicted, ratio, bound,
                log_scale_prediction(model, kind, n),
            )
        )
    return rows


def run_experiment(spec: ExperimentSpec) -> list[ExperimentRow]:
    """Evaluate every ``(n, order)`` cell; rows come back sorted by ``(n, order, kind)``."""
    model = spec.validate()
    cells = [(n, o) for n in sorted(set(spec.n_values)) for o in sorted(set(spec.orders))]
    if spec.workers > 1:
        with ThreadPoolExecutor(spec.workers) as pool:
            results = list(pool.map(lambda c: _cell(spec, model, *c), cells))
    else:
        results = [_cell(spec, model, *c) for c in cells]
    rows = [row for cell in results for row in cell]
    rank = {k: i for i, k in enumerate(DISTANCES)}
    return sorted(rows, key=lambda row: (row.n, row.order, rank[row.kind]))


# ----------------------------------------------------------------------
# output
# ----------------------------------------------------------------------


def _fmt(value) -> str:
    if value is None:
        return NA
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def _row_values(row: ExperimentRow) -> list:
    return [
        row.model, row.n, row.lam, row.order, row.r_eff, row.kind, row.measured,
        row.error_bar, row.predicted, row.ratio, row.bound, row.predicted_alt,
    ]


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    buf.write(CSV_SCHEMA + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in rows:
        writer.writerow([_fmt(v) for v in _row_values(row)])
    return buf.getvalue()


def rows_to_json(rows) -> str:
    payload = {
        "schema": CSV_SCHEMA.lstrip("# "),
        "columns": list(COLUMNS),
        "rows": [
            dict(zip(COLUMNS, (float(v) if isinstance(v, float) else v for v in _row_values(row))))
            for row in rows
        ],
    }
    return json.dumps(payload, indent=2, sort_keys=False) + "\n"


def write_rows(rows, path: str, fmt: str = "csv") -> str:
    text = rows_to_csv(rows) if fmt == "csv" else rows_to_json(rows)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return text


def emit_plot_data(rows, directory: str) -> list[str]:
    """Write gnuplot data files, one per ``(model, kind)``; returns their paths.

    Columns are ``n lambda measured predicted``.  Each scheme order is a
    separate block (blank-line separated, selectable with ``index``).  For
    the coloured permutations an extra ``*_ratio.dat`` file sets the scaled
    distance beside both candidate constants.
    """
    rows = list(rows)
    if not rows:
        raise ValueError("no rows to plot")
    os.makedirs(directory, exist_ok=True)
    groups: dict[tuple[str, str], list[ExperimentRow]] = {}
    for row in rows:
        groups.setdefault((row.model, row.kind), []).append(row)
    paths = []
    for (model, kind), group in sorted(groups.items()):
        path = os.path.join(directory, f"{model}_{kind}.dat")
        lines = [f"# {model} {kind}", "# n lambda measured predicted"]
        orders = sorted({r.order for r in group})
        for i, order in enumerate(orders):
            if i:
                lines += ["", ""]
            lines.append(f"# order {order}")
            for r in sorted((r for r in group if r.order == order), key=lambda r: r.n):
                lines.append(" ".join(_fmt(v) for v in (r.n, r.lam, r.measured, r.predicted)))
        _write(path, lines)
        paths.append(path)
        if model == "coloured-perm" and kind in LOG_SCALE_CANDIDATES:
            paths.append(_ratio_file(directory, model, kind, group))
    return paths


def _ratio_file(directory, model, kind, group) -> str:
    const, power = LOG_SCALE_CANDIDATES[kind]
    path = os.path.join(directory, f"{model}_{kind}_ratio.dat")
    lines = [
        f"# {model} {kind}: measured * (log n)^{power} against two candidate constants",
        f"# log-scale candidate constant: {_fmt(const)}",
        "# columns: n measured_scaled theorem_candidate_scaled log_scale_candidate"
        " ratio_to_theorem ratio_to_log_scale",
    ]
    for r in sorted(group, key=lambda r: (r.order, r.n)):
        scale = math.log(r.n) ** power
        theorem = None if r.predicted is None else r.predicted * scale
        lines.append(
            " ".join(
                _fmt(v)
                for v in (
                    r.n,
                    r.measured * scale,
                    theorem,
                    const,
                    r.ratio,
                    None if r.predicted_alt is None else r.measured / r.predicted_alt,
                )
            )
        )
    _write(path, lines)
    return path


def _write(path, lines):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def emit_constants_table(max_order: int = 10) -> str:
    """CSV rows ``r, z_{r+1}, M_r, V_r`` for ``r = 0..max_order``."""
    table = hermite_table(max_order)
    buf = io.StringIO()
    buf.write(CONSTANTS_SCHEMA + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("r", "z_r_plus_1", "M_r", "V_r"))
    for r in range(max_order + 1):
        writer.writerow((r, repr(table.z[r + 1]), repr(table.M[r]), repr(table.V[r])))
    return buf.getvalue()
