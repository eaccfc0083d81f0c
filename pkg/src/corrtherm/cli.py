"""Command-line front end: entropy tables, feasibility checks, minimal-work
searches and figure data emission.

Exit codes are uniform across commands: 0 feasible / success, 2 infeasible,
1 usage, parse or internal error.  Output is deterministic for a fixed
configuration and seed; numbers are printed with 12 significant digits.
"""

from __future__ import annotations

import json
import math
import sys
from dataclasses import replace
from fractions import Fraction
from pathlib import Path
from typing import Optional

import click
import numpy as np

from .catalysis import main_theorem_check
from .config import DEFAULT_GRID, DEFAULT_TOL, Tolerances
from .dist import BipartiteDist, Dist
from .entropy import (
    BURG,
    Alpha,
    ThermalContext,
    free_energy_alpha,
    renyi_entropy,
)
from .errors import CorrthermError
from .majorization import trumping_conditions
from .protocols import SharpState, run_work_extraction
from .scenarios import (
    figure3_data,
    figure3_limit,
    qubit_example_states,
    qubit_min_work_correlated,
    qubit_scenario,
)
from .thermo import WithJoint, min_work_formation, thermal_lorenz, thermomajorizes

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INFEASIBLE = 2


def _fmt(x: float) -> str:
    """12 significant digits, stable across runs."""
    return format(float(x), ".12g")


def _load_json(value: str):
    value = value.strip()
    if value.startswith("{") or value.startswith("["):
        return json.loads(value)
    return json.loads(Path(value).read_text())


def _parse_value(v, backend: str):
    if isinstance(v, str):
        f = Fraction(v)
        return f if backend == "rational" else float(f)
    if backend == "rational":
        return Fraction(v)
    return float(v)


def _parse_probs(obj, backend: str) -> Dist:
    if isinstance(obj, dict):
        obj = obj["probs"]
    return Dist([_parse_value(v, backend) for v in obj])


def _parse_ctx(obj, dim: Optional[int] = None) -> ThermalContext:
    if obj is None:
        if dim is None:
            raise click.ClickException("a thermal context is required")
        return ThermalContext.trivial(dim)
    if "weights" in obj:
        return ThermalContext.from_rational_weights(
            [Fraction(w) for w in obj["weights"]], float(obj.get("beta", 1.0))
        )
    return ThermalContext(
        [float(e) for e in obj["energies"]], float(obj.get("beta", 1.0))
    )


def _parse_alphas(spec: str) -> list[Alpha]:
    out: list[Alpha] = []
    for token in spec.split(","):
        token = token.strip().lower()
        if not token:
            continue
        if token == "burg":
            out.append(BURG)
        elif token in ("inf", "+inf"):
            out.append(math.inf)
        elif token == "-inf":
            out.append(-math.inf)
        else:
            out.append(float(token))
    return out


def _alpha_label(alpha: Alpha) -> str:
    if alpha is BURG:
        return "burg"
    if alpha == math.inf:
        return "inf"
    if alpha == -math.inf:
        return "-inf"
    return _fmt(alpha)


def _emit(text: str, out: Optional[str]):
    if out is None:
        click.echo(text, nl=False)
    else:
        Path(out).write_text(text)


def _rows_to_csv(header: list[str], rows: list[list[str]]) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(r) for r in rows)
    return "\n".join(lines) + "\n"


def _tol_override(tolerance: Optional[float]) -> Tolerances:
    if tolerance is None:
        return DEFAULT_TOL
    return replace(DEFAULT_TOL, boundary_margin=tolerance, work_bisect=tolerance)


@click.group()
@click.option("--seed", type=int, default=0, show_default=True, help="RNG seed.")
@click.pass_context
def cli(ctx, seed):
    """Single-shot thermodynamics toolbox for block-diagonal states."""
    np.random.seed(seed)
    ctx.obj = {"seed": seed}


@cli.command("entropy")
@click.option("--input", "input_", required=True, help='{"probs": [...]} or a path.')
@click.option("--ctx", "ctx_", default=None, help='{"energies": [...], "beta": x}.')
@click.option(
    "--alpha-grid",
    default="0,0.5,1,2,inf,burg",
    show_default=True,
    help="Comma-separated alpha values; inf, -inf and burg are accepted.",
)
@click.option(
    "--backend",
    type=click.Choice(["float", "rational"]),
    default="float",
    show_default=True,
)
@click.option(
    "--format",
    "format_",
    type=click.Choice(["csv", "json"]),
    default="csv",
    show_default=True,
)
@click.option("--out", default=None, help="Output path; stdout when omitted.")
def cmd_entropy(input_, ctx_, alpha_grid, backend, format_, out):
    """Renyi/Burg entropies and, with a context, alpha-free energies."""
    p = _parse_probs(_load_json(input_), backend)
    tctx = None
    if ctx_ is not None:
        tctx = _parse_ctx(_load_json(ctx_))
    records = []
    for alpha in _parse_alphas(alpha_grid):
        h = renyi_entropy(p, alpha)
        rec = {"alpha": _alpha_label(alpha), "entropy": _fmt(h)}
        if tctx is not None and alpha is not BURG:
            rec["free_energy"] = _fmt(free_energy_alpha(p, tctx, alpha))
        records.append(rec)
    if format_ == "json":
        _emit(json.dumps(records, indent=2, sort_keys=True) + "\n", out)
    else:
        header = ["alpha", "entropy"] + (["free_energy"] if tctx else [])
        rows = [[r.get(k, "") for k in header] for r in records]
        _emit(_rows_to_csv(header, rows), out)


@cli.command("check")
@click.argument("mode", type=click.Choice(["thermo", "trumping", "correlated"]))
@click.option(
    "--input",
    "input_",
    required=True,
    help='{"p": [...], "q": [...], "ctx": {"energies": [...], "beta": x}}.',
)
@click.option(
    "--backend",
    type=click.Choice(["float", "rational"]),
    default="float",
    show_default=True,
)
@click.option("--eps-corr", type=float, default=1e-3, show_default=True)
@click.option("--tolerance", type=float, default=None)
@click.option("--out", default=None, help="Output path; stdout when omitted.")
def cmd_check(mode, input_, backend, eps_corr, tolerance, out):
    """Feasibility of p -> q, with or without catalysts; exit 0/2."""
    data = _load_json(input_)
    p = _parse_probs(data["p"], backend)
    q = _parse_probs(data["q"], backend)
    tol = _tol_override(tolerance)
    verdict = {"mode": mode}
    if mode == "thermo":
        tctx = _parse_ctx(data.get("ctx"), dim=p.dim)
        ok = thermomajorizes(p, q, tctx, tol=tol)
        verdict["feasible"] = bool(ok)
    elif mode == "trumping":
        tv = trumping_conditions(p, q, tol=tol)
        verdict["feasible"] = bool(tv)
        verdict["answer"] = tv.feasible
        verdict["min_margin"] = _fmt(tv.min_margin)
        verdict["violated"] = [
            [_alpha_label(a), _fmt(m)] for a, m in tv.violated[:20]
        ]
        ok = bool(tv)
    else:
        cert = main_theorem_check(p, q, eps_corr, tol=tol)
        verdict["feasible"] = cert.feasible
        verdict["reason"] = cert.reason
        if cert.params is not None:
            verdict["delta"] = _fmt(float(cert.params.delta))
            verdict["n"] = cert.params.n
            verdict["min_balance"] = _fmt(cert.min_balance)
            verdict["mutual_information"] = _fmt(cert.mutual_information)
        ok = cert.feasible
    _emit(json.dumps(verdict, indent=2, sort_keys=True) + "\n", out)
    sys.exit(EXIT_OK if ok else EXIT_INFEASIBLE)


@cli.command("minwork")
@click.argument("mode", type=click.Choice(["nocatalyst", "withjoint", "extraction"]))
@click.option(
    "--input",
    "input_",
    default=None,
    help="Problem instance JSON; the built-in qubit scenario when omitted.",
)
@click.option(
    "--backend",
    type=click.Choice(["float", "rational"]),
    default="rational",
    show_default=True,
)
@click.option("--tolerance", type=float, default=None)
@click.option("--out", default=None, help="Output path; stdout when omitted.")
def cmd_minwork(mode, input_, backend, tolerance, out):
    """Minimal work-bit gap of a formation, or an extraction run report."""
    tol = _tol_override(tolerance)
    data = _load_json(input_) if input_ is not None else None
    result = {"mode": mode}
    if mode == "extraction":
        if data is None:
            raise click.ClickException("extraction requires --input")
        p = _parse_probs(data["p"], backend)
        q = _parse_probs(data["q"], backend)
        tctx = _parse_ctx(data.get("ctx"), dim=p.dim)
        sink = data["sink"]
        spec = SharpState(
            int(sink["m"]), int(sink["n"]), _parse_value(sink["eps"], backend)
        )
        report = run_work_extraction(
            p,
            q,
            tctx,
            delta_gap=float(data.get("delta_gap", 0.1)),
            eps=_parse_value(data.get("eps", "1/100"), backend),
            sink=spec,
            tol=tol,
        )
        result["work_gained"] = _fmt(report.achieved_work)
        result["certificate_only"] = report.certificate_only
        result["workbit_pure"] = report.workbit_pure
        result["detail"] = report.detail
    elif data is None and mode == "nocatalyst":
        s = qubit_scenario()
        gap = min_work_formation(s.gamma_a, s.rho_a_prime(), s.ctx_a, tol=tol)
        result["min_work"] = _fmt(gap)
        result["scenario"] = "qubit heating, uncorrelated"
    elif data is None and mode == "withjoint":
        gap = qubit_min_work_correlated(
            resolution=tol.work_bisect if tolerance is not None else 1e-9
        )
        result["min_work"] = _fmt(gap)
        result["scenario"] = "qubit heating, machine correlations allowed"
    else:
        p = _parse_probs(data["p"], backend)
        q = _parse_probs(data["q"], backend)
        tctx = _parse_ctx(data.get("ctx"), dim=p.dim)
        if mode == "withjoint":
            joint = BipartiteDist(
                [[_parse_value(v, backend) for v in row] for row in data["q_am"]]
            )
            sigma = _parse_probs(data["sigma_m"], backend)
            gap = min_work_formation(p, q, tctx, WithJoint(joint, sigma), tol=tol)
        else:
            gap = min_work_formation(p, q, tctx, tol=tol)
        result["min_work"] = _fmt(gap)
    _emit(json.dumps(result, indent=2, sort_keys=True) + "\n", out)


def _figure3_files(base: Path):
    curve = figure3_data()
    rows = [
        [_fmt(a), _fmt(v), _fmt(figure3_limit(a))] for a, v in curve.to_rows()
    ]
    csv_path = base.with_suffix(".csv")
    csv_path.write_text(_rows_to_csv(["alpha", "balance", "limit"], rows))

    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    alphas = [a for a, _ in curve.to_rows()]
    vals = [v for _, v in curve.to_rows()]
    lims = [figure3_limit(a) for a in alphas]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(alphas, vals, lw=1.5, label="entropy balance")
    ax.plot(alphas, lims, lw=1.0, ls="--", label="large-n limit")
    ax.axhline(0.0, color="k", lw=0.5)
    ax.set_xscale("symlog", linthresh=1.0)
    ax.set_xlabel("alpha")
    ax.set_ylabel("entropy balance")
    ax.legend()
    fig.tight_layout()
    fig.savefig(base.with_suffix(".png"), dpi=150)
    plt.close(fig)
    return [csv_path, base.with_suffix(".png")]


def _figure5_files(base: Path):
    p_amw, q_amw, ctx = qubit_example_states(0.26)
    curves = [
        ("initial", thermal_lorenz(p_amw, ctx)),
        ("target", thermal_lorenz(q_amw, ctx)),
    ]
    rows = []
    for name, curve in curves:
        rows.extend([name, _fmt(x), _fmt(y)] for x, y in curve.to_rows())
    csv_path = base.with_suffix(".csv")
    csv_path.write_text(_rows_to_csv(["curve", "x", "y"], rows))

    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 5))
    for name, curve in curves:
        ax.plot(curve.xs, curve.ys, marker="o", ms=3, lw=1.2, label=name)
    ax.set_xlabel("cumulative Gibbs weight")
    ax.set_ylabel("cumulative probability")
    ax.legend()
    fig.tight_layout()
    fig.savefig(base.with_suffix(".png"), dpi=150)
    plt.close(fig)
    return [csv_path, base.with_suffix(".png")]


@cli.command("figure")
@click.argument("name")
@click.option(
    "--out",
    default=".",
    show_default=True,
    help="Output directory; files are named after the figure.",
)
def cmd_figure(name, out):
    """Emit figure data as CSV plus a rendered PNG next to it."""
    outdir = Path(out)
    outdir.mkdir(parents=True, exist_ok=True)
    if name == "fig3":
        files = _figure3_files(outdir / "fig3")
    elif name == "fig5":
        files = _figure5_files(outdir / "fig5")
    else:
        raise click.ClickException(f"unknown figure {name!r}; expected fig3 or fig5")
    for f in files:
        click.echo(str(f))


def main(argv=None):
    try:
        cli.main(args=argv, standalone_mode=False)
    except SystemExit:
        raise
    except click.ClickException as e:
        click.echo(f"error: {e.format_message()}", err=True)
        sys.exit(EXIT_ERROR)
    except click.Abort:
        sys.exit(EXIT_ERROR)
    except (CorrthermError, ValueError, KeyError, OSError, json.JSONDecodeError) as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(EXIT_ERROR)
    sys.exit(EXIT_OK)


if __name__ == "__main__":
    main()
