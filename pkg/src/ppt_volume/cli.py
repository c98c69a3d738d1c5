"""Command-line front end: ``ppt-volume <command> [options]``.

Results go to ``--output`` (default stdout) as CSV with a header row, or as a
JSON list with ``--format json``. A JSON run manifest is printed to stderr.
Exit codes: 0 success, 2 usage error, 3 runtime error.
"""

from __future__ import annotations

import csv
import io
import json
import math
import platform
import sys
import time
from importlib import metadata

import click
import numpy as np

from . import bounds, experiments, quantum
from .randgen import SeededStream, parse_seed

EXIT_USAGE = 2
EXIT_RUNTIME = 3
DEFAULT_Q = (1.0, 2.0, 3.0, 10.0)
DEFAULT_SCAN = ("2x2", "2x3", "2x4", "3x3", "2x6", "3x4", "4x4")
BOUNDS_MC_SAMPLES = 10_000_000
BOUNDS_MC_SEED = 0


class RuntimeFailure(click.ClickException):
    exit_code = EXIT_RUNTIME


def parse_dims(text: str) -> tuple[int, int]:
    try:
        a, b = text.lower().split("x")
        dims = int(a), int(b)
    except ValueError:
        raise click.BadParameter(f"expected N1xN2, got {text!r}") from None
    if min(dims) < 2 or dims[0] * dims[1] > experiments.MAX_DIM:
        raise click.BadParameter(f"{text}: need factors >= 2 and N1*N2 <= {experiments.MAX_DIM}")
    return dims


def _parse_count(text) -> int:
    try:
        value = float(text)
    except (TypeError, ValueError):
        raise click.BadParameter(f"not a number: {text!r}") from None
    if value != int(value) or value < 1:
        raise click.BadParameter(f"expected a positive integer, got {text!r}")
    return int(value)


class _Dims(click.ParamType):
    name = "N1xN2"

    def convert(self, value, param, ctx):
        if isinstance(value, tuple):
            return value
        try:
            return parse_dims(value)
        except click.BadParameter as exc:
            self.fail(exc.message, param, ctx)


class _Count(click.ParamType):
    name = "INT"

    def convert(self, value, param, ctx):
        if isinstance(value, int):
            return value
        try:
            return _parse_count(value)
        except click.BadParameter as exc:
            self.fail(exc.message, param, ctx)


class _Seed(click.ParamType):
    name = "SEED"

    def convert(self, value, param, ctx):
        try:
            return parse_seed(value)
        except ValueError as exc:
            self.fail(f"invalid seed {value!r}: {exc}", param, ctx)


DIMS = _Dims()
COUNT = _Count()
SEED = _Seed()


def fmt(value) -> str:
    """Cell formatting: 17 significant digits for reals, plain text otherwise."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        if math.isnan(value):
            return "nan"
        return format(float(value), ".17g")
    if isinstance(value, tuple):
        return "x".join(str(v) for v in value)
    return "" if value is None else str(value)


def render(rows: list[dict], form: str) -> str:
    if form == "json":
        clean = [{k: (fmt(v) if isinstance(v, tuple) else _jsonable(v)) for k, v in r.items()} for r in rows]
        return json.dumps(clean, indent=1) + "\n"
    buf = io.StringIO()
    columns: list[str] = []
    for r in rows:
        columns.extend(k for k in r if k not in columns)
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([fmt(r.get(c)) for c in columns])
    return buf.getvalue()


def _jsonable(v):
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, (np.floating, float)):
        return None if math.isnan(v) else float(v)
    return v


def _versions() -> dict:
    try:
        pkg = metadata.version("artifact")
    except metadata.PackageNotFoundError:
        pkg = "unknown"
    return {"ppt_volume": pkg, "numpy": np.__version__, "python": platform.python_version()}


def _emit(ctx, command: str, rows: list[dict], config: dict):
    obj = ctx.obj
    text = render(rows, obj["format"])
    out = obj["output"]
    if out is None or out == "-":
        click.echo(text, nl=False)
    else:
        try:
            with open(out, "w", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise RuntimeFailure(f"cannot write {out}: {exc.strerror}") from exc
    manifest = {
        "command": command,
        **{k: (fmt(v) if isinstance(v, tuple) else v) for k, v in config.items()},
        "output": out or "-",
        "format": obj["format"],
        "versions": _versions(),
        "wall_time_s": round(time.perf_counter() - obj["t0"], 6),
    }
    text = json.dumps(manifest, sort_keys=True)
    click.echo(text, err=True)
    if obj["manifest"]:
        try:
            with open(obj["manifest"], "w") as fh:
                fh.write(text + "\n")
        except OSError as exc:
            raise RuntimeFailure(f"cannot write {obj['manifest']}: {exc.strerror}") from exc


def _estimate_row(e: experiments.VolumeEstimate) -> dict:
    return {
        "dims": e.dims,
        "N": e.size,
        "n": e.n,
        "hits": e.hits,
        "p_hat": e.p_hat,
        "stderr": e.stderr,
        "label": e.label,
        "mean_t": e.mean_t,
        "mean_t_stderr": e.mean_t_stderr,
    }


def _binned_rows(b: experiments.BinnedConditional, extra: dict | None = None) -> list[dict]:
    rows = []
    frac = b.ppt_fraction
    mt = b.mean_t
    cum = b.cumulative()
    for i in range(len(b.counts)):
        row = dict(extra or {})
        row.update(
            statistic=b.statistic,
            bin_lo=float(b.bin_edges[i]),
            bin_hi=float(b.bin_edges[i + 1]),
            count=int(b.counts[i]),
            ppt_count=int(b.ppt_counts[i]),
            ppt_fraction=float(frac[i]),
            mean_t=float(mt[i]),
            cumulative=float(cum[i]),
        )
        rows.append(row)
    return rows


def _load(loader, path):
    try:
        return loader(path)
    except OSError as exc:
        raise RuntimeFailure(f"cannot read {path}: {exc.strerror}") from exc
    except (ValueError, KeyError) as exc:
        raise RuntimeFailure(f"invalid state file {path}: {exc}") from exc


# ---------------------------------------------------------------- commands

_seed_opt = click.option("--seed", type=SEED, required=True, help="64-bit seed, decimal or 0x-hex.")
_workers_opt = click.option("--workers", type=click.IntRange(min=1), default=1, show_default=True)
_dims_opt = click.option("--dims", type=DIMS, default="2x2", show_default=True, help="Factor dimensions N1xN2.")


@click.group()
@click.option("--output", "-o", default=None, help="Result file (default: stdout).")
@click.option("--format", "form", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
@click.option("--manifest", default=None, help="Also write the run manifest to this file.")
@click.pass_context
def main(ctx, output, form, manifest):
    """Monte Carlo volumes of PPT and separable states."""
    ctx.obj = {"output": output, "format": form, "manifest": manifest, "t0": time.perf_counter()}


@main.command()
@_dims_opt
@click.option("--samples", type=COUNT, default="1000000", show_default=True)
@_seed_opt
@_workers_opt
@click.option("--mixture", type=click.FloatRange(0, 1), default=None, help="Mix every state with I/N at this weight.")
@click.pass_context
def estimate(ctx, dims, samples, seed, workers, mixture):
    """Fraction of random states with positive partial transpose."""
    est = experiments.estimate_ppt_volume(dims, samples, seed, workers, mixture=mixture)
    cfg = dict(dims=dims, samples=samples, seed=seed, workers=workers, mixture=mixture)
    _emit(ctx, "estimate", [_estimate_row(est)], cfg)


@main.command()
@click.option("--dims", "dim_list", type=DIMS, multiple=True, help="Repeatable; defaults to a standard scan.")
@click.option("--samples", type=COUNT, default="100000", show_default=True)
@_seed_opt
@_workers_opt
@click.option("--fit/--no-fit", default=False, help="Append an exponential fit row.")
@click.pass_context
def scan(ctx, dim_list, samples, seed, workers, fit):
    """PPT volume for several dimension pairs."""
    pairs = list(dim_list) or [parse_dims(d) for d in DEFAULT_SCAN]
    ests = experiments.scan_dimensions(pairs, samples, seed, workers)
    rows = [{"record": "estimate", **_estimate_row(e)} for e in ests]
    if fit:
        f = experiments.fit_exponential(ests)
        rows.append({"record": "fit", "prefactor": f.prefactor, "rate": f.rate, "rss": f.rss})
    _emit(ctx, "scan", rows, dict(dims=[fmt(p) for p in pairs], samples=samples, seed=seed, workers=workers, fit=fit))


@main.command("conditional-r")
@_dims_opt
@click.option("--samples", type=COUNT, default="1000000", show_default=True)
@_seed_opt
@click.option("--bins", type=click.IntRange(min=4), default=None, help="Default: width 0.05 on [1, N].")
@_workers_opt
@click.pass_context
def conditional_r(ctx, dims, samples, seed, bins, workers):
    """PPT fraction and mean t binned by participation ratio."""
    b = experiments.conditional_by_participation(dims, samples, seed, bins, workers)
    _emit(ctx, "conditional-r", _binned_rows(b), dict(dims=dims, samples=samples, seed=seed, bins=bins, workers=workers))


@main.command("dist-r")
@_dims_opt
@click.option("--samples", type=COUNT, default="1000000", show_default=True)
@_seed_opt
@click.option("--bins", type=click.IntRange(min=4), default=None)
@_workers_opt
@click.pass_context
def dist_r(ctx, dims, samples, seed, bins, workers):
    """Normalised histogram of the participation ratio."""
    h = experiments.distribution_of_participation(dims, samples, seed, bins, workers)
    rows = [
        {"bin_lo": float(lo), "bin_hi": float(hi), "count": int(c), "density": float(d)}
        for lo, hi, c, d in zip(h.bin_edges[:-1], h.bin_edges[1:], h.counts, h.density)
    ]
    _emit(ctx, "dist-r", rows, dict(dims=dims, samples=samples, seed=seed, bins=bins, workers=workers))


@main.command("conditional-h")
@_dims_opt
@click.option("--q", "q_list", type=click.FloatRange(min=0, min_open=True), multiple=True, help="Renyi orders (repeatable).")
@click.option("--samples", type=COUNT, default="1000000", show_default=True)
@_seed_opt
@click.option("--bins", type=click.IntRange(min=4), default=None, help="Default: 60 bins on [0, ln N].")
@_workers_opt
@click.pass_context
def conditional_h(ctx, dims, q_list, samples, seed, bins, workers):
    """PPT fraction against Renyi entropies, with the all-PPT threshold."""
    q_list = list(q_list) or list(DEFAULT_Q)
    res = experiments.conditional_by_entropy(dims, q_list, samples, seed, bins, workers)
    rows = []
    for r in res:
        rows.extend({"record": "bin", **row} for row in _binned_rows(r.binned, {"q": r.q}))
    for r in res:
        rows.append({"record": "threshold", "q": r.q, "statistic": r.binned.statistic,
                     "threshold": r.threshold, "cumulative_at_threshold": r.cumulative_at_threshold})
    _emit(ctx, "conditional-h", rows, dict(dims=dims, q=q_list, samples=samples, seed=seed, bins=bins, workers=workers))


@main.command("mean-t")
@_dims_opt
@click.option("--samples", type=COUNT, default="1000000", show_default=True)
@_seed_opt
@_workers_opt
@click.pass_context
def mean_t_cmd(ctx, dims, samples, seed, workers):
    """Average entanglement degree t over random states."""
    value, err = experiments.mean_t(dims, samples, seed, workers)
    _emit(ctx, "mean-t", [{"dims": dims, "n": samples, "mean_t": value, "stderr": err}],
          dict(dims=dims, samples=samples, seed=seed, workers=workers))


def _bound_row(r: bounds.BoundReport, dims) -> dict:
    return {"name": r.name, "dims": r.dims or dims, "value": r.value, "stderr": r.stderr, "kind": r.kind}


@main.command("bounds")
@_dims_opt
@click.option("--samples", type=COUNT, default=str(BOUNDS_MC_SAMPLES), show_default=True,
              help="Samples for the 2x2 Monte Carlo upper bound.")
@click.option("--seed", type=SEED, default=str(BOUNDS_MC_SEED), show_default=True)
@click.pass_context
def bounds_cmd(ctx, dims, samples, seed):
    """Closed-form bounds, plus the Monte Carlo upper bound for 2x2."""
    n = dims[0] * dims[1]
    rows = [
        _bound_row(bounds.tau_lower_bound(n, dims), dims),
        {"name": "epsilon_ball", "dims": dims, "value": bounds.epsilon_ball(n), "stderr": 0.0, "kind": bounds.BALL_MIXTURE},
        _bound_row(bounds.corner_bound(*dims), dims),
    ]
    if dims == (2, 2):
        rows.append(_bound_row(bounds.upper_bound_mc_2x2(samples, SeededStream(seed)), dims))
    _emit(ctx, "bounds", rows, dict(dims=dims, samples=samples, seed=seed))


@main.command("upper-bound-mc")
@click.option("--samples", type=COUNT, default=str(BOUNDS_MC_SAMPLES), show_default=True)
@_seed_opt
@click.option("--quadrature/--no-quadrature", default=True, help="Also report the deterministic quadrature value.")
@click.pass_context
def upper_bound_mc(ctx, samples, seed, quadrature):
    """Monte Carlo evaluation of the combined eigenvector-witness upper bound (2x2)."""
    try:
        rep = bounds.upper_bound_mc_2x2(samples, SeededStream(seed))
    except bounds.InsufficientSamples as exc:
        raise click.BadParameter(str(exc), param_hint="--samples") from exc
    rows = [_bound_row(rep, (2, 2))]
    if quadrature:
        rows.append({"name": "upper_bound_quadrature", "dims": (2, 2),
                     "value": bounds.upper_bound_quadrature_2x2(), "stderr": 0.0, "kind": bounds.UPPER_ON_SEP})
    _emit(ctx, "upper-bound-mc", rows, dict(samples=samples, seed=seed))


@main.command()
@click.option("--input", "input_path", required=True, help="State file {dims, matrix}.")
@click.pass_context
def check(ctx, input_path):
    """PPT verdict, t and mixedness of a state read from a file."""
    rho = _load(quantum.load_state, input_path)
    verdict = quantum.ppt_check(rho)
    n = rho.size
    separable = verdict.is_ppt if n in (4, 6) else ("unknown" if verdict.is_ppt else False)
    row = {
        "dims": rho.dims,
        "ppt": verdict.is_ppt,
        "separable": separable,
        "min_pt_eig": verdict.min_pt_eigenvalue,
        "t": float(quantum.negativity_from_pt_spectrum(verdict.pt_spectrum)),
        "R": quantum.participation_ratio(rho),
        "H_1": quantum.renyi_entropy(rho, 1.0),
    }
    _emit(ctx, "check", [row], dict(input=input_path, dims=rho.dims))


@main.command()
@click.option("--input", "input_path", required=True, help="State file {dims, matrix}.")
@click.option("--pure", "pure_path", default=None, help="Pure-state file {dims, vector} to test against.")
@click.pass_context
def witness(ctx, input_path, pure_path):
    """Eigenvector witness scan, and optionally both witnesses on a given vector."""
    rho = _load(quantum.load_state, input_path)
    rows = [{"witness": "eigenvector_scan", "fired": quantum.eigenvector_witness_scan(rho),
             "value": None, "threshold": None, "note": ""}]
    if pure_path is not None:
        psi, pdims = _load(quantum.load_pure_state, pure_path)
        if tuple(pdims) != rho.dims:
            raise RuntimeFailure(f"{pure_path}: dims {pdims} differ from state dims {rho.dims}")
        try:
            r = quantum.inverse_overlap_witness(rho, psi)
            rows.append({"witness": "inverse_overlap", "fired": r.fired, "value": r.value, "threshold": r.threshold, "note": ""})
        except quantum.NotInRange:
            rows.append({"witness": "inverse_overlap", "fired": False, "value": None, "threshold": None,
                         "note": "vector not in range of state"})
        r = quantum.overlap_witness(rho, psi)
        rows.append({"witness": "overlap", "fired": r.fired, "value": r.value, "threshold": r.threshold, "note": ""})
    _emit(ctx, "witness", rows, dict(input=input_path, pure=pure_path))


def run(argv=None) -> int:
    """Entry point returning the exit code instead of calling ``sys.exit``."""
    try:
        main.main(args=argv, prog_name="ppt-volume", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.Abort:
        click.echo("Aborted!", err=True)
        return 1
    except click.UsageError as exc:
        exc.show()
        return EXIT_USAGE
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except Exception as exc:  # noqa: BLE001 - every other failure is a runtime error
        click.echo(f"Error: {type(exc).__name__}: {exc}", err=True)
        return EXIT_RUNTIME
    return 0


def entry() -> None:
    sys.exit(run())


if __name__ == "__main__":
    entry()
