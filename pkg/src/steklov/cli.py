"""steklov command line: spectra, traces, invariants, fits, inequality checks, validate.

Exit codes: 0 ok, 1 validation failure, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .errors import ConfigError, NumericalError, SteklovError
from .geometry import DomainKind, DomainSpec, curvature_field, make_domain
from .store import atomic_write, cached_spectrum, resolve_cache_dir
from .spectrum import Spectrum, spectrum_to_csv, steklov_closed_form, steklov_numeric

COMMANDS = ("spectrum", "trace", "invariants", "hear", "check-inequalities", "validate")
EXIT_OK, EXIT_VALIDATION, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

# default eigenvalue counts for traces; enough for a 1e-8 tail near t = 2e-4
TRACE_COUNTS = {1: 10**6, 2: 10**10, 3: 10**15}


@dataclass(frozen=True)
class RunConfig:
    command: str
    domain: Optional[Path]
    out: Path
    format: str
    cache: Optional[Path]
    modes: int = 64
    count: Optional[int] = None
    tmin: Optional[float] = None
    tmax: Optional[float] = None
    orders: int = 3
    band_limit: int = 32
    seed: int = 20240611

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> "RunConfig":
        if ns.command not in COMMANDS:
            raise ConfigError(f"unknown command {ns.command!r}")
        domain = Path(ns.domain).resolve() if ns.domain else None
        if ns.command not in ("validate", "check-inequalities") and domain is None:
            raise ConfigError(f"{ns.command} needs --domain")
        return cls(
            command=ns.command,
            domain=domain,
            out=Path(ns.out).resolve(),
            format=ns.format,
            cache=resolve_cache_dir(ns.cache),
            modes=ns.modes,
            count=ns.count,
            tmin=ns.tmin,
            tmax=ns.tmax,
            orders=ns.orders,
            band_limit=ns.band_limit,
            seed=ns.seed,
        )


def load_domain(path: Path) -> DomainSpec:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read domain file {path}: {exc.strerror}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: expected a JSON object")
    return make_domain(DomainSpec.from_dict(doc))


def _dump(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def spectrum_json(sp: Spectrum) -> str:
    return _dump(
        {
            "n": sp.n,
            "vol": sp.vol,
            "source": sp.source,
            "accuracy": float(sp.accuracy),
            "eigenvalues": [float(v) for v in sp.eigenvalues],
            "multiplicities": [int(m) for m in sp.multiplicities],
        }
    )


def compute_spectrum(cfg: RunConfig, spec: DomainSpec, count: int) -> Spectrum:
    if spec.kind == DomainKind.STAR_PLANAR:
        return cached_spectrum(cfg.cache, spec, lambda: steklov_numeric(spec, cfg.modes, count), K=count, modes=cfg.modes)
    return cached_spectrum(cfg.cache, spec, lambda: steklov_closed_form(spec, count), K=count)


def _trace_spectrum(cfg, spec):
    if spec.kind == DomainKind.STAR_PLANAR:
        raise ConfigError("traces need a closed-form spectrum; StarPlanar numeric spectra are too short")
    count = cfg.count or TRACE_COUNTS.get(spec.n)
    if count is None:
        raise ConfigError(f"pass --count for n = {spec.n}")
    return compute_spectrum(cfg, spec, count)


def _window(cfg, sp, n, M):
    from .hearing import select_window

    if cfg.tmin is not None and cfg.tmax is not None:
        return cfg.tmin, cfg.tmax
    lo, hi = select_window(sp, n, M)
    return cfg.tmin or lo, cfg.tmax or hi


def cmd_spectrum(cfg: RunConfig, echo) -> int:
    spec = load_domain(cfg.domain)
    sp = compute_spectrum(cfg, spec, cfg.count or 200)
    if cfg.format == "csv":
        atomic_write(cfg.out / "spectrum.csv", spectrum_to_csv(sp))
    else:
        atomic_write(cfg.out / "spectrum.json", spectrum_json(sp))
    echo(f"{sp.count} eigenvalues ({len(sp.eigenvalues)} distinct), lambda_max = {sp.lambda_max:.6g}, source {sp.source}")
    return EXIT_OK


def cmd_trace(cfg: RunConfig, echo) -> int:
    from .heat_trace import trace_samples

    spec = load_domain(cfg.domain)
    sp = _trace_spectrum(cfg, spec)
    t_min, t_max = _window(cfg, sp, spec.n, cfg.orders)
    samples = trace_samples(sp, t_min, t_max)
    if cfg.format == "csv":
        atomic_write(cfg.out / "trace.csv", samples.to_csv())
    else:
        doc = {
            "spectrum_hash": samples.spectrum_hash,
            "t": [float(t) for t in samples.t_grid],
            "Z": [float(z) for z in samples.values],
            "tail_estimate": [float(e) for e in samples.tail_estimates],
        }
        atomic_write(cfg.out / "trace.json", _dump(doc))
    echo(f"{len(samples.t_grid)} samples on [{t_min:.3e}, {t_max:.3e}]")
    return EXIT_OK


def cmd_invariants(cfg: RunConfig, echo) -> int:
    from .invariants import integrated_coefficients

    spec = load_domain(cfg.domain)
    fld = curvature_field(spec, cfg.count or 64)
    cs = integrated_coefficients(fld)
    atomic_write(cfg.out / "invariants.json", cs.to_json() + "\n")
    atomic_write(cfg.out / "invariants_densities.csv", cs.densities_csv())
    for m in cs.valid_orders:
        echo(f"integral a{m} = {cs.integrals[m]:.12g}")
    return EXIT_OK


def cmd_hear(cfg: RunConfig, echo) -> int:
    from .hearing import comparison_table, fit_expansion, invert_geometry
    from .heat_trace import trace_samples
    from .invariants import integrated_coefficients

    spec = load_domain(cfg.domain)
    sp = _trace_spectrum(cfg, spec)
    M = cfg.orders
    window = _window(cfg, sp, spec.n, M)
    fit = fit_expansion(trace_samples(sp, *window), spec.n, M)
    ints = integrated_coefficients(curvature_field(spec, 64)).integrals
    rows = comparison_table(fit, ints)
    geo = invert_geometry(fit)
    lines = ["m,fitted,integral,abs_gap,rel_gap"]
    for m, c, ref, gap, rel in rows:
        lines.append(",".join("" if v is None else repr(v) for v in (m, c, ref, gap, rel)))
    table = "\n".join(lines) + "\n"
    doc = json.loads(fit.to_json())
    doc["recovered"] = {
        "boundary_volume": geo.boundary_volume,
        "mean_curvature_integral": geo.mean_curvature_integral,
        "notes": geo.notes,
    }
    doc["comparison"] = [dict(zip(("m", "fitted", "integral", "abs_gap", "rel_gap"), r)) for r in rows]
    if cfg.format == "csv":
        atomic_write(cfg.out / "hear.csv", table)
    else:
        atomic_write(cfg.out / "hear.json", _dump(doc))
    echo(f"{'m':>2} {'fitted c_m':>16} {'integral a_m':>16}")
    for m, c, ref, _, _ in rows:
        echo(f"{m:>2} {c:>16.10f} {'' if ref is None else f'{ref:16.10f}':>16}")
    return EXIT_OK


def cmd_check_inequalities(cfg: RunConfig, echo) -> int:
    from .validation import inequality_harness

    cal, reports = inequality_harness(seed=cfg.seed, band_limit=cfg.band_limit)
    atomic_write(cfg.out / "inequalities.jsonl", "".join(r.to_json() + "\n" for r in reports))
    counts = {}
    for r in reports:
        c = counts.setdefault(r.which.value, [0, 0])
        c[0] += int(r.holds)
        c[1] += 1
    summary = {"seed": cfg.seed, "band_limit": cfg.band_limit, "A": cal.A, "B": cal.B, "calibration_samples": cal.samples, "holds_total": counts}
    atomic_write(cfg.out / "inequalities_summary.json", _dump(summary))
    for k in sorted(counts):
        echo(f"{k}: {counts[k][0]}/{counts[k][1]} hold")
    return EXIT_OK if all(r.holds for r in reports) else EXIT_VALIDATION


def cmd_validate(cfg: RunConfig, echo) -> int:
    from .validation import exit_status, run_all, summary_json

    results = run_all(echo=echo)
    atomic_write(cfg.out / "validate.json", summary_json(results) + "\n")
    status = exit_status(results)
    passed = sum(r.passed for r in results)
    echo(f"{passed}/{len(results)} criteria pass; exit {status}")
    return status


HANDLERS = {
    "spectrum": cmd_spectrum,
    "trace": cmd_trace,
    "invariants": cmd_invariants,
    "hear": cmd_hear,
    "check-inequalities": cmd_check_inequalities,
    "validate": cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="steklov", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--domain", help="domain JSON file")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.add_argument("--modes", type=int, default=64, help="Fourier modes for the numeric DtN map")
    p.add_argument("--count", type=int, help="eigenvalue count (or curvature nodes for invariants)")
    p.add_argument("--tmin", type=float)
    p.add_argument("--tmax", type=float)
    p.add_argument("--orders", type=int, default=3, help="number of fitted trace coefficients")
    p.add_argument("--band-limit", type=int, default=32)
    p.add_argument("--seed", type=int, default=20240611)
    p.add_argument("--cache", help="spectrum cache directory (STEKLOV_CACHE overrides)")
    return p


def run(cfg: RunConfig, echo=print) -> int:
    return HANDLERS[cfg.command](cfg, echo)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = RunConfig.from_args(ns)
        return run(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except SteklovError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
