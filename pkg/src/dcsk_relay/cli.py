"""Command-line front end: ``dcsk-relay simulate|analyze|compare``.

Exit status: 0 when every requested point completed unflagged, 1 when some
Monte Carlo point stopped short of ``min_errors``, 2 on usage or config
errors, 3 on I/O failure.
"""

import argparse
import logging
import sys

from . import __version__, analysis, montecarlo, results
from .config import ConfigError, list_presets, load, parse_grid
from .schemes import Scheme, slot_and_bandwidth

log = logging.getLogger("dcsk_relay")

EXIT_OK, EXIT_FLAGGED, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


def _meta(command, configs, seed=None):
    meta = {
        "format_version": results.FORMAT_VERSION,
        "generator": f"dcsk_relay {__version__}",
        "command": command,
    }
    for i, cfg in enumerate(configs):
        suffix = "" if len(configs) == 1 else f"[{i}]"
        meta[f"config{suffix}"] = cfg.name
        meta[f"config_sha256{suffix}"] = cfg.sha256
        if seed is not False:
            meta[f"seed{suffix}"] = cfg.seed
        meta[f"special_case{suffix}"] = cfg.special_case
        meta[f"include_term_c{suffix}"] = str(cfg.include_term_c).lower()
    return meta


def _run_series(cfg):
    sc = cfg.simulated_scenario()
    log.info("%s: %s beta=%d grid=%s seed=%d", cfg.name, sc.scheme.value, sc.beta, cfg.grid, cfg.seed)
    series = montecarlo.sweep(sc, cfg.grid, cfg.rule, cfg.seed, cfg.include_term_c, cfg.metric)
    for row in series.rows:
        e = row.estimate
        log.info("  %6.2f dB  ber=%.4g  errors=%d bits=%d%s", e.point_ebn0_db, e.ber, e.errors,
                 e.bits, "  FLAGGED" if e.flagged else "")
    return series


def simulate_rows(cfg):
    series = _run_series(cfg)
    rows = []
    for r in series.rows:
        e = r.estimate
        rows.append({
            "ebn0_db": e.point_ebn0_db, "scheme": series.scheme.value, "ber_sim": e.ber,
            "ci95": e.ci95_halfwidth, "bits": e.bits, "errors": e.errors,
            "ber_analytic": r.ber_analytic, "flagged": e.flagged,
        })
    return rows, series.flagged


def analyze_rows(cfg):
    sc = cfg.simulated_scenario()
    beta = sc.beta
    _, t2, _ = slot_and_bandwidth(Scheme.TIME_MUX2, beta)
    _, t3, _ = slot_and_bandwidth(Scheme.FREQ_MUX3, beta)
    rows = []
    for db in cfg.grid:
        ebn0 = analysis.db_to_linear(db)
        t = analysis.link_bers(sc.hop1_a, sc.hop1_b, sc.hop2_b, ebn0, beta, cfg.include_term_c)
        base = cfg.scenario
        e2e = analysis.special_case_ber(cfg.special_case, ebn0, beta, base.hop1_a, base.hop1_b,
                                        base.hop2_b, cfg.include_term_c)
        rows.append({
            "ebn0_db": float(db), "ber_1a": t.ber_1a, "ber_1b": t.ber_1b, "ber_2b": t.ber_2b,
            "ber_e2e": e2e,
            "throughput_s2": analysis.throughput(e2e, t2),
            "throughput_s3": analysis.throughput(e2e, t3),
            "gamma_t": analysis.spectral_efficiency(Scheme.TIME_MUX2, e2e, beta),
            "gamma_f": analysis.spectral_efficiency(Scheme.FREQ_MUX3, e2e, beta),
        })
    return rows


COMPARE_METRICS = ("ber_sim", "ci95", "bits", "errors", "flagged", "ber_analytic",
                   "throughput_sim", "throughput_analytic", "efficiency_sim", "efficiency_analytic")


def compare_rows(cfgs, schemes=None):
    rows = []
    flagged = False
    for cfg in cfgs:
        for scheme in schemes or [cfg.scenario.scheme]:
            series = _run_series(cfg.with_overrides(scheme=scheme))
            flagged |= series.flagged
            for r in series.rows:
                e = r.estimate
                values = {
                    "ber_sim": e.ber, "ci95": e.ci95_halfwidth, "bits": float(e.bits),
                    "errors": float(e.errors), "flagged": float(e.flagged),
                    "ber_analytic": r.ber_analytic, "throughput_sim": r.throughput_sim,
                    "throughput_analytic": r.throughput_analytic,
                    "efficiency_sim": r.efficiency_sim, "efficiency_analytic": r.efficiency_analytic,
                }
                for metric in COMPARE_METRICS:
                    if values[metric] is None:
                        continue
                    rows.append({"config": cfg.name, "scheme": series.scheme.value,
                                 "ebn0_db": e.point_ebn0_db, "metric": metric,
                                 "value": values[metric]})
    return rows, flagged


def _emit(text, out):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        results.write_atomic(out, text)
        log.info("wrote %s", out)


def build_parser():
    presets = ", ".join(list_presets())
    p = argparse.ArgumentParser(
        prog="dcsk-relay",
        description="DCSK two-way relay network coding: Monte Carlo BER and closed-form analysis.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, many=False):
        if many:
            sp.add_argument("--config", action="append", required=True, metavar="PATH",
                            help=f"config file or preset name, repeatable (presets: {presets})")
        else:
            sp.add_argument("--config", required=True, metavar="PATH",
                            help=f"config file or preset name (presets: {presets})")
        sp.add_argument("--out", metavar="PATH", help="output CSV (default: config 'output' or stdout)")
        sp.add_argument("--seed", type=int, help="override the master seed")
        sp.add_argument("--grid", type=parse_grid, metavar="A:B:STEP", help="override the Eb/N0 grid in dB")
        sp.add_argument("-v", "--verbose", action="store_true", help="progress on stderr")

    s = sub.add_parser("simulate", help="Monte Carlo BER sweep of one scenario")
    common(s)
    s.add_argument("--scheme", help="override the scheme (PNC1, TimeMux2, FreqMux3, ANC)")
    a = sub.add_parser("analyze", help="closed-form BER/throughput table")
    common(a)
    c = sub.add_parser("compare", help="long-format table across configs and schemes")
    common(c, many=True)
    c.add_argument("--scheme", help="comma-separated schemes to run for every config")
    return p


def _load_all(args):
    paths = args.config if isinstance(args.config, list) else [args.config]
    cfgs = []
    for path in paths:
        cfg = load(path)
        scheme = getattr(args, "scheme", None) if args.command == "simulate" else None
        cfgs.append(cfg.with_overrides(scheme=scheme, seed=args.seed, grid=args.grid))
    return cfgs


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(message)s", stream=sys.stderr)
    try:
        cfgs = _load_all(args)
        if args.command == "compare":
            schemes = None
            if args.scheme:
                schemes = [Scheme.parse(s) for s in args.scheme.split(",") if s.strip()]
                if not schemes:
                    raise ValueError("--scheme: empty scheme list")
            rows, flagged = compare_rows(cfgs, schemes)
            text = results.render(results.COMPARE_COLUMNS, rows,
                                  _meta("compare", cfgs))
        elif args.command == "simulate":
            rows, flagged = simulate_rows(cfgs[0])
            text = results.render(results.SIMULATE_COLUMNS, rows, _meta("simulate", cfgs))
        else:
            rows, flagged = analyze_rows(cfgs[0]), False
            text = results.render(results.ANALYZE_COLUMNS, rows, _meta("analyze", cfgs, seed=False))
    except ConfigError as exc:
        print(f"dcsk-relay: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"dcsk-relay: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    out = args.out if args.out is not None else cfgs[0].output
    try:
        _emit(text, out)
    except OSError as exc:
        print(f"dcsk-relay: cannot write {out}: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_FLAGGED if flagged else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
