"""Command-line front end: detect, generate, validate.

Outputs are CSV files written under --out, with matplotlib figures rendered
alongside them (disable with --no-figures). Log verbosity is controlled by
the DDCA_LOG environment variable (DEBUG, INFO, WARNING, ERROR).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import analysis, data_model, estimators, figures, instrumentation, synthetic
from .engine import (
    ArithmeticLifespans,
    EngineConfig,
    GaussianLifespans,
    LifespanDistribution,
    run_detection,
)
from .errors import ConfigurationError, DdcaError

logger = logging.getLogger("ddca")

OUTPUT_LIST_HEADER = "antigen_id,profile,flushed"
INSTRUMENTATION_HEADER = "n,a,b,N,z,t1,t2,t3,total,t1_formula,t2_formula,t3_bound,slope_fit"
ESTIMATORS_HEADER = "interval_start,interval_end,estimator,predicted_lower,predicted_upper,measured"
PROP3_SWEEP_HEADER = "N,delta,theta,formula,oracle,match,within_delta_le_N"


def _parse_lifespan(text: str, seed: int) -> LifespanDistribution:
    kind, _, rest = text.partition(":")
    parts = [p for p in rest.split(",") if p]
    try:
        if kind == "arithmetic":
            if len(parts) != 2:
                raise ValueError
            return ArithmeticLifespans(float(parts[0]), float(parts[1]))
        if kind == "gaussian":
            if len(parts) != 2:
                raise ValueError
            return GaussianLifespans(float(parts[0]), float(parts[1]), seed)
    except ValueError:
        raise ConfigurationError(f"malformed lifespan spec {text!r}") from None
    raise ConfigurationError(
        f"unknown lifespan distribution {kind!r}; use arithmetic:<x1>,<step> or gaussian:<mu>,<sigma>"
    )


def _parse_segment_size(text: str) -> Optional[int]:
    if text == "off":
        return None
    try:
        z = int(text)
    except ValueError:
        raise ConfigurationError(f"segment size must be an integer or 'off', got {text!r}") from None
    if z < 1:
        raise ConfigurationError(f"segment size must be >= 1, got {z}")
    return z


def _parse_interval(text: str) -> estimators.TimeInterval:
    t_b, _, t_e = text.partition(":")
    try:
        return estimators.TimeInterval(int(t_b), int(t_e))
    except ValueError:
        raise ConfigurationError(f"malformed interval {text!r}; use <tb>:<te>") from None


def _parse_vector(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(p) for p in text.split(","))
    except ValueError:
        raise ConfigurationError(f"malformed vector {text!r}; use comma-separated numbers") from None


def _load_weights(args) -> data_model.WeightMatrix:
    if args.weights is None:
        return data_model.default_weights(args.signal_dim)
    path = Path(args.weights)
    if not path.exists():
        raise ConfigurationError(f"weights file not found: {path}")
    return data_model.parse_weights(path, args.signal_dim)


def _engine_config(args, flush: bool = False, trace: bool = False) -> EngineConfig:
    return EngineConfig(
        weights=_load_weights(args),
        n_cells=args.population_size,
        lifespans=_parse_lifespan(args.lifespan, args.seed),
        flush_at_end=flush or args.flush_at_end,
        trace=trace,
    )


def _write_lines(path: Path, lines: Sequence[str]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    logger.info("wrote %s", path)


def _add_engine_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--signal-dim", type=int, default=data_model.DEFAULT_SIGNAL_DIM,
                        help="signal dimensionality m (default 3)")
    parser.add_argument("--weights", default=None,
                        help="weights CSV file (two rows of m numbers); default built-in for m=3")
    parser.add_argument("--population-size", type=int, default=100,
                        help="number of cells N (default 100)")
    parser.add_argument("--lifespan", default="arithmetic:10,1",
                        help="lifespan distribution: arithmetic:<x1>,<step> or gaussian:<mu>,<sigma>")
    parser.add_argument("--segment-size", default="off",
                        help="analysis segment size z, or 'off' for whole-run analysis")
    parser.add_argument("--threshold", type=float, default=None,
                        help="anomaly threshold epsilon (dataset-dependent; default 0)")
    parser.add_argument("--flush-at-end", action="store_true",
                        help="force one final presentation pass, marking records as flushed")
    parser.add_argument("--seed", type=int, default=0, help="seed for all randomness")
    parser.add_argument("--count-ops", action="store_true",
                        help="count primitive operations and write instrumentation CSV")
    parser.add_argument("--interval", action="append", default=[], metavar="TB:TE",
                        help="estimator interval (repeatable)")
    parser.add_argument("--out", default="ddca-out", help="output directory")
    parser.add_argument("--no-figures", action="store_true", help="skip figure rendering")


def _threshold(args) -> float:
    if args.threshold is None:
        logger.warning("no --threshold given; defaulting to 0. The threshold is "
                       "dataset-dependent and should be chosen per dataset.")
        return 0.0
    return args.threshold


def cmd_detect(args) -> int:
    out_dir = Path(args.out)
    epsilon = _threshold(args)
    z = _parse_segment_size(args.segment_size)
    events, stats = data_model.parse_stream(args.stream, args.signal_dim)
    logger.info("parsed %d events (%d antigens over %d types)", stats.n, stats.a, stats.b)

    if args.count_ops:
        run = instrumentation.instrumented_run(
            events, _engine_config(args), segment_size=z, epsilon=epsilon
        )
        records = run.output
        results = run.segments if run.segments is not None else [
            analysis.SegmentResult(0, run.report, partial=False)
        ]
        forms = instrumentation.closed_form_totals(run.stats, args.population_size)
        _write_lines(out_dir / "instrumentation.csv", [
            INSTRUMENTATION_HEADER,
            f"{run.stats.n},{run.stats.a},{run.stats.b},{args.population_size},"
            f"{z if z is not None else ''},{run.totals.t1},{run.totals.t2},{run.totals.t3},"
            f"{run.totals.total},{forms.t1},{forms.t2},{forms.t3_bound},",
        ])
    else:
        _, records = run_detection(events, _engine_config(args))
        if z is None:
            results = [analysis.SegmentResult(0, analysis.anomaly_metrics(records, epsilon), False)]
        else:
            results = list(analysis.segmented_analysis(records, z, epsilon))

    _write_lines(out_dir / "output_list.csv", [OUTPUT_LIST_HEADER] + [
        f"{r.antigen},{r.profile!r},{int(r.flushed)}" for r in records
    ])
    _write_lines(out_dir / "report.csv", analysis.report_csv_rows(results))
    if not args.no_figures:
        figures.render_report_figure(results, out_dir / "report.png", epsilon)
    print(f"{len(records)} output records, {sum(len(s.report.entries) for s in results)} report rows "
          f"-> {out_dir}")
    return 0


def cmd_generate(args) -> int:
    spec = synthetic.SynthSpec(
        n=args.events,
        antigen_fraction=args.antigen_fraction,
        n_types=args.antigen_types,
        anomalous_types=frozenset(int(p) for p in args.anomalous_types.split(",") if p),
        anomalous_signal=_parse_vector(args.anomalous_signal),
        normal_signal=_parse_vector(args.normal_signal),
        noise=args.noise,
        lag=args.lag,
        type_persistence=args.type_persistence,
        seed=args.seed,
    )
    events = synthetic.generate_events(spec)
    out = Path(args.outfile)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(data_model.serialize_stream(events), encoding="utf-8")
    stats = data_model.compute_stats(events)
    print(f"wrote {stats.n} events ({stats.a} antigens over {stats.b} types) -> {out}")
    return 0


def _estimator_rows(args, events, epsilon) -> tuple[list[str], list[tuple]]:
    intervals = [_parse_interval(text) for text in args.interval]
    config = _engine_config(args, trace=True)
    state, _ = run_detection(events, config)
    trace = state.trace
    rows: list[str] = []
    plot_points: list[tuple] = []
    dist = config.lifespans
    for interval in intervals:
        csm_values = trace.csm_slice(interval.t_b, interval.t_e)
        if isinstance(dist, ArithmeticLifespans):
            point = estimators.estimate_matured_uniform(
                config.n_cells, dist.x1, dist.step, csm_values
            )
            lo = hi = point.delta
            name = "matured_uniform"
        else:
            band = estimators.estimate_matured_gaussian(
                config.n_cells, dist.mu, dist.sigma, csm_values, interval
            )
            lo, hi = band.lower, band.upper
            name = "matured_gaussian"
        measured = estimators.measure_matured(trace, interval)
        rows.append(f"{interval.t_b},{interval.t_e},{name},{lo},{hi},{measured}")
        plot_points.append((f"[{interval.t_b},{interval.t_e}] matured", lo, hi, measured))

        delta = measured
        theta = trace.antigens_up_to(interval.t_e)
        nu = estimators.estimate_processed_antigens(config.n_cells, delta, theta).nu
        measured_nu = estimators.measure_processed_antigens(trace, interval)
        rows.append(f"{interval.t_b},{interval.t_e},processed_antigens,{nu},{nu},{measured_nu}")
        plot_points.append((f"[{interval.t_b},{interval.t_e}] processed", nu, nu, measured_nu))
    return rows, plot_points


def _prop3_sweep_rows(max_n_cells: int, max_theta: int) -> tuple[list[str], int]:
    rows = []
    mismatches_in_contract = 0
    for n_cells in range(1, max_n_cells + 1):
        for delta in range(0, 2 * n_cells + 1):
            for theta in range(0, max_theta + 1):
                formula = estimators.estimate_processed_antigens(n_cells, delta, theta).nu
                oracle = estimators.processed_antigens_oracle(n_cells, delta, theta)
                match = formula == oracle
                in_contract = delta <= n_cells
                if in_contract and not match:
                    mismatches_in_contract += 1
                rows.append(
                    f"{n_cells},{delta},{theta},{formula},{oracle},{int(match)},{int(in_contract)}"
                )
    return rows, mismatches_in_contract


def cmd_validate(args) -> int:
    out_dir = Path(args.out)
    epsilon = _threshold(args)
    z = _parse_segment_size(args.segment_size)
    did_anything = False

    if args.scaling:
        sizes = [int(p) for p in args.scaling.split(",") if p]
        mode = args.scaling_mode
        result = instrumentation.scaling_experiment(
            sizes,
            mode,
            config=_engine_config(args),
            antigen_fraction=args.antigen_fraction,
            segment_size=z if z is not None else 100,
            epsilon=epsilon,
        )
        lines = [INSTRUMENTATION_HEADER]
        for row in result.rows:
            lines.append(
                f"{row.n},{row.a},{row.b},{row.n_cells},{row.z if row.z is not None else ''},"
                f"{row.t1},{row.t2},{row.t3},{row.total},{row.t1_formula},{row.t2_formula},"
                f"{row.t3_bound},{result.slope!r}"
            )
        _write_lines(out_dir / f"scaling_{mode}.csv", lines)
        if not args.no_figures:
            figures.render_scaling_figure(result, out_dir / f"scaling_{mode}.png")
        print(f"{mode} scaling over n={sorted(sizes)}: slope {result.slope:.4f}")
        did_anything = True

    if args.prop3_sweep:
        rows, mismatches = _prop3_sweep_rows(args.sweep_max_cells, args.sweep_max_theta)
        _write_lines(out_dir / "processed_antigens_sweep.csv", [PROP3_SWEEP_HEADER] + rows)
        print(f"processed-antigen sweep: {mismatches} mismatches with delta <= N "
              f"({len(rows)} cases checked)")
        did_anything = True

    needs_stream = args.count_ops or args.interval
    if needs_stream:
        if args.stream is None:
            raise ConfigurationError("--count-ops and --interval require a stream file")
        events, stats = data_model.parse_stream(args.stream, args.signal_dim)

        if args.count_ops:
            run = instrumentation.instrumented_run(
                events, _engine_config(args), segment_size=z, epsilon=epsilon
            )
            forms = instrumentation.closed_form_totals(run.stats, args.population_size)
            _write_lines(out_dir / "instrumentation.csv", [
                INSTRUMENTATION_HEADER,
                f"{run.stats.n},{run.stats.a},{run.stats.b},{args.population_size},"
                f"{z if z is not None else ''},{run.totals.t1},{run.totals.t2},{run.totals.t3},"
                f"{run.totals.total},{forms.t1},{forms.t2},{forms.t3_bound},",
            ])
            print(f"instrumented run: t1={run.totals.t1} t2={run.totals.t2} t3={run.totals.t3} "
                  f"(bound {forms.t3_bound})")

        if args.interval:
            rows, points = _estimator_rows(args, events, epsilon)
            _write_lines(out_dir / "estimators.csv", [ESTIMATORS_HEADER] + rows)
            if not args.no_figures and points:
                figures.render_estimator_figure(
                    [p[0] for p in points],
                    [p[1] for p in points],
                    [p[2] for p in points],
                    [p[3] for p in points],
                    out_dir / "estimators.png",
                )
            print(f"estimator comparison over {len(args.interval)} interval(s) -> {out_dir}")
        did_anything = True

    if not did_anything:
        raise ConfigurationError(
            "nothing to validate: pass --scaling, --prop3-sweep, --count-ops or --interval"
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ddca",
        description="Deterministic dendritic-cell anomaly detection and runtime validation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_detect = sub.add_parser("detect", help="run detection and analysis on a stream file")
    p_detect.add_argument("stream", help="input stream CSV")
    _add_engine_flags(p_detect)
    p_detect.set_defaults(func=cmd_detect)

    p_gen = sub.add_parser("generate", help="write a seeded synthetic stream file")
    p_gen.add_argument("outfile", help="output stream CSV path")
    p_gen.add_argument("--events", type=int, required=True, help="total number of events n")
    p_gen.add_argument("--antigen-fraction", type=float, default=0.4)
    p_gen.add_argument("--antigen-types", type=int, default=2, help="number of antigen types b")
    p_gen.add_argument("--anomalous-types", default="1", help="comma list of anomalous type ids")
    p_gen.add_argument("--anomalous-signal", default="0.85,0.65,0.05",
                       help="regime vector emitted after anomalous antigens")
    p_gen.add_argument("--normal-signal", default="0.05,0.1,0.85",
                       help="regime vector emitted after normal antigens")
    p_gen.add_argument("--noise", type=float, default=0.05)
    p_gen.add_argument("--lag", type=int, default=0, help="antigen-to-signal lag in ticks")
    p_gen.add_argument("--type-persistence", type=float, default=0.0,
                       help="probability the next antigen repeats the previous type")
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.set_defaults(func=cmd_generate)

    p_val = sub.add_parser("validate", help="instrumentation, scaling and estimator checks")
    p_val.add_argument("stream", nargs="?", default=None,
                       help="input stream CSV (needed for --count-ops / --interval)")
    _add_engine_flags(p_val)
    p_val.add_argument("--scaling", default=None, metavar="N1,N2,...",
                       help="run worst-case scaling experiment over these stream sizes")
    p_val.add_argument("--scaling-mode", choices=("standard", "segmented"), default="standard")
    p_val.add_argument("--antigen-fraction", type=float, default=0.5,
                       help="antigen fraction for generated scaling streams")
    p_val.add_argument("--prop3-sweep", action="store_true",
                       help="sweep the processed-antigen formula against the bin-filling oracle")
    p_val.add_argument("--sweep-max-cells", type=int, default=10)
    p_val.add_argument("--sweep-max-theta", type=int, default=50)
    p_val.set_defaults(func=cmd_validate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(
        level=os.environ.get("DDCA_LOG", "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DdcaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
