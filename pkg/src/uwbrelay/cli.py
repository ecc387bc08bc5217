"""Command line front end.

Subcommands mirror the library surface: `channel` dumps one seeded
channel draw, `bounds` evaluates every bound on it, `sweep-distance` and
`sweep-rho` run the Monte Carlo sweeps (CSV + SVG + manifest), and
`oracle-check` compares the optimizer against exhaustive search on small
random instances.

All outputs are deterministic given the configuration, and files are
written atomically (temp file + rename) so an interrupted run never
leaves a truncated artifact.  Exit codes: 0 success, 1 failed check or
runtime error, 2 bad usage or configuration.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import __version__
from .configfile import (ANNOTATED_DEFAULTS, AppConfig, ConfigError,
                         config_signature, default_config, load_config)
from .experiments import (Geometry, powers_from_config, draw_link_detail,
                          link_rng, run_trial, sweep_distance, sweep_rho,
                          LINK_SOURCE_DEST, LINK_SOURCE_RELAY, LINK_RELAY_DEST)
from .optimizer import oracle_suite
from .svchannel import write_response_csv, write_taps_csv
from .svgplot import sweep_chart


def _atomic_write(path: str, text: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _write_manifest(out_dir: str, command: str, config: AppConfig,
                    outputs: list[str], rate_unit: str) -> str:
    path = os.path.join(out_dir, f"{command}.manifest.txt")
    lines = [
        f"tool=uwbrelay {__version__}",
        f"command={command}",
        f"config_sha256={config_signature(config)}",
        f"master_seed={config.experiment.master_seed}",
        f"rate_unit={rate_unit}",
        f"outputs={','.join(outputs)}",
    ]
    _atomic_write(path, "\n".join(lines) + "\n")
    return path


def _load(args: argparse.Namespace) -> AppConfig:
    config = load_config(args.config) if args.config else default_config()
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigError(f"--seed must be >= 0, got {args.seed}")
        config.experiment.master_seed = args.seed
        config.experiment.__post_init__()
    return config


def _rate_unit(args: argparse.Namespace, config: AppConfig):
    if args.bits_per_second:
        return "bits_per_second", config.experiment.bandwidth_mhz * 1e6
    return "bits_per_sample", 1.0


def _first_geometry(config: AppConfig) -> Geometry:
    exp = config.experiment
    return Geometry(exp.d1, exp.d2_grid[0])


def _progress(args: argparse.Namespace, label: str):
    if not args.verbose:
        return None

    def report(done: int, total: int) -> None:
        print(f"{label}: {done}/{total} grid points", file=sys.stderr)

    return report


def cmd_channel(args: argparse.Namespace) -> int:
    config = _load(args)
    exp = config.experiment
    geometry = _first_geometry(config)
    seed = exp.master_seed
    taps, responses = {}, {}
    for name, distance, link in (
        ("sd", geometry.d1, LINK_SOURCE_DEST),
        ("sr", geometry.d2, LINK_SOURCE_RELAY),
        ("rd", geometry.relay_dest_distance, LINK_RELAY_DEST),
    ):
        taps[name], responses[name] = draw_link_detail(
            exp, distance, link_rng(seed, args.trial, link))
    taps_path = os.path.join(args.output_dir, "channel_taps.csv")
    resp_path = os.path.join(args.output_dir, "channel_response.csv")
    _atomic_write(taps_path, write_taps_csv(None, taps, seed))
    _atomic_write(resp_path, write_response_csv(None, responses,
                                                exp.sample_period_ns, seed))
    _write_manifest(args.output_dir, "channel", config,
                    [os.path.basename(taps_path), os.path.basename(resp_path)],
                    rate_unit="none")
    print(taps_path)
    print(resp_path)
    return 0


def cmd_bounds(args: argparse.Namespace) -> int:
    config = _load(args)
    exp = config.experiment
    geometry = _first_geometry(config)
    rho = exp.rho_values[0]
    report = run_trial(exp, geometry, rho, args.trial)
    unit, scale = _rate_unit(args, config)

    lines = [f"bound,rate_{unit}"]
    for name, value in report.rows():
        lines.append(f"{name},{value * scale!r}")
    bounds_path = os.path.join(args.output_dir, "bounds.csv")
    _atomic_write(bounds_path, "\n".join(lines) + "\n")
    outputs = [os.path.basename(bounds_path)]
    print(bounds_path)

    if args.per_tone:
        names = list(report.per_tone)
        tone_lines = ["tone," + ",".join(names)]
        block = len(report.per_tone[names[0]])
        for i in range(block):
            cells = [str(i)]
            cells.extend(repr(float(report.per_tone[n][i])) for n in names)
            tone_lines.append(",".join(cells))
        tone_path = os.path.join(args.output_dir, "bounds_per_tone.csv")
        _atomic_write(tone_path, "\n".join(tone_lines) + "\n")
        outputs.append(os.path.basename(tone_path))
        print(tone_path)

    if args.verbose:
        for key, value in report.flags.items():
            print(f"# {key} = {value}", file=sys.stderr)
    _write_manifest(args.output_dir, "bounds", config, outputs, unit)
    return 0


def _run_sweep(args: argparse.Namespace, command: str, runner, title: str) -> int:
    config = _load(args)
    unit, scale = _rate_unit(args, config)
    result = runner(config.experiment, progress=_progress(args, command))
    csv_name = command.replace("-", "_") + ".csv"
    svg_name = command.replace("-", "_") + ".svg"
    csv_path = os.path.join(args.output_dir, csv_name)
    svg_path = os.path.join(args.output_dir, svg_name)
    csv_text = result.write_csv(None, rate_unit=unit, scale=scale)
    _atomic_write(csv_path, csv_text)
    _atomic_write(svg_path, sweep_chart(csv_text, title=title))
    _write_manifest(args.output_dir, command, config, [csv_name, svg_name], unit)
    print(csv_path)
    print(svg_path)
    return 0


def cmd_sweep_distance(args: argparse.Namespace) -> int:
    return _run_sweep(args, "sweep-distance", sweep_distance,
                      title="Relay bounds vs relay position")


def cmd_sweep_rho(args: argparse.Namespace) -> int:
    return _run_sweep(args, "sweep-rho", sweep_rho,
                      title="Upper bound vs noise correlation")


def cmd_oracle_check(args: argparse.Namespace) -> int:
    config = _load(args)
    orc = config.oracle
    seed = args.seed if args.seed is not None else orc.seed
    rows = oracle_suite(orc.k1_instances, orc.k2_instances, orc.resolution,
                        seed, config.experiment.optimizer)
    if not rows:
        print("oracle-check: no instances configured", file=sys.stderr)
        return 2
    worst = max(rows, key=lambda r: r.deviation)
    if args.verbose:
        for row in rows:
            print(f"block={row.block_size} idx={row.index} obj={row.objective} "
                  f"optimizer={row.optimizer_rate!r} oracle={row.oracle_rate!r} "
                  f"|diff|={row.deviation:.3e}")
    status = "PASS" if worst.deviation <= orc.tolerance_bits else "FAIL"
    print(f"oracle-check {status}: {len(rows)} comparisons, worst "
          f"|optimizer - oracle| = {worst.deviation:.3e} bits "
          f"(tolerance {orc.tolerance_bits:g}, block={worst.block_size}, "
          f"objective={worst.objective})")
    return 0 if status == "PASS" else 1


def cmd_default_config(args: argparse.Namespace) -> int:
    sys.stdout.write(ANNOTATED_DEFAULTS)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uwbrelay",
        description="Capacity bounds for wideband multipath relay channels.")
    parser.add_argument("--version", action="version",
                        version=f"uwbrelay {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH",
                        help="configuration file (flat section.key = value)")
    common.add_argument("--output-dir", metavar="DIR",
                        default=os.environ.get("UWBRELAY_OUTPUT_DIR", "."),
                        help="artifact directory (default: $UWBRELAY_OUTPUT_DIR or .)")
    common.add_argument("--seed", type=int, default=None,
                        help="override the configured master seed")
    common.add_argument("--bits-per-second", action="store_true",
                        help="scale rates by the bandwidth instead of per-sample")
    common.add_argument("--verbose", action="store_true",
                        help="progress and per-item detail on stderr")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("channel", parents=[common],
                       help="dump one seeded three-link channel draw")
    p.add_argument("--trial", type=int, default=0,
                   help="trial index of the draw (default 0)")
    p.set_defaults(func=cmd_channel)

    p = sub.add_parser("bounds", parents=[common],
                       help="evaluate every bound on one channel draw")
    p.add_argument("--trial", type=int, default=0,
                   help="trial index of the draw (default 0)")
    p.add_argument("--per-tone", action="store_true",
                   help="also write per-tone diagnostics")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("sweep-distance", parents=[common],
                       help="Monte Carlo bounds while moving the relay")
    p.set_defaults(func=cmd_sweep_distance)

    p = sub.add_parser("sweep-rho", parents=[common],
                       help="Monte Carlo upper bound per noise correlation")
    p.set_defaults(func=cmd_sweep_rho)

    p = sub.add_parser("oracle-check", parents=[common],
                       help="compare optimizer rates against exhaustive search")
    p.set_defaults(func=cmd_oracle_check)

    p = sub.add_parser("default-config", parents=[common],
                       help="print the annotated default configuration")
    p.set_defaults(func=cmd_default_config)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "output_dir", None):
        os.makedirs(args.output_dir, exist_ok=True)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"uwbrelay: configuration error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"uwbrelay: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
