"""Command-line interface.

    qdiffract scan --config FILE [--preset fig3|fig4] [--out PATH] [--svg PATH] [--log] [--threads N]
    qdiffract check
    qdiffract fraunhofer --config FILE --s-mm X --d-mm Y

With both ``--preset`` and ``--config`` the config lines are applied on top of
the preset.  Exit codes: 0 success, 1 validation failure, 2 numerical-check
failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
import warnings

from .config import ConfigError, FraunhoferWarning, fraunhofer_check, parse_config, preset_text
from .longitudinal import Dirac
from .theories import Theory

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL, EXIT_IO = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage, which would clash with the
    # numerical-failure code
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INVALID)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qdiffract", description="Wide-angle Fraunhofer diffraction predictions.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    scan = sub.add_parser("scan", help="evaluate an angle scan and write CSV / SVG")
    scan.add_argument("--config", help="key = value configuration file")
    scan.add_argument("--preset", choices=("fig3", "fig4"), help="start from a built-in configuration")
    scan.add_argument("--out", help="CSV path (default: config 'output', else stdout)")
    scan.add_argument("--svg", help="SVG plot path")
    scan.add_argument("--log", action="store_true", help="log10 intensity axis in the SVG")
    scan.add_argument("--threads", type=int, default=1, help="worker threads (output is identical)")

    sub.add_parser("check", help="run the numerical self-check suite")

    fr = sub.add_parser("fraunhofer", help="far-field criterion for the configured aperture")
    fr.add_argument("--config", required=True)
    fr.add_argument("--s-mm", type=float, required=True, help="source-to-aperture distance (mm)")
    fr.add_argument("--d-mm", type=float, required=True, help="aperture-to-detector distance (mm)")
    return parser


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _load_config(args):
    if not (args.config or getattr(args, "preset", None)):
        raise ConfigError(["either --config or --preset is required"])
    text = preset_text(args.preset) if getattr(args, "preset", None) else ""
    if args.config:
        text = "\n".join(t for t in (text, _read(args.config)) if t)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", FraunhoferWarning)
        cfg = parse_config(text)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    return cfg


def _cmd_scan(args) -> int:
    from .scan import csv_text, emit_csv, emit_svg, run_scan

    cfg = _load_config(args)
    result = run_scan(cfg, threads=args.threads)
    out = args.out or cfg.output
    if out:
        emit_csv(result, out)
    else:
        sys.stdout.write(csv_text(result))

    svg = args.svg or cfg.svg
    if svg:
        if Theory.QM in cfg.theories and not isinstance(cfg.filter, Dirac):
            # plot the filtered QM curve next to its sigma_z -> 0 limit
            companion = run_scan(dataclasses.replace(cfg, filter=Dirac(), theories=(Theory.QM,)))
            result.extras.append(("QM (Dirac)", companion.theta_x_deg, companion.intensity[Theory.QM]))
        emit_svg(result, svg, log_scale=args.log or cfg.log_scale,
                 title=f"lambda = {cfg.wavelength_nm:g} nm")

    if cfg.pdf_checks:
        from .checks import config_checks

        report = config_checks(cfg)
        print(report, file=sys.stderr)
        if not report.passed:
            return EXIT_NUMERICAL
    return EXIT_OK


def _cmd_check(args) -> int:
    from .checks import self_check

    report = self_check()
    print(report)
    print("all checks passed" if report.passed else "some checks FAILED")
    return EXIT_OK if report.passed else EXIT_NUMERICAL


def _cmd_fraunhofer(args) -> int:
    cfg = _load_config(args)
    try:
        rep = fraunhofer_check(cfg.shape, cfg.wavelength_um, args.s_mm, args.d_mm)
    except ValueError as exc:
        raise ConfigError([str(exc)]) from None
    print(f"Delta = {rep.delta_um:.6g} um")
    print(f"Delta^2/(lambda d) = {rep.ratio_detector:.4g}")
    print(f"Delta^2/(lambda s) = {rep.ratio_source:.4g}")
    print("FLAGGED: not in the Fraunhofer regime" if rep.flagged else "ok: Fraunhofer regime")
    return EXIT_OK


_COMMANDS = {"scan": _cmd_scan, "check": _cmd_check, "fraunhofer": _cmd_fraunhofer}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        for err in exc.errors:
            print(f"error: {err}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ArithmeticError, RuntimeError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
