"""Command-line front end: ``rbcom check|figure|sweep|ofdm``.

Exit status: 0 success, 2 usage, 3 configuration error, 4 unstable or
singular geometry, 5 no link (pump below threshold).
"""
from __future__ import annotations

import argparse
import contextlib
import io
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import (
    ConfigError,
    InvalidArgumentError,
    NoLinkError,
    SingularConfigurationError,
    UnstableResonatorError,
)
from .ofdm_sim import ber_waterfall
from .pipeline import FIGURES, Table, check_report, run_figure, run_ofdm, run_sweep
from .scenario import Scenario, apply_override, load_scenario, provenance_lines

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_UNSTABLE = 4
EXIT_NO_LINK = 5

CONFIG_DIR_ENV = "RBCOM_CONFIG_DIR"
DEFAULT_CONFIG_NAME = "default.conf"


def _resolve_config(path: str | None) -> Path | None:
    base = os.environ.get(CONFIG_DIR_ENV)
    if path is None:
        if base and (Path(base) / DEFAULT_CONFIG_NAME).is_file():
            return Path(base) / DEFAULT_CONFIG_NAME
        return None
    p = Path(path)
    if not p.is_absolute() and not p.exists() and base:
        p = Path(base) / p
    return p


def _scenario(args) -> Scenario:
    path = _resolve_config(args.config)
    sc = load_scenario(path) if path is not None else Scenario()
    for assignment in args.set or ():
        sc = apply_override(sc, assignment)
    return sc


def _snr_grid(text: str) -> np.ndarray:
    try:
        start, stop, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise InvalidArgumentError(f"--snr-db expects START:STOP:STEP, got {text!r}") from None
    if step <= 0 or stop < start:
        raise InvalidArgumentError("--snr-db needs STEP > 0 and STOP >= START")
    n = int(round((stop - start) / step)) + 1
    return np.round(start + step * np.arange(n), 10)


@contextlib.contextmanager
def _output(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
        return
    buf = io.StringIO()
    yield buf
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def _cmd_check(args) -> int:
    sc = _scenario(args)
    with _output(args.output) as out:
        out.write(check_report(sc))
    return EXIT_OK


def _cmd_figure(args) -> int:
    sc = _scenario(args)
    table = run_figure(args.name, sc, samples=args.samples)
    with _output(args.output) as out:
        table.write_csv(out)
    return EXIT_OK


def _cmd_sweep(args) -> int:
    sc = _scenario(args)
    if sc.sweep is None:
        raise ConfigError("the sweep command needs sweep.variable/start/stop/steps", "sweep.variable")
    table = run_sweep(sc, workers=args.workers)
    with _output(args.output) as out:
        table.write_csv(out)
    return EXIT_OK


def _cmd_ofdm(args) -> int:
    sc = _scenario(args)
    report = run_ofdm(sc, n_frames=args.frames, seed=args.seed, workers=args.workers)
    with _output(args.output) as out:
        for line in provenance_lines(sc):
            out.write(f"# {line}\n")
        out.write(report.as_text() + "\n")
    if args.waterfall:
        cfg = sc.ofdm_config()
        rows = ber_waterfall(cfg, _snr_grid(args.snr_db), n_frames=args.waterfall_frames,
                             seed=args.seed, workers=args.workers)
        table = Table("waterfall", ["snr [dB]", "ber []", "ber_theory []"], rows,
                      notes=["ofdm waterfall"] + provenance_lines(sc))
        with _output(args.waterfall) as out:
            table.write_csv(out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-c", "--config", help=f"scenario file (relative paths also tried under ${CONFIG_DIR_ENV})")
    common.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override one config setting, e.g. --set 'd = 8 m' (repeatable)")
    common.add_argument("-o", "--output", help="output file (default: stdout)")
    common.add_argument("--workers", type=int, default=1, help="worker threads")

    p = argparse.ArgumentParser(prog="rbcom", description="Resonant-beam link model and OFDM simulator.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", parents=[common], help="stability, loss budget and link report")
    c.set_defaults(func=_cmd_check)

    f = sub.add_parser("figure", parents=[common], help="CSV data behind a reference figure")
    f.add_argument("name", choices=sorted(FIGURES))
    f.add_argument("--samples", type=int, default=2048, help="points per beam profile (fig6, fig7)")
    f.set_defaults(func=_cmd_figure)

    s = sub.add_parser("sweep", parents=[common], help="pipeline outputs over the sweep.* grid")
    s.set_defaults(func=_cmd_sweep)

    o = sub.add_parser("ofdm", parents=[common], help="Monte-Carlo BER at the analytical SNR")
    o.add_argument("--seed", type=int, default=1)
    o.add_argument("--frames", type=int, default=None,
                   help="fixed frame count (default: run until 1e7 bits and 200 errors)")
    o.add_argument("--waterfall", metavar="CSV", help="also write a BER-vs-SNR CSV")
    o.add_argument("--snr-db", default="20:40:5", metavar="START:STOP:STEP",
                   help="waterfall SNR grid in dB (default %(default)s)")
    o.add_argument("--waterfall-frames", type=int, default=8, help="frames per waterfall point")
    o.set_defaults(func=_cmd_ofdm)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"rbcom: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (UnstableResonatorError, SingularConfigurationError) as exc:
        print(f"rbcom: unstable geometry: {exc}", file=sys.stderr)
        return EXIT_UNSTABLE
    except NoLinkError as exc:
        print(f"rbcom: no link: {exc}", file=sys.stderr)
        return EXIT_NO_LINK
    except InvalidArgumentError as exc:
        print(f"rbcom: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BrokenPipeError:
        # downstream reader closed early (e.g. piped into head)
        sys.stderr.close()
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
