"""Command-line interface.

Subcommands: ``run`` (full Monte Carlo sweep), ``theory-curve``
(white-anomaly metric curves plus the critical-distortion root),
``rd-curve`` (analytic and quantized-MI rates), ``concentration``
(anomaly concentration over dimensions), and ``auc`` (score a CSV of
labelled detector scores).

Every option can also come from a config file of flat ``key = value``
lines with the same names as the flags; explicit flags win.  CSV goes to
--out, or stdout when --out is omitted.
"""

from __future__ import annotations

import argparse
import sys

from .detectors import auc as compute_auc
from .detectors import psi as fold_auc
from .experiment import (
    CONCENTRATION_HEADER,
    DEFAULT_DIMS,
    DEFAULT_GRID,
    DEFAULT_LOCALIZATIONS,
    DEFAULT_RD_GRID,
    RD_HEADER,
    RUN_HEADER,
    THEORY_HEADER,
    ExperimentConfig,
    emit_concentration,
    emit_rd_curves,
    emit_theory_curves,
    render_csv,
    run_experiment,
    run_rows,
)

_CONFIG_KEYS = frozenset(
    ["n", "seed", "grid", "loc", "compressor", "detector", "out", "anomalies", "ok", "ko", "workers"]
)


def _parse_config(path: str) -> dict:
    settings = {}
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#") or line.startswith(";"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
            key, value = line.split("=", 1)
            key = key.strip().lower()
            if key not in _CONFIG_KEYS:
                raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
            settings[key] = value.strip()
    return settings


def _merge(args: argparse.Namespace) -> dict:
    settings = _parse_config(args.config) if getattr(args, "config", None) else {}
    for key in _CONFIG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    return settings


def _floats(text) -> tuple:
    return tuple(float(part) for part in str(text).split(",") if part.strip())


def _ints(text) -> tuple:
    return tuple(int(part) for part in str(text).split(",") if part.strip())


def _names(text) -> tuple:
    return tuple(part.strip().lower() for part in str(text).split(",") if part.strip())


def _get(settings: dict, key: str, convert, default):
    if key in settings:
        return convert(settings[key])
    return default


def _output(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _cmd_run(settings: dict) -> int:
    config = ExperimentConfig(
        n=_get(settings, "n", int, 32),
        localizations=_get(settings, "loc", _floats, DEFAULT_LOCALIZATIONS),
        distortion_grid=_get(settings, "grid", _floats, DEFAULT_GRID),
        compressors=_get(settings, "compressor", _names, ("rdc", "pcc")),
        detectors=_get(settings, "detector", _names, ("ld", "npd")),
        n_anomalies=_get(settings, "anomalies", int, 100),
        n_ok=_get(settings, "ok", int, 1000),
        n_ko=_get(settings, "ko", int, 1000),
        master_seed=_get(settings, "seed", int, 0),
        workers=_get(settings, "workers", int, 1),
    )
    records = run_experiment(config)
    _output(render_csv(RUN_HEADER, run_rows(records), config.master_seed), settings.get("out"))
    return 0


def _cmd_theory_curve(settings: dict) -> int:
    seed = _get(settings, "seed", int, 0)
    rows = emit_theory_curves(
        n=_get(settings, "n", int, 32),
        localizations=_get(settings, "loc", _floats, DEFAULT_LOCALIZATIONS),
        grid=_get(settings, "grid", _floats, DEFAULT_GRID),
    )
    _output(render_csv(THEORY_HEADER, rows, seed), settings.get("out"))
    return 0


def _cmd_rd_curve(settings: dict) -> int:
    seed = _get(settings, "seed", int, 0)
    rows = emit_rd_curves(
        n=_get(settings, "n", int, 32),
        localizations=_get(settings, "loc", _floats, DEFAULT_LOCALIZATIONS),
        grid=_get(settings, "grid", _floats, DEFAULT_RD_GRID),
        seed=seed,
    )
    _output(render_csv(RD_HEADER, rows, seed), settings.get("out"))
    return 0


def _cmd_concentration(settings: dict) -> int:
    seed = _get(settings, "seed", int, 0)
    rows = emit_concentration(
        dims=_get(settings, "n", _ints, DEFAULT_DIMS),
        population=_get(settings, "anomalies", int, 200),
        seed=seed,
    )
    _output(render_csv(CONCENTRATION_HEADER, rows, seed), settings.get("out"))
    return 0


def _read_scores(path: str) -> tuple[list, list]:
    """Score file: CSV rows 'score,label' with label ok/ko (or 0/1)."""
    ok, ko = [], []
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",")
            if len(parts) < 2:
                raise ValueError(f"{path}:{lineno}: expected 'score,label'")
            try:
                score = float(parts[0])
            except ValueError:
                continue  # header row
            label = parts[1].strip().lower()
            if label in ("ok", "0"):
                ok.append(score)
            elif label in ("ko", "1"):
                ko.append(score)
            else:
                raise ValueError(f"{path}:{lineno}: label must be ok/ko (or 0/1), got {label!r}")
    if not ok or not ko:
        raise ValueError(f"{path}: need at least one ok and one ko score")
    return ok, ko


def _cmd_auc(args: argparse.Namespace) -> int:
    ok, ko = _read_scores(args.scores)
    value = compute_auc(ok, ko)
    print(f"auc={value:.12g} psi={fold_auc(value):.12g}")
    return 0


def _add_common(sub: argparse.ArgumentParser, *flags: str) -> None:
    spec = {
        "n": dict(help="dimension (comma list of dimensions for 'concentration')"),
        "seed": dict(help="master seed (default 0)"),
        "grid": dict(help="comma list of normalized distortions d"),
        "loc": dict(help="comma list of localizations"),
        "compressor": dict(help="comma subset of rdc,pcc"),
        "detector": dict(help="comma subset of ld,npd"),
        "out": dict(help="output CSV path (stdout when omitted)"),
        "anomalies": dict(help="anomaly count ('run') or population ('concentration')"),
        "ok": dict(help="normal instances per anomaly"),
        "ko": dict(help="anomalous instances per anomaly"),
        "workers": dict(help="worker threads (default 1)"),
        "config": dict(help="flat key=value config file; flags override it"),
    }
    for flag in flags:
        sub.add_argument(f"--{flag}", **spec[flag])


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="anodist",
        description="Detectability of Gaussian anomalies under lossy compression.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    run_p = subparsers.add_parser("run", help="full Monte Carlo sweep")
    _add_common(run_p, "n", "seed", "grid", "loc", "compressor", "detector", "out",
                "anomalies", "ok", "ko", "workers", "config")

    theory_p = subparsers.add_parser("theory-curve", help="white-anomaly metric curves")
    _add_common(theory_p, "n", "seed", "grid", "loc", "out", "config")

    rd_p = subparsers.add_parser("rd-curve", help="rate curves per compressor")
    _add_common(rd_p, "n", "seed", "grid", "loc", "out", "config")

    conc_p = subparsers.add_parser("concentration", help="anomaly concentration statistics")
    _add_common(conc_p, "n", "seed", "anomalies", "out", "config")

    auc_p = subparsers.add_parser("auc", help="AUC/psi of a labelled score file")
    auc_p.add_argument("scores", help="CSV of 'score,label' rows, label ok/ko (or 0/1)")

    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(_merge(args))
        if args.command == "theory-curve":
            return _cmd_theory_curve(_merge(args))
        if args.command == "rd-curve":
            return _cmd_rd_curve(_merge(args))
        if args.command == "concentration":
            return _cmd_concentration(_merge(args))
        return _cmd_auc(args)
    except (ValueError, RuntimeError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
