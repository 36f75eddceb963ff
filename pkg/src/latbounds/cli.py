"""Command-line entry point.

``latbounds sweep CONFIG`` runs every section of a sweep config and writes
<out>.csv and <out>.json per section (plus <out>.gp with --plot).  CONFIG is
a path, or the name of a bundled figure config (fig1 .. fig8).  Exit code is
0 only if every target of every section evaluated cleanly; otherwise a
machine-readable JSON error record goes to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from importlib import resources
from pathlib import Path

from .errors import ConfigError, LatboundsError
from .sweep import emit_csv, emit_json, emit_plot_script, parse_config, run_sweep


def bundled_config_names() -> list[str]:
    root = resources.files("latbounds") / "configs"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".cfg"))


def _load_config_text(spec: str) -> str:
    path = Path(spec)
    if path.exists():
        return path.read_text()
    bundled = resources.files("latbounds") / "configs" / f"{spec}.cfg"
    if bundled.is_file():
        return bundled.read_text()
    raise ConfigError(f"no such config file or bundled name: {spec!r}", field="config")


def _error_record(exc: Exception) -> str:
    rec = {"error": {"type": type(exc).__name__, "message": str(exc)}}
    if isinstance(exc, ConfigError) and exc.field:
        rec["error"]["field"] = exc.field
    return json.dumps(rec)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="latbounds",
                                     description="lattice FEP bounds and simulation sweeps")
    sub = parser.add_subparsers(dest="command", required=True)
    sw = sub.add_parser("sweep", help="run a sweep config")
    sw.add_argument("config", help="config path or bundled name (fig1..fig8)")
    sw.add_argument("--seed", type=int, default=None, help="override every section's seed")
    sw.add_argument("--frames", type=int, default=None, help="override simulation frame count")
    sw.add_argument("--samples", type=int, default=None, help="override Monte Carlo sample count")
    sw.add_argument("--targets", default=None, help="override target list (comma separated)")
    sw.add_argument("--out", default="", help="output prefix prepended to section outputs")
    sw.add_argument("--plot", action="store_true", help="also emit a gnuplot script per section")
    args = parser.parse_args(argv)

    try:
        text = _load_config_text(args.config)
        configs = parse_config(text)
        for cfg in configs:
            overrides = {}
            if args.seed is not None:
                overrides["seed"] = args.seed
            if args.frames is not None:
                overrides["frames"] = args.frames
            if args.samples is not None:
                overrides["samples"] = args.samples
            if args.targets is not None:
                overrides["targets"] = tuple(t.strip() for t in args.targets.split(",") if t.strip())
            if overrides:
                cfg = replace(cfg, **overrides)
            prefix = Path(args.out + cfg.out) if args.out else Path(cfg.out)
            if prefix.parent != Path("."):
                prefix.parent.mkdir(parents=True, exist_ok=True)
            print(f"[{cfg.name}] {len(cfg.snr_db)} grid points, targets: {', '.join(cfg.targets)}",
                  flush=True)
            result = run_sweep(cfg)
            emit_csv(result, f"{prefix}.csv")
            emit_json(result, f"{prefix}.json")
            if args.plot:
                emit_plot_script(result, f"{prefix}.csv", f"{prefix}.gp")
            print(f"[{cfg.name}] wrote {prefix}.csv", flush=True)
        return 0
    except LatboundsError as exc:
        print(_error_record(exc), file=sys.stderr)
        return 1
    except OSError as exc:
        print(_error_record(exc), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
