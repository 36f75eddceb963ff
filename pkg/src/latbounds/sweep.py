"""Experiment sweeps: config parsing, evaluation over an SNR grid, and
CSV/JSON/plot-script emission.

Config files are INI-style text with one section per sweep.  Every section
describes one lattice, one channel parameterization, an SNR grid in dB, and
the set of targets to evaluate (bounds and/or simulation).  A second,
simulation-only lattice can ride along as ``lattice_alt`` (column
``sim_alt``), which is how the rotated/non-rotated comparison figures are
reproduced from a single section.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from configparser import ConfigParser
from dataclasses import dataclass, field, replace
from io import StringIO
from pathlib import Path

import numpy as np

from . import bounds as bnd
from .errors import ConfigError
from .lattice import (
    Constellation,
    a2_generator,
    load_generator,
    rotated_zn_generator,
    zn_generator,
)
from .sim import SimConfig, simulate_fep_finite, simulate_fep_infinite

BOUND_TARGETS = ("slb", "sub", "mslb", "msub")
ALL_TARGETS = BOUND_TARGETS + ("sim", "sim_alt")
WORKERS_ENV = "LATBOUNDS_WORKERS"

# fixed per-target offsets so each Monte Carlo bound gets its own key space
_MC_SEED_OFFSET = {"slb": 101, "sub": 102, "mslb": 103, "msub": 104}

_CANONICAL_KEYS = (
    "lattice", "lattice_alt", "rotation", "n", "k", "l", "m", "snr_db",
    "targets", "frames", "seed", "decode_window", "samples", "ci_level", "out",
)


@dataclass(frozen=True)
class SweepConfig:
    name: str
    lattice: str
    n: int
    k: int | None
    l: int
    m: float
    snr_db: tuple[float, ...]
    targets: tuple[str, ...]
    lattice_alt: str | None = None
    rotation: str = "cyclotomic"
    frames: int = 100_000
    seed: int = 0
    decode_window: int = 4
    samples: int = bnd.DEFAULT_MC_SAMPLES
    ci_level: float = 0.95
    out: str = ""

    def __post_init__(self):
        if not self.targets:
            raise ConfigError("targets must be non-empty", field="targets")
        for t in self.targets:
            if t not in ALL_TARGETS:
                raise ConfigError(f"unknown target {t!r}", field="targets")
        if len(self.snr_db) == 0:
            raise ConfigError("snr_db grid must be non-empty", field="snr_db")
        if any(b <= a for a, b in zip(self.snr_db, self.snr_db[1:])):
            raise ConfigError("snr_db grid must be strictly increasing", field="snr_db")
        if self.k is None and any(t in ("mslb", "msub") for t in self.targets):
            raise ConfigError("mslb/msub need a finite k", field="targets")
        if "sim_alt" in self.targets and not self.lattice_alt:
            raise ConfigError("target sim_alt needs lattice_alt", field="lattice_alt")
        if self.lattice not in ("zn", "rotated_zn", "a2") and not self.lattice.startswith("file:"):
            raise ConfigError(f"unknown lattice {self.lattice!r}", field="lattice")
        if self.lattice == "a2" and self.n != 2:
            raise ConfigError("the a2 lattice is two-dimensional", field="n")
        if self.n < 1:
            raise ConfigError(f"n must be >= 1, got {self.n}", field="n")
        if self.k is not None and self.k < 1:
            raise ConfigError(f"k must be >= 1 or 'infinite', got {self.k}", field="k")
        if self.l < 1:
            raise ConfigError(f"l must be >= 1, got {self.l}", field="l")
        if self.m < 0.5:
            raise ConfigError(f"m must be >= 0.5, got {self.m}", field="m")
        if self.frames < 1:
            raise ConfigError(f"frames must be >= 1, got {self.frames}", field="frames")
        if self.samples < 1000:
            raise ConfigError(f"samples must be >= 1000, got {self.samples}", field="samples")
        if not self.out:
            object.__setattr__(self, "out", self.name)


@dataclass
class TargetColumn:
    values: np.ndarray
    stderrs: np.ndarray
    method: str


@dataclass
class SweepResult:
    config: SweepConfig
    snr_db: np.ndarray
    columns: dict[str, TargetColumn] = field(default_factory=dict)


def _parse_snr(text: str) -> tuple[float, ...]:
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"snr range must be start:stop:step, got {text!r}",
                              field="snr_db")
        start, stop, step = (float(p) for p in parts)
        if step <= 0:
            raise ConfigError("snr step must be positive", field="snr_db")
        vals = []
        v = start
        while v <= stop + 1e-9:
            vals.append(round(v, 12))
            v += step
        return tuple(vals)
    return tuple(float(p) for p in text.split(",") if p.strip())


def parse_config(text: str) -> list[SweepConfig]:
    """Parse the INI-style sweep description into one config per section."""
    cp = ConfigParser()
    try:
        cp.read_string(text)
    except Exception as e:
        raise ConfigError(f"malformed config: {e}") from None
    if not cp.sections():
        raise ConfigError("config has no sweep sections")
    configs = []
    for section in cp.sections():
        s = cp[section]
        known = set(_CANONICAL_KEYS)
        for key in s:
            if key not in known:
                raise ConfigError(f"unknown key {key!r} in section {section!r}", field=key)

        def req(key):
            if key not in s:
                raise ConfigError(f"section {section!r} is missing {key!r}", field=key)
            return s[key]

        try:
            kval = req("k").strip().lower()
            cfg = SweepConfig(
                name=section,
                lattice=req("lattice").strip(),
                lattice_alt=s.get("lattice_alt", "").strip() or None,
                rotation=s.get("rotation", "cyclotomic").strip(),
                n=int(req("n")),
                k=None if kval in ("infinite", "inf") else int(kval),
                l=int(req("l")),
                m=float(req("m")),
                snr_db=_parse_snr(req("snr_db")),
                targets=tuple(t.strip() for t in req("targets").split(",") if t.strip()),
                frames=int(s.get("frames", "100000")),
                seed=int(s.get("seed", "0")),
                decode_window=int(s.get("decode_window", "4")),
                samples=int(s.get("samples", str(bnd.DEFAULT_MC_SAMPLES))),
                ci_level=float(s.get("ci_level", "0.95")),
                out=s.get("out", "").strip(),
            )
        except ConfigError:
            raise
        except ValueError as e:
            raise ConfigError(f"section {section!r}: {e}") from None
        configs.append(cfg)
    return configs


def serialize_config(configs: list[SweepConfig]) -> str:
    """Canonical text form; parse(serialize(parse(t))) == parse(t)."""
    out = StringIO()
    for cfg in configs:
        out.write(f"[{cfg.name}]\n")
        vals = {
            "lattice": cfg.lattice,
            "lattice_alt": cfg.lattice_alt or "",
            "rotation": cfg.rotation,
            "n": str(cfg.n),
            "k": "infinite" if cfg.k is None else str(cfg.k),
            "l": str(cfg.l),
            "m": f"{cfg.m:.17g}",
            "snr_db": ",".join(f"{v:.17g}" for v in cfg.snr_db),
            "targets": ",".join(cfg.targets),
            "frames": str(cfg.frames),
            "seed": str(cfg.seed),
            "decode_window": str(cfg.decode_window),
            "samples": str(cfg.samples),
            "ci_level": f"{cfg.ci_level:.17g}",
            "out": cfg.out,
        }
        for key in _CANONICAL_KEYS:
            if key == "lattice_alt" and not vals[key]:
                continue
            out.write(f"{key} = {vals[key]}\n")
        out.write("\n")
    return out.getvalue()


def build_constellation(lattice: str, n: int, k: int | None,
                        rotation: str = "cyclotomic") -> Constellation:
    if lattice == "zn":
        gen = zn_generator(n)
    elif lattice == "rotated_zn":
        gen = rotated_zn_generator(n, rotation)
    elif lattice == "a2":
        gen = a2_generator()
    elif lattice.startswith("file:"):
        gen = load_generator(lattice[5:])
    else:
        raise ConfigError(f"unknown lattice {lattice!r}", field="lattice")
    if gen.n != n:
        raise ConfigError(f"lattice dimension {gen.n} != configured n={n}", field="n")
    return Constellation(generator=gen, k_per_dim=k)


def _evaluate_point(cfg: SweepConfig, const: Constellation,
                    alt: Constellation | None, params_proto: bnd.BoundParams,
                    snr_db: float) -> dict[str, tuple[float, float, str]]:
    rho = 10.0 ** (snr_db / 10.0)
    params = replace(params_proto, rho=rho)
    out = {}
    for target in cfg.targets:
        if target in BOUND_TARGETS:
            fn = getattr(bnd, target)
            bv = fn(params, samples=cfg.samples,
                    seed=cfg.seed + _MC_SEED_OFFSET[target])
            out[target] = (bv.value, bv.stderr, bv.method)
        else:
            lat = const if target == "sim" else alt
            sim_cfg = SimConfig(frames=cfg.frames, seed=cfg.seed,
                                decode_window=cfg.decode_window,
                                ci_level=cfg.ci_level)
            ch = _channel_for(cfg, rho)
            if lat.is_finite:
                est = simulate_fep_finite(lat, ch, sim_cfg)
            else:
                est = simulate_fep_infinite(lat, ch, sim_cfg)
            out[target] = (est.fep, est.stderr, "mc")
    return out


def _channel_for(cfg: SweepConfig, rho: float):
    from .channel import ChannelParams

    return ChannelParams(m=cfg.m, rho=rho, n=cfg.n, l=cfg.l)


def run_sweep(cfg: SweepConfig) -> SweepResult:
    """Evaluate every target at every grid point; deterministic under a fixed
    seed, and grid points may run on parallel workers (LATBOUNDS_WORKERS)."""
    const = build_constellation(cfg.lattice, cfg.n, cfg.k, cfg.rotation)
    alt = None
    if cfg.lattice_alt:
        alt = build_constellation(cfg.lattice_alt, cfg.n, cfg.k, cfg.rotation)
    params_proto = bnd.BoundParams(
        n=cfg.n, l=cfg.l, m=cfg.m, rho=1.0,
        d_min=const.d_min, w=const.w, k_per_dim=cfg.k,
    )
    workers = max(1, int(os.environ.get(WORKERS_ENV, "1")))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(
                lambda s: _evaluate_point(cfg, const, alt, params_proto, s),
                cfg.snr_db))
    else:
        rows = [_evaluate_point(cfg, const, alt, params_proto, s) for s in cfg.snr_db]

    result = SweepResult(config=cfg, snr_db=np.array(cfg.snr_db))
    for target in cfg.targets:
        vals = np.array([r[target][0] for r in rows])
        errs = np.array([r[target][1] for r in rows])
        result.columns[target] = TargetColumn(vals, errs, rows[0][target][2])
    return result


def emit_csv(result: SweepResult, path) -> None:
    """Header ``snr_db,<target>,<target>_stderr,...``, one row per grid
    point, 17 significant digits (lossless float64 round-trip)."""
    targets = list(result.columns)
    header = "snr_db," + ",".join(f"{t},{t}_stderr" for t in targets)
    lines = [header]
    for i, snr in enumerate(result.snr_db):
        cells = [f"{snr:.17g}"]
        for t in targets:
            col = result.columns[t]
            cells.append(f"{col.values[i]:.17g}")
            cells.append(f"{col.stderrs[i]:.17g}")
        lines.append(",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n")


def read_csv(path) -> tuple[np.ndarray, dict[str, np.ndarray]]:
    """Inverse of emit_csv, for round-trip checks and downstream analysis."""
    lines = Path(path).read_text().strip().splitlines()
    header = lines[0].split(",")
    data = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
    cols = {name: data[:, i] for i, name in enumerate(header)}
    return cols.pop("snr_db"), cols


def emit_json(result: SweepResult, path) -> None:
    doc = {
        "config": json.loads(json.dumps({
            **{k: getattr(result.config, k) for k in (
                "name", "lattice", "lattice_alt", "rotation", "n", "l", "m",
                "frames", "seed", "decode_window", "samples", "ci_level", "out")},
            "k": result.config.k if result.config.k is not None else "infinite",
            "targets": list(result.config.targets),
        })),
        "methods": {t: c.method for t, c in result.columns.items()},
        "rows": [
            {
                "snr_db": float(result.snr_db[i]),
                **{t: {"value": float(c.values[i]), "stderr": float(c.stderrs[i])}
                   for t, c in result.columns.items()},
            }
            for i in range(len(result.snr_db))
        ],
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def emit_plot_script(result: SweepResult, csv_path, path) -> None:
    """Standalone gnuplot script drawing FEP versus SNR on a log-y axis."""
    targets = list(result.columns)
    plots = []
    for i, t in enumerate(targets):
        col = 2 + 2 * i
        style = "linespoints" if t.startswith("sim") else "lines"
        plots.append(f"'{csv_path}' using 1:{col} with {style} title '{t}'")
    text = "\n".join(
        [
            "set datafile separator ','",
            "set logscale y",
            "set xlabel 'SNR (dB)'",
            "set ylabel 'frame error probability'",
            "set grid",
            f"set title '{result.config.name}'",
            "plot " + ", \\\n     ".join(plots),
            "",
        ]
    )
    Path(path).write_text(text)
