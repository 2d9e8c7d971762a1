"""The four canned experiments behind the command line, and their config.

Each experiment produces CSV rows (and optionally an SVG plot):

  fig2a      eavesdropper state-identification bounds vs M
  fig2b      eavesdropper bit error under the alternating scheme vs M
  ber-sweep  receiver BER (analytic and Monte-Carlo) plus eavesdropper
             bounds across link distances, with tap fraction = channel
             transmission
  eve-detect paired clean/intercept-resend runs and the intrusion flag

Configuration comes from per-experiment defaults, overridden by a flat
key=value file, overridden by command-line flags.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Mapping

from .quantum_core import build_grid
from .detection import (
    neighbor_lower_bound,
    poisson_threshold_receiver,
    pure_guess_error,
    srm_error,
    helstrom_mixed_binary,
)
from .protocol import BitAssignment, PairAssignment, ProtocolConfig, eve_density_operators
from .simulation import ChannelConfig, OpaqueEve, amplitude_transmission, run_protocol
from .svgplot import PlotSpec, emit_svg

__all__ = [
    "EXPERIMENTS",
    "ConfigError",
    "ExperimentConfig",
    "parse_config",
    "cmd_fig2a",
    "cmd_fig2b",
    "cmd_ber_sweep",
    "cmd_eve_detect",
    "write_csv",
    "run_experiment",
]

EXPERIMENTS = ("fig2a", "fig2b", "ber-sweep", "eve-detect")


class ConfigError(ValueError):
    """Malformed or inconsistent experiment configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    alpha_max: float
    m_list: tuple[int, ...]
    distances: tuple[float, ...]  # km
    eta: float  # eavesdropper amplitude fraction for the fig2 constellations
    n_symbols: int
    seed: int
    out: str
    emit_svg: bool = False

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(
                f"unknown experiment {self.experiment!r}; expected one of "
                + ", ".join(EXPERIMENTS)
            )
        if not self.m_list:
            raise ConfigError("m-list must not be empty")
        if not self.distances:
            raise ConfigError("distances must not be empty")
        if not self.alpha_max > 0:
            raise ConfigError(f"alpha-max must be positive, got {self.alpha_max}")
        if not 0 < self.eta <= 1:
            raise ConfigError(f"eta must lie in (0, 1], got {self.eta}")
        if self.n_symbols < 1:
            raise ConfigError(f"symbols must be >= 1, got {self.n_symbols}")


# fig2 experiments look at quantum-limited constellations; the link sweeps
# use bright pulses sized so the clean link stays under the intrusion
# threshold out to 200 km.
_DEFAULTS: dict[str, dict] = {
    "fig2a": dict(alpha_max=4.0, m_list=(1, 2, 4, 8, 16, 32), eta=1.0),
    "fig2b": dict(alpha_max=4.0, m_list=(1, 2, 4, 8, 16, 32, 64), eta=1.0),
    "ber-sweep": dict(alpha_max=250.0, m_list=(4,)),
    "eve-detect": dict(alpha_max=250.0, m_list=(4,)),
}
_COMMON_DEFAULTS = dict(
    distances=(10.0, 50.0, 100.0, 150.0, 200.0),
    eta=0.1,
    n_symbols=100_000,
    seed=1,
    emit_svg=False,
)

_KEYS = (
    "experiment",
    "alpha_max",
    "m_list",
    "distances",
    "eta",
    "symbols",
    "seed",
    "out",
    "svg",
)


def _parse_scalar(key: str, value: str, kind):
    try:
        return kind(value)
    except ValueError:
        raise ConfigError(f"invalid value for {key!r}: {value!r}") from None


def _parse_list(key: str, value, kind) -> tuple:
    if isinstance(value, (list, tuple)):
        return tuple(kind(v) for v in value)
    items = [part.strip() for part in str(value).split(",") if part.strip()]
    return tuple(_parse_scalar(key, item, kind) for item in items)


def _parse_bool(key: str, value) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"invalid value for {key!r}: {value!r}")


def read_config_file(path: str) -> dict[str, str]:
    """Parse a flat key=value config file (# starts a comment)."""
    values: dict[str, str] = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
        values[key] = value
    return values


def parse_config(
    config_path: str | None = None, overrides: Mapping[str, object] | None = None
) -> ExperimentConfig:
    """Merge defaults, an optional config file, and flag overrides.

    Overrides (flags) win over file values, which win over the experiment's
    defaults.  The experiment name itself may come from either source.
    """
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    file_values = read_config_file(config_path) if config_path else {}

    experiment = overrides.get("experiment") or file_values.get("experiment")
    if not experiment:
        raise ConfigError(
            "no experiment specified; give one of " + ", ".join(EXPERIMENTS)
        )
    experiment = str(experiment)
    if experiment not in EXPERIMENTS:
        raise ConfigError(
            f"unknown experiment {experiment!r}; expected one of " + ", ".join(EXPERIMENTS)
        )

    merged = dict(_COMMON_DEFAULTS)
    merged.update(_DEFAULTS[experiment])
    merged["out"] = f"{experiment}.csv"

    converters = {
        "alpha_max": lambda k, v: _parse_scalar(k, str(v), float),
        "m_list": lambda k, v: _parse_list(k, v, int),
        "distances": lambda k, v: _parse_list(k, v, float),
        "eta": lambda k, v: _parse_scalar(k, str(v), float),
        "symbols": lambda k, v: _parse_scalar(k, str(v), int),
        "seed": lambda k, v: _parse_scalar(k, str(v), int),
        "out": lambda k, v: str(v),
        "svg": lambda k, v: _parse_bool(k, v),
    }
    renames = {"symbols": "n_symbols", "svg": "emit_svg"}
    for source in (file_values, overrides):
        for key, value in source.items():
            if key == "experiment":
                continue
            merged[renames.get(key, key)] = converters[key](key, value)

    return ExperimentConfig(experiment=experiment, **merged)


def cmd_fig2a(cfg: ExperimentConfig) -> list[dict]:
    """State-identification error bounds for the 2M-level constellation.

    Columns: the closest-pair lower bound, the square-root-measurement upper
    bound, and pure guessing (2M-1)/(2M), per M, at amplitude fraction eta.
    """
    rows = []
    for m in sorted(cfg.m_list):
        grid = build_grid(cfg.alpha_max, m)
        rows.append(
            {
                "m": m,
                "n_states": 2 * m,
                "neighbor_lower": neighbor_lower_bound(grid, cfg.eta).error_probability,
                "srm_upper": srm_error(grid.states(cfg.eta)).error_probability,
                "pure_guess": pure_guess_error(2 * m).error_probability,
            }
        )
    return rows


def cmd_fig2b(cfg: ExperimentConfig) -> list[dict]:
    """Eavesdropper bit error under the alternating (no-overlap) scheme."""
    rows = []
    for m in sorted(cfg.m_list):
        assignment = PairAssignment.from_grid(build_grid(cfg.alpha_max, m))
        rho1, rho0 = eve_density_operators(
            assignment, BitAssignment.ALTERNATING_NO_OVERLAP, cfg.eta
        )
        rows.append(
            {
                "m": m,
                "helstrom_mixed_error": helstrom_mixed_binary(rho1, rho0).error_probability,
            }
        )
    return rows


def _analytic_bob_ber(assignment: PairAssignment, kappa: float, dark: float) -> float:
    levels = assignment.grid.levels
    total = 0.0
    for lo, hi in assignment.pairs:
        _, result = poisson_threshold_receiver(
            (kappa * levels[lo]) ** 2, (kappa * levels[hi]) ** 2, dark
        )
        total += result.error_probability
    return total / assignment.n_pairs


def cmd_ber_sweep(cfg: ExperimentConfig) -> list[dict]:
    """Clean-link BER and eavesdropper bounds across distances.

    The eavesdropper columns assume a tap with amplitude fraction equal to
    the channel transmission (equal factors for receiver and tap).
    """
    m = cfg.m_list[0]
    pcfg = ProtocolConfig(alpha_max=cfg.alpha_max, m=m)
    rows = []
    for i, distance in enumerate(cfg.distances):
        ccfg = ChannelConfig(fiber_length_km=distance)
        kappa = amplitude_transmission(ccfg)
        result = run_protocol(
            pcfg, ccfg, eve=None, n_symbols=cfg.n_symbols, seed=cfg.seed + i
        )
        rows.append(
            {
                "distance_km": distance,
                "kappa": kappa,
                "bob_ber_analytic": _analytic_bob_ber(pcfg.assignment(), kappa, ccfg.dark_mean),
                "bob_ber_mc": result.bob_ber,
                "eve_bit_error": result.eve_bit_error_bound,
                "eve_state_lower": result.eve_state_id_bounds[0],
                "eve_state_srm": result.eve_state_id_bounds[1],
            }
        )
    return rows


def cmd_eve_detect(cfg: ExperimentConfig) -> list[dict]:
    """Paired clean vs intercept-resend runs and the intrusion flag."""
    m = cfg.m_list[0]
    pcfg = ProtocolConfig(alpha_max=cfg.alpha_max, m=m)
    rows = []
    for i, distance in enumerate(cfg.distances):
        ccfg = ChannelConfig(fiber_length_km=distance)
        seed = cfg.seed + i
        clean = run_protocol(pcfg, ccfg, eve=None, n_symbols=cfg.n_symbols, seed=seed)
        attacked = run_protocol(
            pcfg, ccfg, eve=OpaqueEve(), n_symbols=cfg.n_symbols, seed=seed
        )
        rows.append(
            {
                "distance_km": distance,
                "kappa": amplitude_transmission(ccfg),
                "ber_no_eve": clean.bob_ber,
                "ber_opaque": attacked.bob_ber,
                "detected": int(attacked.eve_detected),
            }
        )
    return rows


_COMMANDS = {
    "fig2a": cmd_fig2a,
    "fig2b": cmd_fig2b,
    "ber-sweep": cmd_ber_sweep,
    "eve-detect": cmd_eve_detect,
}

_PLOTS = {
    "fig2a": PlotSpec(
        title="State-identification error bounds",
        x_label="number of level pairs M",
        y_label="error probability",
        x_column="m",
        y_columns=("neighbor_lower", "srm_upper", "pure_guess"),
        log_x=True,
    ),
    "fig2b": PlotSpec(
        title="Bit error, alternating level labels",
        x_label="number of level pairs M",
        y_label="error probability",
        x_column="m",
        y_columns=("helstrom_mixed_error",),
        log_x=True,
    ),
    "ber-sweep": PlotSpec(
        title="Link BER vs distance",
        x_label="distance (km)",
        y_label="probability",
        x_column="distance_km",
        y_columns=("bob_ber_analytic", "bob_ber_mc", "eve_bit_error"),
    ),
    "eve-detect": PlotSpec(
        title="Intrusion detection",
        x_label="distance (km)",
        y_label="receiver BER",
        x_column="distance_km",
        y_columns=("ber_no_eve", "ber_opaque"),
    ),
}


def write_csv(path: str, rows: Iterable[dict]) -> None:
    """Write rows as comma-separated values, LF endings, full float precision."""
    rows = list(rows)
    if not rows:
        raise ValueError("no rows to write")
    try:
        with open(path, "w", newline="") as handle:
            writer = csv.DictWriter(handle, fieldnames=list(rows[0]), lineterminator="\n")
            writer.writeheader()
            for row in rows:
                writer.writerow({k: _format_value(v) for k, v in row.items()})
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc


def _format_value(value) -> str:
    # str(float) is the shortest round-trip representation
    return str(float(value)) if isinstance(value, float) else str(value)


def run_experiment(cfg: ExperimentConfig) -> list[dict]:
    """Run the configured experiment, write its CSV (and SVG), return rows."""
    rows = _COMMANDS[cfg.experiment](cfg)
    write_csv(cfg.out, rows)
    if cfg.emit_svg:
        svg_path = str(Path(cfg.out).with_suffix(".svg"))
        try:
            Path(svg_path).write_text(emit_svg(rows, _PLOTS[cfg.experiment]))
        except OSError as exc:
            raise OSError(f"cannot write SVG to {svg_path}: {exc}") from exc
    return rows
