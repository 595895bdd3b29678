"""Declarative run configuration.

Config files use flat ``key = value`` pairs under bracketed section headers
(INI syntax, ``#`` comments).  Unknown keys and unknown sections are hard
errors so typos cannot silently fall back to defaults.  The [circuit]
section accepts either the inverse-ratio style used throughout the device
literature (``wp_over_e_l`` etc., with E_CJ slaved to E_J) or raw energies.
See the README for the full grammar.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .params import CircuitParams, DisorderParams

__all__ = ["RunConfig", "ConfigError", "parse_config", "load_config", "MODES"]

MODES = (
    "spectrum",
    "flux-sweep",
    "dmax-grid",
    "ej-optimize",
    "disorder-sweep",
    "dispersive",
    "wavefunction-export",
)

_RUN_KEYS = {"mode", "k", "quality", "tol", "seed", "workers", "refined", "levels"}
_CIRCUIT_RATIO_KEYS = {"wp_over_e_l", "wp_over_e_c_sigma", "wp_over_e_j"}
_CIRCUIT_RAW_KEYS = {"e_j", "e_l", "e_c_sigma", "e_cj", "e_c"}
_CIRCUIT_KEYS = _CIRCUIT_RATIO_KEYS | _CIRCUIT_RAW_KEYS | {"phi_ext"}
_DISORDER_KEYS = {"delta_e_j", "delta_c_j_rel", "delta_c_rel", "delta_e_l"}
_SWEEP_KEYS = {
    "values", "start", "stop", "count", "axis",
    "e_l_values", "e_c_sigma_values",
    "e_l_start", "e_l_stop", "e_l_count",
    "e_c_sigma_start", "e_c_sigma_stop", "e_c_sigma_count",
}
_SECTION_KEYS = {
    "run": _RUN_KEYS,
    "circuit": _CIRCUIT_KEYS,
    "disorder": _DISORDER_KEYS,
    "sweep": _SWEEP_KEYS,
}

_SWEEP_MODES = {"flux-sweep", "dmax-grid", "disorder-sweep"}


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration."""


@dataclass
class RunConfig:
    """Validated description of one batch run."""

    mode: str
    params: CircuitParams
    disorder: DisorderParams = field(default_factory=DisorderParams)
    quality: str = "standard"
    k: int = 6
    tol: float = 1e-10
    seed: int = 1234
    workers: int = 1
    refined: bool = False
    levels: tuple = (0,)
    flux_values: tuple = ()
    disorder_axis: str = "delta_e_j"
    disorder_values: tuple = ()
    e_l_values: tuple = ()
    e_c_sigma_values: tuple = ()


def load_config(path) -> RunConfig:
    return parse_config(Path(path).read_text())


def parse_config(text: str) -> RunConfig:
    """Parse and validate a config; raises :class:`ConfigError` on any
    unknown key, malformed value, or missing requirement."""
    parser = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=("#",), strict=True
    )
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config parse error: {exc}") from exc

    for section in parser.sections():
        if section not in _SECTION_KEYS:
            raise ConfigError(f"unknown section [{section}]")
        for key in parser[section]:
            if key not in _SECTION_KEYS[section]:
                raise ConfigError(f"unknown key '{key}' in section [{section}]")

    if not parser.has_section("run") or "mode" not in parser["run"]:
        raise ConfigError("missing required key 'mode' in section [run]")
    run = parser["run"]
    mode = run["mode"].strip()
    if mode not in MODES:
        raise ConfigError(f"unknown mode '{mode}'; expected one of {MODES}")

    quality = run.get("quality", "standard").strip()
    if quality not in ("coarse", "standard", "fine"):
        raise ConfigError(f"unknown quality '{quality}'")
    k = _get_int(run, "k", default=6)
    tol = _get_float(run, "tol", default=1e-10)
    seed = _get_int(run, "seed", default=1234)
    workers = _get_int(run, "workers", default=1)
    refined = _get_bool(run, "refined", default=False)
    levels = tuple(int(v) for v in _get_float_list(run, "levels", default=(0.0,)))
    if tol <= 0.0:
        raise ConfigError(f"tol must be positive, got {tol}")
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}")
    if workers < 1:
        raise ConfigError(f"workers must be >= 1, got {workers}")
    if mode != "wavefunction-export" and k < 3:
        raise ConfigError(f"mode '{mode}' needs k >= 3 to form the "
                          f"degeneracy metric, got k = {k}")
    if mode == "wavefunction-export":
        if any(lv < 0 for lv in levels):
            raise ConfigError("levels must be non-negative")
        if max(levels) >= k:
            raise ConfigError(f"levels {levels} out of range for k = {k}")

    params = _parse_circuit(parser)
    disorder = _parse_disorder(parser)

    cfg = RunConfig(
        mode=mode, params=params, disorder=disorder, quality=quality, k=k,
        tol=tol, seed=seed, workers=workers, refined=refined, levels=levels,
    )
    _parse_sweep(parser, cfg)
    return cfg


def _parse_circuit(parser) -> CircuitParams:
    if not parser.has_section("circuit"):
        raise ConfigError("missing required section [circuit]")
    sec = parser["circuit"]
    phi_ext = _get_float(sec, "phi_ext", default=0.0)
    has_ratio = _CIRCUIT_RATIO_KEYS & set(sec)
    has_raw = _CIRCUIT_RAW_KEYS & set(sec)
    if has_ratio and has_raw:
        raise ConfigError("[circuit] mixes ratio keys and raw-energy keys; "
                          "use one style")
    try:
        if has_ratio:
            missing = _CIRCUIT_RATIO_KEYS - set(sec)
            if missing:
                raise ConfigError(
                    f"[circuit] ratio style needs {sorted(missing)}")
            return CircuitParams.from_ratios(
                wp_over_e_l=_get_float(sec, "wp_over_e_l"),
                wp_over_e_c_sigma=_get_float(sec, "wp_over_e_c_sigma"),
                wp_over_e_j=_get_float(sec, "wp_over_e_j"),
                phi_ext=phi_ext,
            )
        missing = {"e_j", "e_l", "e_c_sigma", "e_cj"} - set(sec)
        if missing:
            raise ConfigError(f"[circuit] raw style needs {sorted(missing)}")
        e_c = _get_float(sec, "e_c") if "e_c" in sec else None
        return CircuitParams.from_energies(
            e_j=_get_float(sec, "e_j"),
            e_l=_get_float(sec, "e_l"),
            e_c_sigma=_get_float(sec, "e_c_sigma"),
            e_cj=_get_float(sec, "e_cj"),
            e_c=e_c,
            phi_ext=phi_ext,
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"invalid [circuit] parameters: {exc}") from exc


def _parse_disorder(parser) -> DisorderParams:
    if not parser.has_section("disorder"):
        return DisorderParams()
    sec = parser["disorder"]
    try:
        return DisorderParams(
            delta_e_j=_get_float(sec, "delta_e_j", default=0.0),
            delta_c_j_rel=_get_float(sec, "delta_c_j_rel", default=0.0),
            delta_c_rel=_get_float(sec, "delta_c_rel", default=0.0),
            delta_e_l=_get_float(sec, "delta_e_l", default=0.0),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"invalid [disorder] parameters: {exc}") from exc


def _parse_sweep(parser, cfg: RunConfig) -> None:
    has_section = parser.has_section("sweep")
    if cfg.mode not in _SWEEP_MODES:
        if has_section:
            raise ConfigError(f"mode '{cfg.mode}' takes no [sweep] section")
        return
    if not has_section:
        raise ConfigError(f"mode '{cfg.mode}' requires a [sweep] section")
    sec = parser["sweep"]

    if cfg.mode == "flux-sweep":
        cfg.flux_values = _axis(sec, "", log=False)
    elif cfg.mode == "disorder-sweep":
        axis = sec.get("axis", "delta_e_j").strip()
        if axis not in ("delta_e_j", "delta_c_j_rel"):
            raise ConfigError(f"unknown disorder axis '{axis}'")
        cfg.disorder_axis = axis
        cfg.disorder_values = _axis(sec, "", log=False)
    elif cfg.mode == "dmax-grid":
        cfg.e_l_values = _axis(sec, "e_l_", log=True)
        cfg.e_c_sigma_values = _axis(sec, "e_c_sigma_", log=True)


def _axis(sec, prefix: str, log: bool) -> tuple:
    """Axis values either listed explicitly or as start/stop/count.

    Ranges are linearly spaced, or logarithmically for log axes (endpoints
    included either way).
    """
    values_key = f"{prefix}values"
    if values_key in sec:
        values = _get_float_list(sec, values_key)
        if not values:
            raise ConfigError(f"'{values_key}' must be non-empty")
        return values
    triple = [f"{prefix}start", f"{prefix}stop", f"{prefix}count"]
    if not all(key in sec for key in triple):
        raise ConfigError(
            f"sweep axis needs '{values_key}' or all of {triple}")
    start = _get_float(sec, triple[0])
    stop = _get_float(sec, triple[1])
    count = _get_int(sec, triple[2])
    if count < 1:
        raise ConfigError(f"'{triple[2]}' must be >= 1, got {count}")
    if log:
        if start <= 0 or stop <= 0:
            raise ConfigError("logarithmic axis endpoints must be positive")
        return tuple(np.logspace(math.log10(start), math.log10(stop), count))
    return tuple(np.linspace(start, stop, count))


def _get_float(sec, key: str, default: float | None = None) -> float:
    if key not in sec:
        if default is None:
            raise ConfigError(f"missing required key '{key}'")
        return default
    try:
        return float(sec[key])
    except ValueError as exc:
        raise ConfigError(f"key '{key}': not a number: {sec[key]!r}") from exc


def _get_int(sec, key: str, default: int | None = None) -> int:
    if key not in sec:
        if default is None:
            raise ConfigError(f"missing required key '{key}'")
        return default
    try:
        return int(sec[key])
    except ValueError as exc:
        raise ConfigError(f"key '{key}': not an integer: {sec[key]!r}") from exc


def _get_bool(sec, key: str, default: bool) -> bool:
    if key not in sec:
        return default
    value = sec[key].strip().lower()
    if value in ("true", "yes", "on", "1"):
        return True
    if value in ("false", "no", "off", "0"):
        return False
    raise ConfigError(f"key '{key}': not a boolean: {sec[key]!r}")


def _get_float_list(sec, key: str, default: tuple = ()) -> tuple:
    if key not in sec:
        return default
    raw = sec[key].replace(",", " ").split()
    try:
        return tuple(float(v) for v in raw)
    except ValueError as exc:
        raise ConfigError(f"key '{key}': not a number list: {sec[key]!r}") from exc
