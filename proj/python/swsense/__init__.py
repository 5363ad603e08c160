"""Standing-wave interference detector simulator."""

from __future__ import annotations

import csv
import io
import json
from typing import Any, Mapping, Sequence

from . import _swsense
from ._swsense import ConfigError, SwsenseError

__all__ = [
    "Calibration",
    "ConfigError",
    "SwsenseError",
    "config_hash",
    "default_config",
    "place_nodes",
    "readout",
    "resolution",
    "simulate",
    "tap_dissipation",
    "tap_sparams",
]


def _text(config: Mapping[str, Any] | str | None) -> str:
    if config is None:
        return ""
    if isinstance(config, str):
        return config
    return json.dumps(config)


def default_config() -> dict:
    return json.loads(_swsense.default_config())


def config_hash(config: Mapping[str, Any] | None = None) -> str:
    return _swsense.config_hash(_text(config))


def tap_sparams(r_c: float = 220.0, z0: float = 50.0) -> dict:
    c, s11, s21 = _swsense.tap_sparams(r_c, z0)
    return {"coupling_db": c, "s11_db": s11, "s21_db": s21}


def tap_dissipation(p_in_dbm: float, r_c: float = 220.0, z0: float = 50.0) -> float:
    """Watts dissipated in the coupling resistor."""
    return _swsense.tap_dissipation(p_in_dbm, r_c, z0)


def resolution(f: float, f_max: float, config: Mapping[str, Any] | None = None) -> float:
    return _swsense.resolution(f, f_max, _text(config))


def place_nodes(f_max_1: float, max_pct: float, config: Mapping[str, Any] | None = None) -> dict:
    f2, fmin = _swsense.place_nodes(f_max_1, max_pct, _text(config))
    return {"f_max_2": f2, "f_min": fmin}


def readout(
    lines: Sequence[tuple[float, float]],
    config: Mapping[str, Any] | None = None,
    agc: bool = True,
) -> dict:
    """ADC codes for CW lines given as (freq_hz, power_dbm)."""
    oc, l1, l2, att = _swsense.readout(list(lines), _text(config), agc)
    return {"code_oc": oc, "code_l1": l1, "code_l2": l2, "att_db": att}


class Calibration:
    def __init__(self, config: Mapping[str, Any] | None = None):
        self._table = _swsense.Calibration(_text(config))

    @property
    def config_hash(self) -> str:
        return self._table.config_hash

    @property
    def freq_grid(self) -> list[float]:
        return self._table.freq_grid

    @property
    def power_grid(self) -> list[float]:
        return self._table.power_grid

    def estimate(self, code_oc: int, code_l1: int, code_l2: int, att_db: float = 0.0) -> dict:
        return self._table.estimate(code_oc, code_l1, code_l2, att_db)


def simulate(
    scenario: Mapping[str, Any] | str,
    config: Mapping[str, Any] | None = None,
    seed: int | None = None,
) -> tuple[dict, list[dict]]:
    """Run a scenario. Returns (metrics, trace rows)."""
    metrics, trace = _swsense.simulate(_text(scenario), _text(config), seed)
    return json.loads(metrics), list(csv.DictReader(io.StringIO(trace)))
