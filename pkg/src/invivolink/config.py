"""Run configuration: YAML file plus command-line overrides.

The schema is strict -- unknown keys are rejected with their path -- so a
config file is a complete, reproducible description of a run.  Defaults
reproduce the standard link budget (0.412 mW, -174 dBm/Hz, 20 MHz, 52 data
tones, 4 us symbols, 100k frames).
"""

from __future__ import annotations

import hashlib
import json
import math
import sys
from dataclasses import dataclass, field

import yaml

from .capacity import SAR_POWER_CAP_W, LinkBudget
from .channel import InVivoPathModel
from .units import dbm_to_watts


class ConfigError(Exception):
    """Invalid configuration file or option."""


_SCHEMA = {
    "budget": {
        "power_mw": float,
        "noise_dbm_per_hz": float,
        "bandwidth_mhz": float,
        "n_data": int,
        "t_sym_us": float,
        "sar_cap": bool,
    },
    "model": {
        "ref_loss_db": float,
        "ref_distance_mm": float,
        "exponent": float,
        "wavelength_scale": float,
        "rician_k_db": float,
        "n_taps": int,
        "rms_delay_ns": float,
        "carrier_ghz": float,
        "correlation": float,
    },
    "sim": {
        "mcs": list,
        "max_frames": int,
        "min_error_frames": int,
        "frame_length_bytes": int,
        "detector": str,
        "seed": int,
        "capacity_realizations": int,
        "uncoded_bpsk_snr_db": list,
        "noise_override_dbm_per_hz": float,
    },
    "run": {
        "cases": list,
        "distances_mm": list,
        "channel_file": str,
        "out": str,
    },
}

_DEFAULTS = {
    "budget": {
        "power_mw": 0.412,
        "noise_dbm_per_hz": -174.0,
        "bandwidth_mhz": 20.0,
        "n_data": 52,
        "t_sym_us": 4.0,
        "sar_cap": True,
    },
    "model": {
        "ref_loss_db": 60.0,
        "ref_distance_mm": 70.0,
        "exponent": 6.0,
        "wavelength_scale": 6.0,
        "rician_k_db": 3.0,
        "n_taps": 4,
        "rms_delay_ns": 10.0,
        "carrier_ghz": 2.45,
        "correlation": 0.0,
    },
    "sim": {
        "mcs": [0],
        "max_frames": 100_000,
        "min_error_frames": 100,
        "frame_length_bytes": 1000,
        "detector": "mmse",
        "seed": 1,
        "capacity_realizations": 100,
        "uncoded_bpsk_snr_db": None,
        "noise_override_dbm_per_hz": None,
    },
    "run": {
        "cases": [1, 2, 3, 4],
        "distances_mm": [70.0, 100.0, 130.0, 200.0, 300.0],
        "channel_file": None,
        "out": None,
    },
}


@dataclass
class RunConfig:
    """Validated, fully resolved run parameters."""

    sections: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.sections[key]

    def get(self, section: str, key: str):
        return self.sections[section][key]

    def config_hash(self) -> str:
        blob = json.dumps(self.sections, sort_keys=True, default=str)
        return hashlib.sha256(blob.encode()).hexdigest()[:12]

    def budget(self, n_streams: int) -> LinkBudget:
        b = self.sections["budget"]
        noise_dbm = b["noise_dbm_per_hz"]
        override = self.sections["sim"]["noise_override_dbm_per_hz"]
        if override is not None:
            noise_dbm = override
        noise = 0.0 if noise_dbm == -math.inf else dbm_to_watts(noise_dbm)
        try:
            return LinkBudget(
                power_w=b["power_mw"] * 1e-3,
                noise_density_w_per_hz=noise,
                bandwidth_hz=b["bandwidth_mhz"] * 1e6,
                t_sym_s=b["t_sym_us"] * 1e-6,
                n_data=b["n_data"],
                n_streams=n_streams,
                enforce_sar_cap=b["sar_cap"],
            )
        except ValueError as exc:
            raise ConfigError(f"budget: {exc}") from exc

    def path_model(self) -> InVivoPathModel:
        m = self.sections["model"]
        try:
            return InVivoPathModel(
                ref_loss_db=m["ref_loss_db"],
                ref_distance_mm=m["ref_distance_mm"],
                exponent=m["exponent"],
                wavelength_scale=m["wavelength_scale"],
                rician_k_db=m["rician_k_db"],
                n_taps=m["n_taps"],
                rms_delay_ns=m["rms_delay_ns"],
                carrier_hz=m["carrier_ghz"] * 1e9,
                correlation=m["correlation"],
            )
        except ValueError as exc:
            raise ConfigError(f"model: {exc}") from exc


def _coerce(path: str, value, expect):
    if value is None:
        return None
    if expect is float:
        if isinstance(value, bool) or not isinstance(value, (int, float, str)):
            raise ConfigError(f"{path}: expected a number, got {value!r}")
        try:
            return float(value)  # YAML may hand back "-inf" etc. as strings
        except ValueError:
            raise ConfigError(f"{path}: expected a number, got {value!r}") from None
    if expect is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{path}: expected an integer, got {value!r}")
        return value
    if expect is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{path}: expected true/false, got {value!r}")
        return value
    if expect is str:
        if not isinstance(value, str):
            raise ConfigError(f"{path}: expected a string, got {value!r}")
        return value
    if expect is list:
        if not isinstance(value, list):
            raise ConfigError(f"{path}: expected a list, got {value!r}")
        return value
    raise AssertionError(expect)


def load_config(path: str | None = None, overrides: dict | None = None,
                warn=lambda msg: print(msg, file=sys.stderr)) -> RunConfig:
    """Build a RunConfig from defaults, an optional YAML file and overrides.

    `overrides` maps "section.key" to values (command-line flags win over
    the file).  Unknown sections/keys and type mismatches raise ConfigError
    with the offending path; YAML syntax errors keep the parser's line/column
    diagnostics.
    """
    sections = {sec: dict(vals) for sec, vals in _DEFAULTS.items()}

    if path is not None:
        try:
            with open(path) as f:
                loaded = yaml.safe_load(f)
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except yaml.YAMLError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        if loaded is None:
            loaded = {}
        if not isinstance(loaded, dict):
            raise ConfigError(f"{path}: top level must be a mapping of sections")
        for sec, vals in loaded.items():
            if sec not in _SCHEMA:
                raise ConfigError(f"{path}: unknown section {sec!r}")
            if not isinstance(vals, dict):
                raise ConfigError(f"{path}: section {sec!r} must be a mapping")
            for key, value in vals.items():
                if key not in _SCHEMA[sec]:
                    raise ConfigError(f"{path}: unknown key {sec}.{key}")
                sections[sec][key] = _coerce(f"{sec}.{key}", value, _SCHEMA[sec][key])

    for dotted, value in (overrides or {}).items():
        if value is None:
            continue
        sec, _, key = dotted.partition(".")
        sections[sec][key] = _coerce(dotted, value, _SCHEMA[sec][key])

    if sections["budget"]["power_mw"] * 1e-3 > SAR_POWER_CAP_W * (1 + 1e-12):
        warn(f"warning: power_mw={sections['budget']['power_mw']} exceeds the "
             f"SAR-derived cap of {SAR_POWER_CAP_W * 1e3} mW")

    det = sections["sim"]["detector"]
    if det not in ("zf", "mmse"):
        raise ConfigError(f"sim.detector must be 'zf' or 'mmse', got {det!r}")
    for name, lst in (("sim.mcs", sections["sim"]["mcs"]),
                      ("run.cases", sections["run"]["cases"])):
        if lst is not None and not all(isinstance(v, int) for v in lst):
            raise ConfigError(f"{name}: expected a list of integers, got {lst!r}")
    for case in sections["run"]["cases"]:
        if not 1 <= case <= 8:
            raise ConfigError(f"run.cases: unknown placement case {case} (valid: 1..8)")
    for idx in sections["sim"]["mcs"]:
        if not 0 <= idx <= 15:
            raise ConfigError(f"sim.mcs: MCS index {idx} outside 0..15")
    return RunConfig(sections=sections)
