"""Experiment configuration: JSON file, defaults, CLI overrides, validation."""

import copy
import json
import os
from dataclasses import dataclass
from pathlib import Path

from .channel import FrequencyGrid, generate_synthetic, slice_bandwidth
from .errors import ConfigError, FdsasError
from .geometry import ArrayGeometry, SubArrayKind
from .pso import Inertia, PSOConfig
from . import tensorio

WORKERS_ENV = "FDSAS_WORKERS"

DEFAULT_ANGLES = [15.0, 45.0, 75.0, 105.0, 135.0, 165.0]

DEFAULTS = {
    "channel": {
        "source": "synthetic",
        "path": None,
        "geometry": {
            "rows": 8,
            "cols": 8,
            "spacing_wl": 0.5,
            "tx_rx_gap_m": 0.1,
            "carrier_hz": 3.5e9,
        },
        "grid": {"f_start_hz": 3.0e9, "f_stop_hz": 4.0e9, "num_points": 1601},
        "isolation_db": 0.0,
        "diffuse_ratio": 0.0,
        "seed": 7,
    },
    "kind": "lin4",
    "center_hz": 3.5e9,
    "bandwidth_hz": 20e6,
    "theta_D": 105.0,
    "theta_U": 45.0,
    "angles": DEFAULT_ANGLES,
    "pso": {
        "num_particles": 20,
        "num_iterations": 100,
        "omega1_max": 2.0,
        "omega2_max": 2.0,
        "inertia": {"mode": "constant", "value": 1.1},
        "seed": 0,
        "eps_db": 2.0,
        "max_index": None,
        "dbf_pair": [1, 1],
        "seed_dbf": True,
    },
    "oracle_step_deg": None,
    "grid_cap": 50_000_000,
    "beampattern": {"kinds": ["lin4", "lin8"], "angles": DEFAULT_ANGLES, "step_deg": 0.1},
    "workers": 1,
    "out": "out",
}


def deep_merge(base, override):
    out = copy.deepcopy(base)
    for key, value in override.items():
        if key not in out:
            raise ConfigError(f"unknown config key {key!r}")
        if isinstance(out[key], dict) and isinstance(value, dict) and key != "geometry":
            out[key] = deep_merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


@dataclass
class ExperimentConfig:
    raw: dict

    @property
    def geometry(self):
        return ArrayGeometry.from_dict(self.raw["channel"]["geometry"])

    @property
    def kind(self):
        return SubArrayKind.parse(self.raw["kind"])

    @property
    def out_dir(self):
        return Path(self.raw["out"])

    @property
    def workers(self):
        return int(self.raw["workers"])

    def pso_config(self, theta_D=None, theta_U=None, kind=None):
        p = self.raw["pso"]
        return PSOConfig(
            theta_D=float(self.raw["theta_D"] if theta_D is None else theta_D),
            theta_U=float(self.raw["theta_U"] if theta_U is None else theta_U),
            kind=kind or self.kind,
            eps_db=p["eps_db"],
            num_particles=p["num_particles"],
            num_iterations=p["num_iterations"],
            omega1_max=p["omega1_max"],
            omega2_max=p["omega2_max"],
            inertia=Inertia(**p["inertia"]),
            seed=p["seed"],
            spacing_wl=self.geometry.spacing_wl,
            max_index=p["max_index"],
            dbf_pair=p["dbf_pair"],
            seed_dbf=p["seed_dbf"],
        )

    def validate(self):
        """Build every derived object once so bad values fail before any compute."""
        raw = self.raw
        ch = raw["channel"]
        if ch["source"] not in ("synthetic", "file"):
            raise ConfigError(f"channel.source must be synthetic or file, got {ch['source']!r}")
        if ch["source"] == "file" and not ch["path"]:
            raise ConfigError("channel.path is required when channel.source is file")
        FrequencyGrid(**ch["grid"])
        self.kind
        for key in ("center_hz", "bandwidth_hz"):
            if not float(raw[key]) > 0:
                raise ConfigError(f"{key} must be positive")
        for angle in list(raw["angles"]) + list(raw["beampattern"]["angles"]):
            if not 0 < float(angle) < 180:
                raise ConfigError(f"angle {angle} outside the open interval (0, 180)")
        for kind in raw["beampattern"]["kinds"]:
            SubArrayKind.parse(kind)
        if not float(raw["beampattern"]["step_deg"]) > 0:
            raise ConfigError("beampattern.step_deg must be positive")
        if raw["oracle_step_deg"] is not None and not float(raw["oracle_step_deg"]) > 0:
            raise ConfigError("oracle_step_deg must be positive")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        self.pso_config()
        return self

    def load_channel(self):
        """Full-band tensor from the configured source, then the configured band."""
        ch = self.raw["channel"]
        if ch["source"] == "file":
            tensor = tensorio.load(ch["path"])
        else:
            tensor = generate_synthetic(
                self.geometry,
                FrequencyGrid(**ch["grid"]),
                isolation_db=ch["isolation_db"],
                diffuse_ratio=ch["diffuse_ratio"],
                seed=ch["seed"],
            )
        return slice_bandwidth(tensor, self.raw["center_hz"], self.raw["bandwidth_hz"])

    def dump(self, path):
        Path(path).write_text(json.dumps(self.raw, indent=2, sort_keys=True) + "\n")


def load_config(path=None, overrides=None):
    """Defaults, then the JSON file at ``path``, then ``overrides`` (dotted keys)."""
    raw = copy.deepcopy(DEFAULTS)
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        try:
            user = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
        raw = deep_merge(raw, user)
    env_workers = os.environ.get(WORKERS_ENV)
    if env_workers:
        raw["workers"] = int(env_workers)
    for dotted, value in (overrides or {}).items():
        node = raw
        *parents, leaf = dotted.split(".")
        for key in parents:
            node = node[key]
        node[leaf] = value
    try:
        return ExperimentConfig(raw).validate()
    except FdsasError:
        raise
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError(f"invalid configuration: {exc}") from None
