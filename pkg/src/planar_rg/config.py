"""Run configuration read from INI-style files.

Recognised sections and keys::

    [beta_model]  gamma rho r_max beta2 amplitude cross_terms
    [domains]     epsilon_bar eta_bar theta delta_bar
    [solver]      N tol_inner tol_outer max_iter_inner max_iter check_domains
    [trees]       max_scale
    [extract]     N cap tree
    [borel]       tol max_nodes

Unknown sections or keys raise :class:`ConfigError`.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field, replace

from .beta_model import BetaModel
from .flow_solver import SolverOptions

__all__ = ["ConfigError", "RunConfig", "load_config"]


class ConfigError(ValueError):
    pass


_SCHEMA: dict[str, dict[str, type]] = {
    "beta_model": {"gamma": float, "rho": float, "r_max": int, "beta2": float,
                   "amplitude": float, "cross_terms": bool},
    "domains": {"epsilon_bar": float, "eta_bar": float, "theta": float, "delta_bar": float},
    "solver": {"N": int, "tol_inner": float, "tol_outer": float, "max_iter_inner": int,
               "max_iter": int, "check_domains": bool},
    "trees": {"max_scale": int},
    "extract": {"N": int, "cap": int, "tree": str},
    "borel": {"tol": float, "max_nodes": int},
}

_DEFAULTS = {
    "beta_model": {"gamma": 2.0, "rho": 0.5, "r_max": 3, "beta2": 1.0, "amplitude": 0.1,
                   "cross_terms": True},
    "domains": {"epsilon_bar": 0.05, "eta_bar": 0.05, "theta": math.pi / 2, "delta_bar": 1.0},
    "solver": {"N": 100, "tol_inner": 1e-14, "tol_outer": 1e-12, "max_iter_inner": 200,
               "max_iter": 500, "check_domains": True},
    "trees": {"max_scale": 3},
    "extract": {"N": 2, "cap": 200_000, "tree": "(root scale=1 (ep fat 4 2))"},
    "borel": {"tol": 1e-10, "max_nodes": 512},
}


@dataclass
class RunConfig:
    """Validated parameters for every command; ``values[section][key]``."""

    values: dict = field(default_factory=lambda: {s: dict(v) for s, v in _DEFAULTS.items()})

    def __post_init__(self):
        self.validate()

    def get(self, section: str, key: str):
        return self.values[section][key]

    def override(self, section: str, key: str, value) -> "RunConfig":
        if value is None:
            return self
        vals = {s: dict(v) for s, v in self.values.items()}
        vals[section][key] = _SCHEMA[section][key](value)
        return RunConfig(vals)

    def validate(self) -> None:
        bm = self.values["beta_model"]
        if not bm["gamma"] > 1:
            raise ConfigError("beta_model.gamma must exceed 1")
        if not 0 < bm["rho"] <= 1:
            raise ConfigError("beta_model.rho must lie in (0, 1]")
        if bm["r_max"] < 2:
            raise ConfigError("beta_model.r_max must be >= 2")
        if not (bm["beta2"] > 0 and bm["amplitude"] > 0):
            raise ConfigError("beta_model.beta2 and amplitude must be positive")
        dm = self.values["domains"]
        if not (dm["epsilon_bar"] > 0 and dm["eta_bar"] > 0 and dm["delta_bar"] > 0):
            raise ConfigError("domain radii must be positive")
        if not 0 < dm["theta"] <= math.pi / 2:
            raise ConfigError("domains.theta must lie in (0, pi/2]")
        sv = self.values["solver"]
        if sv["N"] < 1 or sv["max_iter"] < 1 or sv["max_iter_inner"] < 1:
            raise ConfigError("solver sizes must be positive")
        if not (sv["tol_inner"] > 0 and sv["tol_outer"] > 0):
            raise ConfigError("solver tolerances must be positive")
        if self.values["trees"]["max_scale"] < 0:
            raise ConfigError("trees.max_scale must be >= 0")
        ex = self.values["extract"]
        if ex["N"] < 0 or ex["cap"] < 1:
            raise ConfigError("extract.N must be >= 0 and extract.cap >= 1")
        bo = self.values["borel"]
        if not bo["tol"] > 0 or bo["max_nodes"] < 32:
            raise ConfigError("borel.tol must be positive and borel.max_nodes >= 32")

    def model(self) -> BetaModel:
        bm = self.values["beta_model"]
        return BetaModel(gamma=bm["gamma"], rho=bm["rho"], r_max=bm["r_max"], beta2=bm["beta2"],
                         amplitude=bm["amplitude"], cross_terms=bm["cross_terms"])

    def solver_options(self) -> SolverOptions:
        dm, sv = self.values["domains"], self.values["solver"]
        return replace(SolverOptions(), epsilon_bar=dm["epsilon_bar"], eta_bar=dm["eta_bar"],
                       theta=dm["theta"], N=sv["N"], tol_inner=sv["tol_inner"],
                       tol_outer=sv["tol_outer"], max_iter_inner=sv["max_iter_inner"],
                       max_iter=sv["max_iter"], check_domains=sv["check_domains"])


def _convert(kind: type, raw: str, where: str):
    try:
        if kind is bool:
            low = raw.strip().lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        return kind(raw.strip())
    except ValueError as exc:
        raise ConfigError(f"bad value for {where}: {raw!r}") from exc


def load_config(path: str | None = None) -> RunConfig:
    """Defaults overlaid with the file at ``path`` (if any).

    Examples
    --------
    >>> load_config().get("solver", "N")
    100
    """
    vals = {s: dict(v) for s, v in _DEFAULTS.items()}
    if path is None:
        return RunConfig(vals)
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    with open(path, encoding="utf-8") as fh:
        parser.read_file(fh)
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        for key, raw in parser.items(section):
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key {section}.{key}")
            vals[section][key] = _convert(_SCHEMA[section][key], raw, f"{section}.{key}")
    return RunConfig(vals)
