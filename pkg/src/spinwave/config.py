"""Run configuration: flat key-value files with dotted keys, flag overrides.

A config file holds lines like ``chain.N = 100``; '#' starts a comment.
Flags override file values, and everything falls back to the standard
working point: N=100, J=1, gamma=0.5, h0=0.5, h1=1.0, tau_H=1e-4 with
the pulse on the last site.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigError, ParameterError
from .kernel import PulseSpec
from .spectrum import ChainParams


def _to_bool(raw: str) -> bool:
    low = str(raw).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


@dataclass
class RunConfig:
    chain_N: int = 100
    chain_J: float = 1.0
    chain_gamma: float = 0.5
    chain_h0: float = 0.5
    pulse_h1: float = 1.0
    pulse_tau_H: float = 1e-4
    pulse_source_site: int | None = None  # defaults to site N
    pulse_t_start: float = 0.0
    scan_t: float = 1.0
    scan_site: int = 1
    scan_t_min: float = 1.0
    scan_t_max: float = 200.0
    scan_dt: float = 0.5
    scan_site_max: int | None = None  # profile site range 1..site_max
    train_n_pulses: int = 3
    train_t0: float = 1.0
    train_site: int = 1
    train_t_max: float = 20.0
    transport_hops: int = 5
    transport_t_pick: float = 5.0
    transport_spacing: float = 1.0
    transport_settle: float = 1.0
    oracle_N: int = 8
    oracle_t_max: float = 50.0
    oracle_dt: float = 0.5
    oracle_tolerance: float = 0.01
    norm_strategy: str = "quasiparticle-sum"
    norm_value: float | None = None
    kernel_sector: str = "auto"
    include_c_offset: bool = True
    eq14_literal: bool = False

    def chain(self) -> ChainParams:
        try:
            return ChainParams(
                N=self.chain_N, J=self.chain_J, gamma=self.chain_gamma, h0=self.chain_h0
            )
        except ParameterError as exc:
            raise ConfigError(str(exc), field="chain") from exc

    def pulse(self) -> PulseSpec:
        source = self.pulse_source_site
        if source is None:
            source = self.chain_N
        try:
            spec = PulseSpec(
                h1=self.pulse_h1,
                tau_H=self.pulse_tau_H,
                source_site=source,
                t_start=self.pulse_t_start,
            )
            spec.validate_site(self.chain_N)
        except ParameterError as exc:
            raise ConfigError(str(exc), field="pulse") from exc
        return spec

    def snapshot(self) -> dict:
        return {
            key: getattr(self, attr)
            for key, (attr, _) in _KEY_TABLE.items()
            if key not in _ALIASES
        }


# dotted config key -> (attribute, converter)
_KEY_TABLE = {
    "chain.N": ("chain_N", int),
    "chain.J": ("chain_J", float),
    "chain.gamma": ("chain_gamma", float),
    "chain.h0": ("chain_h0", float),
    "pulse.h1": ("pulse_h1", float),
    "pulse.tau_H": ("pulse_tau_H", float),
    "pulse.source_site": ("pulse_source_site", int),
    "pulse.t_start": ("pulse_t_start", float),
    "scan.t": ("scan_t", float),
    "scan.site": ("scan_site", int),
    "scan.t_min": ("scan_t_min", float),
    "scan.t_max": ("scan_t_max", float),
    "scan.dt": ("scan_dt", float),
    "scan.site_max": ("scan_site_max", int),
    "train.n_pulses": ("train_n_pulses", int),
    "train.t0": ("train_t0", float),
    "train.site": ("train_site", int),
    "train.t_max": ("train_t_max", float),
    "transport.hops": ("transport_hops", int),
    "transport.t_pick": ("transport_t_pick", float),
    "transport.spacing": ("transport_spacing", float),
    "transport.settle": ("transport_settle", float),
    "oracle.N": ("oracle_N", int),
    "oracle.t_max": ("oracle_t_max", float),
    "oracle.dt": ("oracle_dt", float),
    "oracle.tolerance": ("oracle_tolerance", float),
    "norm.strategy": ("norm_strategy", str),
    "norm.value": ("norm_value", float),
    "kernel.sector": ("kernel_sector", str),
    "kernel.include_c_offset": ("include_c_offset", _to_bool),
    "engine.eq14_literal": ("eq14_literal", _to_bool),
    "engine.eq14-literal": ("eq14_literal", _to_bool),  # spelling alias
}

_ALIASES = {"engine.eq14-literal"}


def config_keys() -> list[str]:
    return sorted(set(_KEY_TABLE) - _ALIASES)


def _apply(config: RunConfig, key: str, raw, where: str):
    if key not in _KEY_TABLE:
        raise ConfigError(f"unknown configuration key {key!r} ({where})", field=key)
    attr, conv = _KEY_TABLE[key]
    try:
        value = conv(raw) if not isinstance(raw, bool) else raw
    except (TypeError, ValueError) as exc:
        raise ConfigError(
            f"invalid value {raw!r} for {key} ({where}): {exc}", field=key
        ) from exc
    setattr(config, attr, value)


def parse_config(path: str | None = None, overrides: dict | None = None) -> RunConfig:
    """Build a validated RunConfig from an optional file plus overrides."""
    config = RunConfig()
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                lines = fh.readlines()
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        for lineno, line in enumerate(lines, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            if "=" not in text:
                raise ConfigError(
                    f"{path}:{lineno}: expected 'key = value', got {line.strip()!r}"
                )
            key, raw = (part.strip() for part in text.split("=", 1))
            _apply(config, key, raw, where=f"{path}:{lineno}")
    for key, raw in (overrides or {}).items():
        if raw is not None:
            _apply(config, key, raw, where="command line")
    config.chain()
    config.pulse()
    if config.scan_dt <= 0:
        raise ConfigError("scan.dt must be positive", field="scan.dt")
    if config.kernel_sector not in ("auto", "even", "odd"):
        raise ConfigError(
            f"kernel.sector must be auto/even/odd, got {config.kernel_sector!r}",
            field="kernel.sector",
        )
    return config
