"""Run configuration: flat TOML files with command-line overrides."""

from __future__ import annotations

import dataclasses
import difflib
import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from ..errors import ConfigError
from ..features import DEFAULT_THRESHOLD, DEFAULT_TRANSFORMS, Transform
from ..filters import BFParams, WLSParams
from ..fusion import FusionMethod, MaxRule, Method

THREADS_ENV = "NIRFUSE_THREADS"


@dataclass
class RunConfig:
    dataset_root: str = ""
    manifest: str = ""
    output_dir: str = "nirfuse-out"
    methods: list = field(default_factory=lambda: [m.value for m in Method])
    transforms: list = field(default_factory=lambda: [t.value for t in DEFAULT_TRANSFORMS])
    emit_images: bool = False
    figures: bool = True
    threads: int = 1
    # bilateral filter
    sigma_spatial: float = BFParams.sigma_spatial
    sigma_range: float = BFParams.sigma_range
    edge_min: float = BFParams.edge_min
    edge_max: float = BFParams.edge_max
    # WLS smoothing
    lam: float = WLSParams.lam
    alpha: float = WLSParams.alpha
    epsilon: float = WLSParams.epsilon
    solver_tol: float = WLSParams.solver_tol
    max_iter: int = WLSParams.max_iter
    max_rule: str = MaxRule.MAGNITUDE.value
    # evaluation
    threshold: float = DEFAULT_THRESHOLD
    bin_size: int = 8
    step: int = 4

    # Keys that change results; everything else is logistics.
    _LOGISTICS = ("dataset_root", "manifest", "output_dir", "emit_images", "figures", "threads")

    def validate(self) -> "RunConfig":
        try:
            self.bf_params()
            self.wls_params()
            [Method(m) for m in self.methods]
            [Transform(t) for t in self.transforms]
            MaxRule(self.max_rule)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.threads < 1:
            raise ConfigError("threads must be at least 1")
        if self.threshold <= 0 or self.bin_size < 1 or self.step < 1:
            raise ConfigError("threshold, bin_size and step must be positive")
        return self

    def bf_params(self) -> BFParams:
        return BFParams(self.sigma_spatial, self.sigma_range, self.edge_min, self.edge_max)

    def wls_params(self) -> WLSParams:
        return WLSParams(self.lam, self.alpha, self.epsilon, self.solver_tol, self.max_iter)

    def fusion_methods(self) -> list:
        return [
            FusionMethod(Method(m), self.bf_params(), self.wls_params(), MaxRule(self.max_rule))
            for m in self.methods
        ]

    def transform_list(self) -> list:
        return [Transform(t) for t in self.transforms]

    def match_kwargs(self) -> dict:
        return {"bin_size": self.bin_size, "step": self.step, "threshold": self.threshold}

    def snapshot(self) -> dict:
        return dataclasses.asdict(self)

    def config_hash(self) -> str:
        """Hash of every setting that can change a result row."""
        relevant = {k: v for k, v in self.snapshot().items() if k not in self._LOGISTICS}
        blob = json.dumps(relevant, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:12]


# "lambda" is the user-facing name; Python reserves it.
ALIASES = {"lambda": "lam"}
_FIELDS = {f.name: f for f in dataclasses.fields(RunConfig)}
PUBLIC_KEYS = sorted(["lambda" if k == "lam" else k for k in _FIELDS])


def _coerce(key: str, value):
    default = getattr(RunConfig(), key)
    expected = type(default)
    if expected is float and isinstance(value, int) and not isinstance(value, bool):
        return float(value)
    if expected is list:
        if isinstance(value, str):
            value = [v.strip() for v in value.split(",") if v.strip()]
        if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
            raise ConfigError(f"{key}: expected a list of strings, got {value!r}")
        return value
    if not isinstance(value, expected) or (expected is int and isinstance(value, bool)):
        raise ConfigError(
            f"{key}: expected {expected.__name__}, got {type(value).__name__} ({value!r})"
        )
    return value


def _resolve_key(key: str) -> str:
    name = ALIASES.get(key, key)
    if name not in _FIELDS:
        hint = difflib.get_close_matches(key, PUBLIC_KEYS, n=1)
        suggestion = f"; did you mean {hint[0]!r}?" if hint else ""
        raise ConfigError(f"unknown config key {key!r}{suggestion}")
    return name


def parse_override(text: str) -> tuple[str, object]:
    """Parse ``key=value``; the value uses TOML syntax, bare words are strings."""
    if "=" not in text:
        raise ConfigError(f"override {text!r} is not of the form key=value")
    key, raw = (s.strip() for s in text.split("=", 1))
    try:
        value = tomllib.loads(f"v = {raw}")["v"]
    except tomllib.TOMLDecodeError:
        value = raw
    return key, value


def parse_config(path=None, overrides=None) -> RunConfig:
    """Build a RunConfig: defaults, then the file, then ``overrides``.

    ``overrides`` is a mapping or an iterable of ``key=value`` strings.
    ``threads`` falls back to the NIRFUSE_THREADS environment variable when
    neither source sets it.
    """
    values = {}
    if path:
        try:
            with open(path, "rb") as fh:
                data = tomllib.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from None
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
        for key, value in data.items():
            if isinstance(value, dict):
                raise ConfigError(f"{key}: config must be flat, found a table")
            values[_resolve_key(key)] = value

    if overrides:
        items = overrides.items() if isinstance(overrides, dict) else map(parse_override, overrides)
        for key, value in items:
            if value is None:
                continue
            values[_resolve_key(key)] = value

    if "threads" not in values and os.environ.get(THREADS_ENV):
        try:
            values["threads"] = int(os.environ[THREADS_ENV])
        except ValueError:
            raise ConfigError(f"{THREADS_ENV} must be an integer") from None

    cfg = RunConfig(**{k: _coerce(k, v) for k, v in values.items()})
    return cfg.validate()


def write_config(cfg: RunConfig, path) -> None:
    """Write ``cfg`` back out as flat TOML (round-trips through parse_config)."""
    lines = []
    for key, value in cfg.snapshot().items():
        name = "lambda" if key == "lam" else key
        lines.append(f"{name} = {json.dumps(value)}")
    Path(path).write_text("\n".join(lines) + "\n")
