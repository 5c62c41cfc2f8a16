"""Serialization of resampler specs to and from the TOML config format."""
from __future__ import annotations

from typing import Any, Dict, Optional

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

from .errors import MalformedConfigError
from .types import Method, ResamplerSpec

# Emission order for config keys; also the accepted key vocabulary.
_SPEC_KEYS = (
    "method",
    "block_length",
    "geometric_p",
    "window",
    "tukey_alpha",
    "ar_order",
    "max_ar_order",
    "distribution",
    "statistic",
    "n_states",
)

# Keys where the string "auto" stands for data-driven selection.
_AUTO_KEYS = frozenset({"ar_order", "max_ar_order", "n_states"})


def spec_to_dict(spec: ResamplerSpec) -> Dict[str, Any]:
    """Flatten a spec into plain values, covering every field the method uses.

    Auto-selected integers are rendered as the string "auto"; fields the
    method does not consume are omitted entirely.
    """
    out: Dict[str, Any] = {"method": spec.method.value}
    if spec.block_length is not None:
        out["block_length"] = spec.block_length
    if spec.geometric_p is not None:
        out["geometric_p"] = spec.geometric_p
    if spec.window is not None:
        out["window"] = spec.window.value
    if spec.tukey_alpha is not None:
        out["tukey_alpha"] = spec.tukey_alpha
    if spec.method in (Method.WHOLE_RESIDUAL, Method.BLOCK_RESIDUAL, Method.WHOLE_SIEVE, Method.BLOCK_SIEVE):
        out["ar_order"] = spec.ar_order if spec.ar_order is not None else "auto"
        out["max_ar_order"] = spec.max_ar_order if spec.max_ar_order is not None else "auto"
    if spec.distribution is not None:
        out["distribution"] = spec.distribution.value
    if spec.statistic is not None:
        out["statistic"] = spec.statistic.value
    if spec.method in (Method.WHOLE_MARKOV, Method.BLOCK_MARKOV):
        out["n_states"] = spec.n_states if spec.n_states is not None else "auto"
    if spec.inner is not None:
        out["inner"] = spec_to_dict(spec.inner)
    return out


def spec_from_dict(data: Dict[str, Any]) -> ResamplerSpec:
    """Build a validated spec from parsed config values."""
    if not isinstance(data, dict):
        raise MalformedConfigError("config must be a table of keys")
    working = dict(data)
    kwargs: Dict[str, Any] = {}
    inner = working.pop("inner", None)
    if inner is not None:
        kwargs["inner"] = spec_from_dict(inner)
    if "method" not in working:
        raise MalformedConfigError("config is missing the method key")
    for key, value in working.items():
        if key not in _SPEC_KEYS:
            raise MalformedConfigError(f"unknown config key: {key}")
        if key in _AUTO_KEYS and value == "auto":
            continue
        kwargs[key] = value
    return ResamplerSpec(**kwargs)


def _toml_scalar(value: Any) -> str:
    if isinstance(value, bool) or value is None:
        raise MalformedConfigError(f"cannot serialize config value {value!r}")
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, str):
        escaped = value.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    raise MalformedConfigError(f"cannot serialize config value {value!r}")


def spec_to_toml(spec: ResamplerSpec) -> str:
    """Render a spec as TOML text with at most one [inner] section."""
    data = spec_to_dict(spec)
    inner = data.pop("inner", None)
    lines = [f"{key} = {_toml_scalar(data[key])}" for key in _SPEC_KEYS if key in data]
    if inner is not None:
        lines.append("")
        lines.append("[inner]")
        lines.extend(f"{key} = {_toml_scalar(inner[key])}" for key in _SPEC_KEYS if key in inner)
    return "\n".join(lines) + "\n"


def parse_toml_dict(text: str) -> Dict[str, Any]:
    """Parse TOML text into plain values without spec validation."""
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise MalformedConfigError(f"invalid config syntax: {exc}") from exc


def parse_spec_toml(text: str) -> ResamplerSpec:
    """Parse TOML text into a validated spec."""
    return spec_from_dict(parse_toml_dict(text))


def load_spec(path: str) -> ResamplerSpec:
    """Read and parse a spec config file."""
    with open(path, "rb") as handle:
        text = handle.read().decode("utf-8")
    return parse_spec_toml(text)


def spec_roundtrip(spec: ResamplerSpec) -> ResamplerSpec:
    """Serialize a spec to config text and parse it back."""
    return parse_spec_toml(spec_to_toml(spec))
