"""Flat key-value configuration schema.

Documents are plain text, one ``key = value`` pair per line, with ``#``
comments.  Keys are dotted paths; unknown keys are rejected.  The same
``key=value`` syntax is accepted from the command line via ``--set``.

Schema (defaults in parentheses):

    physics.eta (0.02)          coupling strength, 1/(length * time)
    physics.hbar (1.0)
    physics.mass (1.0)
    window.kind (boxcar)
    window.extent (1.0)         duration T or length L
    window.center (0.0)
    window.domain (time)        'time' or 'space'
    spin.pre.theta (0.0)        polar angle of the quantization axis in the xz plane
    spin.pre.axis ()            'x' | 'y' | 'z' shortcut overriding theta
    spin.pre.s (0)              eigenvalue branch: (-1)**s
    spin.post.theta / spin.post.axis / spin.post.s (|0> along z)
    tensor.hxx (-1.0)           coupling tensor Hxx(xx - zz) + Hxz(xz + zx)
    tensor.hxz (0.0)
    grid.<x|y|z>.n              points per axis (power of two)
    grid.<x|y|z>.pmax           momentum half-extent per axis
    packet.sigma.<x|y|z> (1.0)
    packet.center.<x|y|z> (0.0)
    run.steps (400)
    run.tau (1.0)               symmetric horizon tau_i = tau_f

With no grid keys at all the default is a 1D z grid of 4096 points with
pmax = 8.
"""

from __future__ import annotations

import numpy as np

from ..apparatus import CouplingTensor, Window
from ..dynamics import ExperimentConfig
from ..errors import ConfigError
from ..grids import GaussianSpec, GridAxis, GridSpec
from ..spin import SpinorState, UnitDirection, eigenspinor

__all__ = ["parse_config", "parse_pairs", "build_config", "resolved_items"]

_AXES = ("x", "y", "z")

# key -> (type, default); None default means "only meaningful when set".
_SCHEMA: dict[str, tuple[type, object]] = {
    "physics.eta": (float, 0.02),
    "physics.hbar": (float, 1.0),
    "physics.mass": (float, 1.0),
    "window.kind": (str, "boxcar"),
    "window.extent": (float, 1.0),
    "window.center": (float, 0.0),
    "window.domain": (str, "time"),
    "tensor.hxx": (float, -1.0),
    "tensor.hxz": (float, 0.0),
    "run.steps": (int, 400),
    "run.tau": (float, 1.0),
}
for _w in ("pre", "post"):
    _SCHEMA[f"spin.{_w}.theta"] = (float, 0.0)
    _SCHEMA[f"spin.{_w}.axis"] = (str, "")
    _SCHEMA[f"spin.{_w}.s"] = (int, 0)
for _a in _AXES:
    _SCHEMA[f"grid.{_a}.n"] = (int, None)
    _SCHEMA[f"grid.{_a}.pmax"] = (float, None)
    _SCHEMA[f"packet.sigma.{_a}"] = (float, 1.0)
    _SCHEMA[f"packet.center.{_a}"] = (float, 0.0)


def parse_pairs(text: str) -> dict[str, str]:
    """Split a document (or --set fragment) into raw key -> value strings."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected key = value, got {raw!r}")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values


def _convert(key: str, raw: str):
    kind, _ = _SCHEMA[key]
    try:
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
        return raw
    except ValueError:
        raise ConfigError(key, f"expected {kind.__name__}, got {raw!r}") from None


def _resolve(values: dict[str, str]) -> dict[str, object]:
    resolved: dict[str, object] = {}
    for key, raw in values.items():
        if key not in _SCHEMA:
            raise ConfigError(key, "unknown key")
        resolved[key] = _convert(key, raw)
    for key, (_, default) in _SCHEMA.items():
        if key not in resolved and default is not None:
            resolved[key] = default
    return resolved


def _spinor(resolved: dict, which: str) -> SpinorState:
    axis_name = resolved[f"spin.{which}.axis"]
    s = resolved[f"spin.{which}.s"]
    if s not in (0, 1):
        raise ConfigError(f"spin.{which}.s", "must be 0 or 1")
    if axis_name:
        units = {"x": (1, 0, 0), "y": (0, 1, 0), "z": (0, 0, 1)}
        if axis_name not in units:
            raise ConfigError(f"spin.{which}.axis", f"unknown axis {axis_name!r}")
        m = UnitDirection(*units[axis_name])
    else:
        m = UnitDirection.from_polar(resolved[f"spin.{which}.theta"])
    return eigenspinor(m, s)


def build_config(values: dict[str, str]) -> ExperimentConfig:
    """Validate raw key -> value strings and assemble an ExperimentConfig."""
    resolved = _resolve(values)

    if resolved["window.kind"] != "boxcar":
        raise ConfigError("window.kind", f"unsupported {resolved['window.kind']!r}")
    if resolved["window.domain"] not in ("time", "space"):
        raise ConfigError("window.domain", "must be 'time' or 'space'")
    if resolved["tensor.hxx"] == 0.0 and resolved["tensor.hxz"] == 0.0:
        raise ConfigError("tensor.hxx", "zero coupling tensor")
    if resolved["physics.eta"] < 0:
        raise ConfigError("physics.eta", "must be non-negative")

    axes = []
    for a in _AXES:
        n = resolved.get(f"grid.{a}.n")
        pmax = resolved.get(f"grid.{a}.pmax")
        if (n is None) != (pmax is None):
            raise ConfigError(f"grid.{a}.n", "need both n and pmax for an axis")
        if n is not None:
            try:
                axes.append(GridAxis(name=a, n=n, p_max=pmax))
            except ValueError as exc:
                raise ConfigError(f"grid.{a}.n", str(exc)) from None
    if not axes:
        axes = [GridAxis(name="z", n=4096, p_max=8.0)]
    grid = GridSpec(axes=tuple(axes), hbar=resolved["physics.hbar"])

    packet = GaussianSpec(
        center=tuple(resolved[f"packet.center.{a}"] for a in _AXES),
        sigma=tuple(resolved[f"packet.sigma.{a}"] for a in _AXES),
    )
    window = Window(
        extent=resolved["window.extent"], center=resolved["window.center"]
    )
    try:
        return ExperimentConfig(
            eta=resolved["physics.eta"],
            hbar=resolved["physics.hbar"],
            mass=resolved["physics.mass"],
            window=window,
            window_domain=resolved["window.domain"],
            tensor=CouplingTensor.maxwell(resolved["tensor.hxx"], resolved["tensor.hxz"]),
            pre=_spinor(resolved, "pre"),
            post=_spinor(resolved, "post"),
            grid=grid,
            packet=packet,
            tau_i=resolved["run.tau"],
            tau_f=resolved["run.tau"],
            steps=resolved["run.steps"],
        )
    except ValueError as exc:
        raise ConfigError("config", str(exc)) from None


def parse_config(text: str) -> ExperimentConfig:
    """Parse a configuration document into a validated ExperimentConfig."""
    return build_config(parse_pairs(text))


def resolved_items(values: dict[str, str]) -> list[tuple[str, object]]:
    """Fully resolved (key, value) pairs, defaults included, sorted by key."""
    return sorted(_resolve(values).items())
