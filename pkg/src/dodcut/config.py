"""Plain key=value configuration files for the command-line tools.

Recognized keys (exactly): N, x0, gamma_deg, theta, rho1, rho2, m, T, cfl,
vf_threshold, stabilize, eta_mode, eta_value, seed.  The cut angle is given
in degrees; theta, rho1, rho2 are radians.  Lines starting with '#' and blank
lines are ignored.
"""

from __future__ import annotations

import math

from .scheme import ProblemConfig

_BOOL = {"true": True, "yes": True, "1": True, "false": False, "no": False, "0": False}


def _parse_bool(s: str) -> bool:
    try:
        return _BOOL[s.strip().lower()]
    except KeyError:
        raise ValueError(f"not a boolean: {s!r}") from None


# key -> (ProblemConfig field, parser)
_KEYS = {
    "N": ("n", int),
    "x0": ("x0", float),
    "gamma_deg": ("gamma", lambda s: math.radians(float(s))),
    "theta": ("theta", float),
    "rho1": ("rho1", float),
    "rho2": ("rho2", float),
    "m": ("m", int),
    "T": ("t_final", float),
    "cfl": ("cfl", float),
    "vf_threshold": ("vf_threshold", float),
    "stabilize": ("stabilize", _parse_bool),
    "eta_mode": ("eta_mode", str.strip),
    "eta_value": ("eta_value", float),
    "seed": ("seed", int),
}


def parse_config_text(text: str) -> ProblemConfig:
    fields = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in _KEYS:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        field, parser = _KEYS[key]
        try:
            fields[field] = parser(value.strip())
        except ValueError as exc:
            raise ValueError(f"line {lineno}: bad value for {key}: {exc}") from None
    return ProblemConfig(**fields)


def parse_config(path) -> ProblemConfig:
    with open(path) as fh:
        return parse_config_text(fh.read())


def config_text(cfg: ProblemConfig) -> str:
    """Render a config back into file form (round-trips through parse_config_text)."""
    lines = [
        f"N = {cfg.n}",
        f"x0 = {cfg.x0!r}",
        f"gamma_deg = {math.degrees(cfg.gamma)!r}",
        f"theta = {cfg.theta!r}",
        f"rho1 = {cfg.rho1!r}",
        f"rho2 = {cfg.rho2!r}",
        f"m = {cfg.m}",
        f"T = {cfg.t_final!r}",
        f"cfl = {cfg.cfl!r}",
        f"vf_threshold = {cfg.vf_threshold!r}",
        f"stabilize = {str(cfg.stabilize).lower()}",
        f"eta_mode = {cfg.eta_mode}",
        f"eta_value = {cfg.eta_value!r}",
        f"seed = {cfg.seed}",
    ]
    return "\n".join(lines) + "\n"
