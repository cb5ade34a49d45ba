"""JSON run configuration: loading, validation and the resolved RunConfig.

Complex numbers are written as ``[re, im]``; a bare real number is accepted
as a complex number with zero imaginary part.  Validation collects every
failure before raising, each prefixed with its field path.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .errors import ConfigError, DegeneracyError, SSQMError
from .linalg import gram_schmidt
from .scenarios.ammonium import OscillationParams
from .scenarios.decay import DecayParams
from .scenarios.kaon import KaonParams, kaon_eigenmodes, kaon_params_sample

log = logging.getLogger(__name__)

SCENARIOS = ("decay", "zeno", "ammonium", "kaon")
FORMATS = ("csv", "json")
CONFIG_TOLERANCE = 1e-9

_TOP_LEVEL = {
    "scenario", "parameters", "n_steps", "tau", "seed",
    "output_format", "output_path", "verbose_z_channels",
}
_PARAM_KEYS = {
    "decay": {"alpha", "beta", "Gamma"},
    "zeno": {"gamma", "t", "n_list"},
    "ammonium": {"a", "b"},
    "kaon": {"alpha", "beta", "gamma", "u", "v", "w", "psi0"},
}
KAON_AMPLITUDES = ("alpha", "beta", "gamma", "u", "v", "w")


@dataclass
class RunConfig:
    scenario: str
    parameters: dict[str, Any]
    n_steps: int
    tau: float
    seed: int | None
    output_format: str
    output_path: Path
    verbose_z_channels: bool
    model: Any = None
    raw: dict[str, Any] = field(default_factory=dict, repr=False)

    def header(self) -> dict[str, Any]:
        """Resolved configuration, including any sampled parameters."""
        return {
            "scenario": self.scenario,
            "parameters": {k: _encode(v) for k, v in self.parameters.items()},
            "n_steps": self.n_steps,
            "tau": self.tau,
            "seed": self.seed,
            "output_format": self.output_format,
            "output_path": str(self.output_path),
            "verbose_z_channels": self.verbose_z_channels,
        }


def _encode(value):
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, (list, tuple)):
        return [_encode(v) for v in value]
    return value


class _Errors(list):
    def add(self, path: str, message: str):
        self.append(f"{path}: {message}")


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)


def _complex(value, path: str, errors: _Errors) -> complex | None:
    if _is_number(value):
        return complex(value)
    if (
        isinstance(value, list)
        and len(value) == 2
        and all(_is_number(x) for x in value)
    ):
        return complex(value[0], value[1])
    errors.add(path, f"expected a number or [re, im] pair, got {value!r}")
    return None


def _real(value, path: str, errors: _Errors, positive=False, nonnegative=False) -> float | None:
    if not _is_number(value):
        errors.add(path, f"expected a finite number, got {value!r}")
        return None
    if positive and not value > 0:
        errors.add(path, f"must be > 0, got {value!r}")
        return None
    if nonnegative and value < 0:
        errors.add(path, f"must be >= 0, got {value!r}")
        return None
    return float(value)


def _int(value, path: str, errors: _Errors, minimum: int | None = None) -> int | None:
    if isinstance(value, bool) or not isinstance(value, int):
        errors.add(path, f"expected an integer, got {value!r}")
        return None
    if minimum is not None and value < minimum:
        errors.add(path, f"must be >= {minimum}, got {value!r}")
        return None
    return value


def _unit_pair(x: complex, y: complex, names: tuple[str, str], errors: _Errors):
    """Check ``|x|^2 + |y|^2 = 1`` at config tolerance and renormalize."""
    total = abs(x) ** 2 + abs(y) ** 2
    if abs(total - 1.0) > CONFIG_TOLERANCE:
        errors.add(
            f"parameters.{names[0]}, parameters.{names[1]}",
            f"|{names[0]}|^2 + |{names[1]}|^2 = {total!r}, must equal 1 within {CONFIG_TOLERANCE:g}",
        )
        return None
    scale = 1.0 / math.sqrt(total)
    return x * scale, y * scale


def _decay(params, tau, errors):
    if "Gamma" in params:
        if "alpha" in params or "beta" in params:
            errors.add("parameters.Gamma", "give either Gamma or alpha/beta, not both")
            return None, {}
        gamma = _real(params["Gamma"], "parameters.Gamma", errors, nonnegative=True)
        if gamma is None or tau is None:
            return None, {}
        p = DecayParams.from_gamma(gamma, tau)
        return p, {"Gamma": gamma, "alpha": p.alpha, "beta": p.beta}
    missing = [k for k in ("alpha", "beta") if k not in params]
    for k in missing:
        errors.add(f"parameters.{k}", "required (or give Gamma)")
    if missing:
        return None, {}
    alpha = _complex(params["alpha"], "parameters.alpha", errors)
    beta = _complex(params["beta"], "parameters.beta", errors)
    if alpha is None or beta is None:
        return None, {}
    pair = _unit_pair(alpha, beta, ("alpha", "beta"), errors)
    if pair is None or tau is None:
        return None, {}
    p = DecayParams(pair[0], pair[1], tau)
    return p, {"alpha": p.alpha, "beta": p.beta}


def _zeno(params, n_steps, tau, errors):
    gamma = None
    if "gamma" not in params:
        errors.add("parameters.gamma", "required")
    else:
        gamma = _real(params["gamma"], "parameters.gamma", errors, positive=True)
    if "t" in params:
        t = _real(params["t"], "parameters.t", errors, positive=True)
    elif n_steps is not None and tau is not None and n_steps > 0:
        t = n_steps * tau
    else:
        errors.add("parameters.t", "required when n_steps * tau is zero")
        t = None
    n_list = params.get("n_list")
    if not isinstance(n_list, list) or not n_list:
        errors.add("parameters.n_list", "expected a non-empty list of positive integers")
        n_list = None
    else:
        checked = [_int(n, f"parameters.n_list[{i}]", errors, minimum=1) for i, n in enumerate(n_list)]
        n_list = None if None in checked else checked
    if gamma is not None and t is not None and n_list is not None:
        for i, n in enumerate(n_list):
            if gamma * (t / n) ** 2 >= 1:
                errors.add(
                    f"parameters.n_list[{i}]",
                    f"gamma (t/n)^2 = {gamma * (t / n) ** 2:g} >= 1; survival not normalizable at n = {n}",
                )
    if errors:
        return None, {}
    resolved = {"gamma": gamma, "t": t, "n_list": n_list}
    return resolved, resolved


def _ammonium(params, errors):
    missing = [k for k in ("a", "b") if k not in params]
    for k in missing:
        errors.add(f"parameters.{k}", "required")
    if missing:
        return None, {}
    a = _complex(params["a"], "parameters.a", errors)
    b = _complex(params["b"], "parameters.b", errors)
    if a is None or b is None:
        return None, {}
    pair = _unit_pair(a, b, ("a", "b"), errors)
    if pair is None:
        return None, {}
    p = OscillationParams(*pair)
    resolved = {"a": p.a, "b": p.b}
    if not p.degenerate:
        resolved.update(u=p.u, v=p.v, theta=p.theta)
    return p, resolved


def _kaon(params, seed, errors):
    psi0 = (1 + 0j, 0j)
    if "psi0" in params:
        raw = params["psi0"]
        if not isinstance(raw, list) or len(raw) != 2:
            errors.add("parameters.psi0", "expected two complex components")
        else:
            comps = [_complex(c, f"parameters.psi0[{i}]", errors) for i, c in enumerate(raw)]
            if None not in comps:
                psi0 = _unit_pair(comps[0], comps[1], ("psi0[0]", "psi0[1]"), errors)

    given = [k for k in KAON_AMPLITUDES if k in params]
    if len(given) == len(KAON_AMPLITUDES):
        amps = {k: _complex(params[k], f"parameters.{k}", errors) for k in KAON_AMPLITUDES}
        if None in amps.values() or psi0 is None:
            return None, {}
        try:
            p = KaonParams(**amps)
        except SSQMError:
            x = abs(amps["alpha"]) ** 2 + abs(amps["beta"]) ** 2 + abs(amps["gamma"]) ** 2
            y = abs(amps["u"]) ** 2 + abs(amps["v"]) ** 2 + abs(amps["w"]) ** 2
            ov = abs(amps["alpha"].conjugate() * amps["u"] + amps["beta"].conjugate() * amps["v"]
                     + amps["gamma"].conjugate() * amps["w"])
            if abs(x - 1) > CONFIG_TOLERANCE:
                errors.add("parameters.alpha, parameters.beta, parameters.gamma",
                           f"|alpha|^2 + |beta|^2 + |gamma|^2 = {x!r}, must equal 1")
            if abs(y - 1) > CONFIG_TOLERANCE:
                errors.add("parameters.u, parameters.v, parameters.w",
                           f"|u|^2 + |v|^2 + |w|^2 = {y!r}, must equal 1")
            if ov > CONFIG_TOLERANCE:
                errors.add("parameters.alpha, parameters.u",
                           f"|alpha* u + beta* v + gamma* w| = {ov!r}, must be 0")
            if errors:
                return None, {}
            # within config tolerance: re-orthonormalize the two columns
            cols = gram_schmidt(np.array([[amps["alpha"], amps["u"]], [amps["beta"], amps["v"]],
                                          [amps["gamma"], amps["w"]]]))
            p = KaonParams(*cols[:, 0], *cols[:, 1])
    elif seed is not None:
        if given:
            log.warning("sampling Kaon amplitudes from seed %d; ignoring given %s", seed, given)
        if psi0 is None:
            return None, {}
        p = kaon_params_sample(seed)
    else:
        missing = [k for k in KAON_AMPLITUDES if k not in params]
        errors.add(
            "parameters",
            f"missing Kaon amplitudes {missing}; give all six or set seed to sample them",
        )
        return None, {}
    try:
        kaon_eigenmodes(p, psi0)
    except DegeneracyError as exc:
        errors.add("parameters", f"degenerate eigenmodes: {exc}")
        return None, {}
    resolved = {k: getattr(p, k) for k in KAON_AMPLITUDES}
    resolved["psi0"] = list(psi0)
    return (p, tuple(psi0)), resolved


def parse_config(data: Any, source: str = "<config>") -> RunConfig:
    """Validate a decoded JSON object; raise ConfigError listing every failure."""
    errors = _Errors()
    if not isinstance(data, dict):
        raise ConfigError([f"{source}: top level must be a JSON object"])
    for key in sorted(set(data) - _TOP_LEVEL):
        errors.add(key, "unknown field")

    scenario = data.get("scenario")
    if scenario not in SCENARIOS:
        errors.add("scenario", f"must be one of {list(SCENARIOS)}, got {scenario!r}")
        scenario = None
    n_steps = _int(data.get("n_steps"), "n_steps", errors, minimum=0)
    tau = _real(data.get("tau"), "tau", errors, positive=True)
    seed = data.get("seed")
    if seed is not None:
        seed = _int(seed, "seed", errors, minimum=0)
    fmt = data.get("output_format", "csv")
    if fmt not in FORMATS:
        errors.add("output_format", f"must be one of {list(FORMATS)}, got {fmt!r}")
    out = data.get("output_path")
    if out is None:
        # never the config file itself, even for json output
        out = f"{Path(source).stem if source != '<config>' else scenario or 'run'}_output.{fmt}"
    elif not isinstance(out, str) or not out:
        errors.add("output_path", "expected a non-empty string")
    verbose = data.get("verbose_z_channels", False)
    if not isinstance(verbose, bool):
        errors.add("verbose_z_channels", "expected true or false")

    params = data.get("parameters", {})
    model, resolved = None, {}
    if not isinstance(params, dict):
        errors.add("parameters", "expected an object")
    elif scenario is not None:
        for key in sorted(set(params) - _PARAM_KEYS[scenario]):
            errors.add(f"parameters.{key}", f"unknown parameter for scenario {scenario!r}")
        sub = _Errors()
        try:
            if scenario == "decay":
                model, resolved = _decay(params, tau, sub)
            elif scenario == "zeno":
                model, resolved = _zeno(params, n_steps, tau, sub)
            elif scenario == "ammonium":
                model, resolved = _ammonium(params, sub)
            else:
                model, resolved = _kaon(params, seed, sub)
        except SSQMError as exc:
            sub.add("parameters", str(exc))
        errors.extend(sub)

    if errors:
        raise ConfigError(errors)
    return RunConfig(
        scenario=scenario,
        parameters=resolved,
        n_steps=n_steps,
        tau=tau,
        seed=seed,
        output_format=fmt,
        output_path=Path(out),
        verbose_z_channels=verbose,
        model=model,
        raw=dict(data),
    )


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigError([f"{path}: file not found"]) from None
    except OSError as exc:
        raise ConfigError([f"{path}: {exc.strerror}"]) from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"{path}: malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"]) from None
    return parse_config(data, str(path))

