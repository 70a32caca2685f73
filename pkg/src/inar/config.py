"""Config-file and kernel-specification parsing for the CLI.

Kernel grammar: ``none`` (empty kernel), ``geometric:<ratio>``
(alpha_n = ratio^n, truncated), or ``lags:[a1,a2,...]`` (explicit finite
kernel). Monte Carlo configs are flat JSON objects; unknown keys are
rejected by name so typos fail loudly.
"""

from __future__ import annotations

import json

from .errors import ParseError, ValidationError
from .model import ModelParams, geometric_kernel
from .montecarlo import McConfig
from .simulate import DEFAULT_LAMBDA_CAP

__all__ = ["parse_kernel_spec", "parse_config", "CONFIG_KEYS"]

CONFIG_KEYS = {
    "nu": True,
    "kernel": True,
    "T": True,
    "p": True,
    "n_experiments": True,
    "seed": True,
    "cap_negatives": False,
    "lambda_cap": False,
    "case": False,
}  # key -> required

_SEED_LIMIT = 1 << 64


def parse_kernel_spec(spec: str) -> tuple[float, ...]:
    """Parse the kernel grammar into a finite coefficient tuple."""
    if not isinstance(spec, str):
        raise ParseError(f"kernel spec must be a string, got {type(spec).__name__}")
    text = spec.strip()
    if text == "none":
        return ()
    if text.startswith("geometric:"):
        arg = text[len("geometric:"):]
        try:
            ratio = float(arg)
        except ValueError:
            raise ParseError(f"bad geometric ratio {arg!r} in kernel spec") from None
        if not 0.0 < ratio < 1.0:
            raise ValidationError(
                f"kernel: geometric ratio must be in (0, 1), got {ratio}"
            )
        return geometric_kernel(ratio)
    if text.startswith("lags:[") and text.endswith("]"):
        body = text[len("lags:[") : -1].strip()
        if not body:
            return ()
        values = []
        for tok in body.split(","):
            try:
                values.append(float(tok))
            except ValueError:
                raise ParseError(f"bad lag value {tok!r} in kernel spec") from None
        if any(v < 0.0 for v in values):
            raise ValidationError("kernel: lag coefficients must be >= 0")
        return tuple(values)
    raise ParseError(
        f"unrecognized kernel spec {spec!r}; expected 'none', "
        f"'geometric:<ratio>', or 'lags:[a1,a2,...]'"
    )


def _require_number(raw, key: str, minimum: float | None = None) -> float:
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise ValidationError(f"{key}: expected a number, got {raw!r}")
    val = float(raw)
    if minimum is not None and val < minimum:
        raise ValidationError(f"{key}: must be >= {minimum:g}, got {raw!r}")
    return val


def _require_int(raw, key: str, minimum: int) -> int:
    if isinstance(raw, bool) or not isinstance(raw, int):
        raise ValidationError(f"{key}: expected an integer, got {raw!r}")
    if raw < minimum:
        raise ValidationError(f"{key}: must be >= {minimum}, got {raw}")
    return raw


def parse_config(text: str) -> McConfig:
    """Parse and validate a Monte Carlo config document (JSON object)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed config: {exc}") from None
    if not isinstance(doc, dict):
        raise ParseError("config must be a JSON object of key-value pairs")

    unknown = sorted(set(doc) - set(CONFIG_KEYS))
    if unknown:
        raise ParseError(f"unknown config key {unknown[0]!r}")
    missing = sorted(k for k, req in CONFIG_KEYS.items() if req and k not in doc)
    if missing:
        raise ParseError(f"missing required config key {missing[0]!r}")

    nu = _require_number(doc["nu"], "nu", minimum=0.0)
    kernel = parse_kernel_spec(doc["kernel"])
    t = _require_int(doc["T"], "T", minimum=1)
    p = _require_int(doc["p"], "p", minimum=0)
    if p > t - 1:
        raise ValidationError(f"p: must be <= T-1 = {t - 1}, got {p}")
    n_experiments = _require_int(doc["n_experiments"], "n_experiments", minimum=1)
    seed = doc["seed"]
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ValidationError(f"seed: expected an integer, got {seed!r}")
    if not -_SEED_LIMIT < seed < _SEED_LIMIT:
        raise ValidationError(f"seed: must fit in 64 bits, got {seed}")

    cap_negatives = doc.get("cap_negatives", True)
    if not isinstance(cap_negatives, bool):
        raise ValidationError(
            f"cap_negatives: expected true/false, got {cap_negatives!r}"
        )
    lam_cap = _require_number(doc.get("lambda_cap", DEFAULT_LAMBDA_CAP), "lambda_cap")
    if lam_cap <= 0.0:
        raise ValidationError(f"lambda_cap: must be > 0, got {lam_cap!r}")
    case = doc.get("case", doc["kernel"])
    if not isinstance(case, str):
        raise ValidationError(f"case: expected a string label, got {case!r}")

    params = ModelParams(nu=nu, kernel=kernel, kernel_tail=str(doc["kernel"]))
    return McConfig(
        params=params,
        T=t,
        p=p,
        n_experiments=n_experiments,
        base_seed=seed,
        cap_negatives=cap_negatives,
        lam_cap=lam_cap,
        case=case,
    )
