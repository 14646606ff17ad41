"""System configuration, rate pairs and Rayleigh channel-gain sampling."""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, fields, replace

import numpy as np

from .special_math import DomainError


class Scheme(str, enum.Enum):
    OSS = "oss"
    IL_USS = "il-uss"
    IC_USS = "ic-uss"

    @classmethod
    def parse(cls, value: "str | Scheme") -> "Scheme":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "-")
        for member in cls:
            if member.value == key:
                return member
        raise ValueError(f"unknown scheme {value!r}; expected one of {[m.value for m in cls]}")

    @property
    def label(self) -> str:
        return self.value.upper()


ALL_SCHEMES = (Scheme.OSS, Scheme.IL_USS, Scheme.IC_USS)


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


class InfeasibleConfigError(DomainError):
    """The MBS cannot cancel the SBS interference at the MU with this power split."""


@dataclass(frozen=True)
class SystemConfig:
    """Channel variances (mean |h|^2 per link), MBS SNR and spectrum parameters.

    ``gamma_m`` is linear; the SBS SNR is always ``beta * gamma_m``.
    ``alpha`` is the macro-cell spectrum fraction and only matters for OSS.
    """

    sigma2_mm: float = 1.0
    sigma2_ss: float = 1.0
    sigma2_me: float = 1.0
    sigma2_se: float = 1.0
    sigma2_ms: float = 0.1
    sigma2_sm: float = 0.1
    gamma_m: float = db_to_linear(25.0)
    beta: float = 0.5
    alpha: float = 0.5

    @property
    def gamma_s(self) -> float:
        return self.beta * self.gamma_m

    @property
    def gamma_m_db(self) -> float:
        return linear_to_db(self.gamma_m)

    @property
    def max_beta(self) -> float:
        """Largest SMR for which interference cancelation is possible."""
        return self.sigma2_mm / self.sigma2_sm

    @property
    def gamma_bar_m(self) -> float:
        """Average (linear) SNR spent on the cancelation signal."""
        return self.gamma_s * self.sigma2_sm / self.sigma2_mm

    def with_snr_db(self, gamma_m_db: float) -> "SystemConfig":
        return replace(self, gamma_m=db_to_linear(gamma_m_db))

    def to_dict(self) -> dict[str, float]:
        return asdict(self)


VARIANCE_FIELDS = tuple(f.name for f in fields(SystemConfig) if f.name.startswith("sigma2_"))


def validate(config: SystemConfig, scheme: "Scheme | str | None" = None) -> list[str]:
    """Return every violated invariant of ``config`` (empty list means valid)."""
    problems = []
    for name in VARIANCE_FIELDS:
        value = getattr(config, name)
        if not (value > 0 and math.isfinite(value)):
            problems.append(f"{name} must be a positive finite variance, got {value}")
    if not (config.gamma_m > 0 and math.isfinite(config.gamma_m)):
        problems.append(f"gamma_m must be positive and finite, got {config.gamma_m}")
    if not 0.0 <= config.alpha <= 1.0:
        problems.append(f"alpha must lie in [0, 1], got {config.alpha}")
    if not (config.beta >= 0 and math.isfinite(config.beta)):
        problems.append(f"beta must be >= 0, got {config.beta}")
    if scheme is not None and Scheme.parse(scheme) is Scheme.IC_USS:
        if config.sigma2_sm > 0 and config.sigma2_mm > 0 and config.beta > config.max_beta:
            problems.append(
                f"IC-USS infeasible: beta={config.beta:g} exceeds sigma2_mm/sigma2_sm="
                f"{config.max_beta:g} (P_M/P_S >= sigma2_sm/sigma2_mm is required for the "
                "MBS to cancel SBS interference at the MU)")
    return problems


def require_valid(config: SystemConfig, scheme: "Scheme | str | None" = None) -> None:
    problems = validate(config, scheme)
    if not problems:
        return
    if any(p.startswith("IC-USS infeasible") for p in problems) and len(problems) == 1:
        raise InfeasibleConfigError(problems[0])
    raise DomainError("; ".join(problems))


@dataclass(frozen=True)
class RatePair:
    """Overall (codeword) rates and secrecy rates of both cells, bit/s/Hz."""

    ro_m: float
    ro_s: float
    rs_m: float
    rs_s: float

    def __post_init__(self):
        for name in ("ro_m", "ro_s", "rs_m", "rs_s"):
            value = getattr(self, name)
            if not (value >= 0 and math.isfinite(value)):
                raise DomainError(f"{name} must be a finite non-negative rate, got {value}")
        if self.ro_m < self.rs_m or self.ro_s < self.rs_s:
            raise DomainError(
                f"overall rate must not be below the secrecy rate: {self}")

    @classmethod
    def symmetric(cls, ro: float, rs: float) -> "RatePair":
        return cls(ro, ro, rs, rs)


@dataclass(frozen=True)
class ChannelDraw:
    """Instantaneous power gains |h|^2; each field is a float or a numpy array."""

    g_mm: "float | np.ndarray"
    g_ss: "float | np.ndarray"
    g_me: "float | np.ndarray"
    g_se: "float | np.ndarray"
    g_ms: "float | np.ndarray"
    g_sm: "float | np.ndarray"


def _exponential(rng: np.random.Generator, mean: float, size) -> np.ndarray:
    # 1 - U maps [0, 1) onto (0, 1], so the log is always finite
    return -mean * np.log1p(-rng.random(size))


def sample_draw(config: SystemConfig, rng: np.random.Generator, size: int | None = None) -> ChannelDraw:
    """Independent exponential gains with means equal to the link variances.

    Gains are drawn in the fixed order mm, ss, me, se, ms, sm so a given
    generator state always yields the same draw.
    """
    return ChannelDraw(
        g_mm=_exponential(rng, config.sigma2_mm, size),
        g_ss=_exponential(rng, config.sigma2_ss, size),
        g_me=_exponential(rng, config.sigma2_me, size),
        g_se=_exponential(rng, config.sigma2_se, size),
        g_ms=_exponential(rng, config.sigma2_ms, size),
        g_sm=_exponential(rng, config.sigma2_sm, size),
    )


def stream_rng(seed: int, *key: int) -> np.random.Generator:
    """Generator for the sub-stream ``key`` of ``seed``; independent of worker layout."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=tuple(key))))


BASELINE = SystemConfig()
BASELINE_SECRECY_RATE = 0.5
