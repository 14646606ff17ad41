"""Per-realization link capacities (bit/s/Hz) for OSS, IL-USS and IC-USS.

All functions accept scalar or array-valued :class:`ChannelDraw` fields and
broadcast elementwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ChannelDraw, InfeasibleConfigError, Scheme, SystemConfig


@dataclass(frozen=True)
class CapacitySet:
    c_mm: "float | np.ndarray"
    c_ss: "float | np.ndarray"
    c_me: "float | np.ndarray"
    c_se: "float | np.ndarray"


def oss_capacities(config: SystemConfig, draw: ChannelDraw) -> CapacitySet:
    a = config.alpha
    gm, gs = config.gamma_m, config.gamma_s
    return CapacitySet(
        c_mm=a * np.log2(1.0 + gm * draw.g_mm),
        c_ss=(1.0 - a) * np.log2(1.0 + gs * draw.g_ss),
        c_me=a * np.log2(1.0 + gm * draw.g_me),
        c_se=(1.0 - a) * np.log2(1.0 + gs * draw.g_se),
    )


def il_uss_capacities(config: SystemConfig, draw: ChannelDraw) -> CapacitySet:
    """Both cells share the band; each receiver treats the other cell as noise."""
    gm, gs = config.gamma_m, config.gamma_s
    return CapacitySet(
        c_mm=np.log2(1.0 + gm * draw.g_mm / (gs * draw.g_sm + 1.0)),
        c_ss=np.log2(1.0 + gs * draw.g_ss / (gm * draw.g_ms + 1.0)),
        c_me=np.log2(1.0 + gm * draw.g_me / (gs * draw.g_se + 1.0)),
        c_se=np.log2(1.0 + gs * draw.g_se / (gm * draw.g_me + 1.0)),
    )


def ic_uss_capacities(config: SystemConfig, draw: ChannelDraw) -> CapacitySet:
    """Interference-canceled underlay sharing.

    The MBS spends average SNR ``gamma_bar_m`` on a cancelation signal whose
    instantaneous SNR is ``gamma_s * g_sm / sigma2_mm``; the SBS weight scales
    its signal by ``|h_mm| / sigma_mm``, which is why ``g_mm`` appears in the
    small-cell terms.
    """
    gm, gs = config.gamma_m, config.gamma_s
    info = gm - config.gamma_bar_m
    if info < 0:
        raise InfeasibleConfigError(
            f"beta={config.beta:g} exceeds sigma2_mm/sigma2_sm={config.max_beta:g}; "
            "the cancelation signal would need more than the MBS power")
    inst = gs * draw.g_sm / config.sigma2_mm
    weighted = draw.g_mm * gs / config.sigma2_mm
    return CapacitySet(
        c_mm=np.log2(1.0 + info * draw.g_mm),
        c_ss=np.log2(1.0 + draw.g_ss * weighted / (draw.g_ms * (info + inst) + 1.0)),
        # numerator uses the average cancelation power, denominator the instantaneous one
        c_me=np.log2(1.0 + draw.g_me * info / (draw.g_me * inst + draw.g_se * weighted + 1.0)),
        c_se=np.log2(1.0 + draw.g_se * weighted / (draw.g_me * (info + inst) + 1.0)),
    )


_DISPATCH = {
    Scheme.OSS: oss_capacities,
    Scheme.IL_USS: il_uss_capacities,
    Scheme.IC_USS: ic_uss_capacities,
}


def capacities(scheme: "Scheme | str", config: SystemConfig, draw: ChannelDraw) -> CapacitySet:
    return _DISPATCH[Scheme.parse(scheme)](config, draw)
