"""Optical transport, background injection, beam splitting and gated detection.

Each channel (Stokes or anti-Stokes) is a single spatial mode that passes
through a lossy path to a 50/50 beam splitter feeding two gated click
detectors: A/B on the Stokes side, C/D on the anti-Stokes side.  Background
means are referenced to the beam-splitter input, i.e. they are the filter
leakage that survives the optical path.

Detectors are binary (non-photon-number-resolving) and produce at most one
click per gate.  For n incident photons the click probability is

    1 - (1 - eta)**n * exp(-dark_mean),

which folds dark counts into the per-gate click probability; dark clicks
are indistinguishable from photon clicks in the gated analysis.  Click
timestamps are drawn from a pluggable pulse profile over the gate window
(uniform by default).

All count operations accept scalars or numpy arrays (one entry per trial).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

DETECTOR_IDS = ("A", "B", "C", "D")
STOKES_DETECTORS = ("A", "B")
ANTISTOKES_DETECTORS = ("C", "D")

PulseProfile = Callable[[np.random.Generator, int], np.ndarray]
"""Samples click positions as fractions of the gate width, in [0, 1)."""


def uniform_profile(rng: np.random.Generator, size: int) -> np.ndarray:
    """Default pulse profile: uniform over the gate."""
    return rng.random(size)


@dataclass(frozen=True)
class ChannelParams:
    """Loss and background of one optical channel."""

    transmission: float
    bg_mean: float
    channel_id: str  # "stokes" or "antistokes"

    def __post_init__(self):
        if not 0.0 <= self.transmission <= 1.0:
            raise ValueError(f"transmission must be in [0, 1], got {self.transmission}")
        if self.bg_mean < 0:
            raise ValueError(f"bg_mean must be >= 0, got {self.bg_mean}")
        if self.channel_id not in ("stokes", "antistokes"):
            raise ValueError(f"channel_id must be 'stokes' or 'antistokes', "
                             f"got {self.channel_id!r}")


@dataclass(frozen=True)
class ClickEvent:
    """One detector click.

    ``timestamp`` is absolute: trial_index * cycle_period + offset, where
    the offset lies inside the detector's gate window
    [gate_start, gate_start + gate_width).
    """

    detector_id: str
    timestamp: float
    trial_index: int


def thin(n, eta: float, rng: np.random.Generator):
    """Binomial loss: each of n photons survives independently with prob eta."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"efficiency must be in [0, 1], got {eta}")
    return rng.binomial(n, eta)


def add_background(n, bg_mean: float, rng: np.random.Generator):
    """Add an independent Poisson background count with the given mean."""
    if bg_mean < 0:
        raise ValueError(f"bg_mean must be >= 0, got {bg_mean}")
    size = None if np.isscalar(n) else np.shape(n)
    return n + rng.poisson(bg_mean, size=size)


def transport(n, channel: ChannelParams, rng: np.random.Generator):
    """Thin by the channel transmission, then inject the channel background."""
    return add_background(thin(n, channel.transmission, rng), channel.bg_mean, rng)


def split(n, rng: np.random.Generator):
    """50/50 beam splitter: (k, n - k) with k ~ Binomial(n, 1/2)."""
    k = rng.binomial(n, 0.5)
    return k, n - k


def click_probability(n, det_eff: float, dark_mean: float):
    """Per-gate click probability of a binary detector seeing n photons."""
    return 1.0 - (1.0 - det_eff) ** n * np.exp(-dark_mean)


def detect_batch(n: np.ndarray, det_eff: float, dark_mean: float,
                 gate_start: float, gate_width: float,
                 rng: np.random.Generator,
                 pulse_profile: PulseProfile | None = None):
    """Vectorized gated detection for a batch of trials.

    Returns
    -------
    clicked : bool array, one entry per trial.
    offsets : float array with one within-cycle offset per clicked trial,
        each inside [gate_start, gate_start + gate_width).
    """
    if not 0.0 <= det_eff <= 1.0:
        raise ValueError(f"detector efficiency must be in [0, 1], got {det_eff}")
    if dark_mean < 0:
        raise ValueError(f"dark_mean must be >= 0, got {dark_mean}")
    if gate_width <= 0:
        raise ValueError(f"gate_width must be > 0, got {gate_width}")
    n = np.asarray(n)
    clicked = rng.random(n.shape) < click_probability(n, det_eff, dark_mean)
    profile = pulse_profile or uniform_profile
    fractions = profile(rng, int(clicked.sum()))
    offsets = gate_start + gate_width * fractions
    return clicked, offsets


def detect(n: int, det_eff: float, dark_mean: float,
           gate: tuple[float, float], trial_index: int,
           rng: np.random.Generator,
           pulse_profile: PulseProfile | None = None,
           cycle_period: float = 2e-4,
           detector_id: str = "A") -> ClickEvent | None:
    """Gated detection of a single trial; None when the detector stays dark.

    ``gate`` is (start, width) relative to the trial's cycle start;
    ``cycle_period`` converts the trial index to absolute time.
    """
    gate_start, gate_width = gate
    clicked, offsets = detect_batch(
        np.asarray([n]), det_eff, dark_mean, gate_start, gate_width, rng,
        pulse_profile)
    if not clicked[0]:
        return None
    return ClickEvent(detector_id=detector_id,
                      timestamp=trial_index * cycle_period + offsets[0],
                      trial_index=trial_index)
