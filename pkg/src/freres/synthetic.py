"""Synthetic latent-clip generators for spectral analysis and demos.

Five clip families with distinct temporal structure:

* ``noise``   - i.i.d. unit Gaussian tokens per frame; no temporal structure.
* ``static``  - one Gaussian frame repeated, plus a tiny smooth sensor-style
  micro-drift (amplitude 1e-3). The jitter is deliberately smooth, not
  white: white jitter would be statistically indistinguishable from the
  noise clip after spectrum normalization.
* ``slow`` / ``fast`` - a Gaussian base frame plus sinusoidal drift along a
  random latent direction, completing ``motion_rate`` cycles over the clip
  (defaults 0.5 and 4). The drift is band-limited: components at
  rate*m/n for m=1..n with n = ceil(2*rate) and amplitudes m^-1.5, so a
  half-cycle clip is a single tone while faster clips spread smoothly over
  a wider low-frequency band. Moving clips also carry per-frame white
  innovation (amplitude 0.15) modeling content churn; a static scene has
  none.
* ``scenecut`` - two independent static segments joined at ``cut_at``
  (default T // 2).

All randomness flows through the single seed; two calls with equal specs
produce bit-identical sequences.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidSpec
from .model import LatentSequence

__all__ = ["SyntheticKind", "SyntheticSpec", "gen_synthetic", "SYNTHETIC_KINDS"]

SYNTHETIC_KINDS = ("noise", "static", "slow", "fast", "scenecut")

STATIC_JITTER_AMPLITUDE = 1e-3
STATIC_JITTER_RATE = 0.125
INNOVATION_AMPLITUDE = 0.15
BAND_DECAY = 1.5
DEFAULT_RATES = {"slow": 0.5, "fast": 4.0}


@dataclass(frozen=True)
class SyntheticSpec:
    """Recipe for one synthetic clip; deterministic given the seed."""

    kind: str
    frames: int = 16
    grid: tuple[int, int] = (24, 24)
    dim: int = 8
    seed: int = 0
    motion_rate: float | None = None  # slow / fast only
    cut_at: int | None = None  # scenecut only
    jitter: float = STATIC_JITTER_AMPLITUDE

    def __post_init__(self):
        if self.kind not in SYNTHETIC_KINDS:
            raise InvalidSpec(f"unknown kind {self.kind!r}, expected one of {SYNTHETIC_KINDS}")
        if self.frames < 1 or self.dim < 1 or min(self.grid) < 1:
            raise InvalidSpec("frames, grid and dim must all be >= 1")
        if self.kind == "scenecut":
            if self.frames < 2:
                raise InvalidSpec("a scene cut needs at least 2 frames")
            cut = self.frames // 2 if self.cut_at is None else self.cut_at
            if not 1 <= cut <= self.frames - 1:
                raise InvalidSpec(f"cut_at {cut} outside [1, {self.frames - 1}]")


def _banded_drift(frames: int, rate: float, rng: np.random.Generator) -> np.ndarray:
    """Length-T drift: sinusoids at rate*m/n, amplitudes m^-1.5, random phases."""
    n = max(1, int(np.ceil(2.0 * rate)))
    t = np.arange(frames)
    s = np.zeros(frames)
    for m in range(1, n + 1):
        fm = rate * m / n
        phi = rng.uniform(0.0, 2.0 * np.pi)
        s += (m ** -BAND_DECAY) * np.sin(2.0 * np.pi * fm * t / frames + phi)
    return s


def _static_frames(frames, grid, dim, jitter, rng):
    h, w = grid
    base = rng.normal(size=(h, w, dim))
    out = np.broadcast_to(base, (frames,) + base.shape).copy()
    if jitter > 0.0 and frames > 1:
        u = rng.normal(size=dim)
        u /= np.linalg.norm(u)
        drift = _banded_drift(frames, STATIC_JITTER_RATE, rng)
        out += jitter * drift[:, None, None, None] * u
    return out


def _motion_frames(frames, grid, dim, rate, rng):
    h, w = grid
    base = rng.normal(size=(h, w, dim))
    u = rng.normal(size=dim)
    u /= np.linalg.norm(u)
    drift = _banded_drift(frames, rate, rng)
    out = base[None] + drift[:, None, None, None] * u
    out += INNOVATION_AMPLITUDE * rng.normal(size=(frames, h, w, dim))
    return out


def gen_synthetic(spec: SyntheticSpec) -> LatentSequence:
    """Generate one synthetic latent sequence from its spec."""
    rng = np.random.default_rng(spec.seed)
    t, (h, w), d = spec.frames, spec.grid, spec.dim
    if spec.kind == "noise":
        frames = rng.normal(size=(t, h, w, d))
    elif spec.kind == "static":
        frames = _static_frames(t, spec.grid, d, spec.jitter, rng)
    elif spec.kind in ("slow", "fast"):
        rate = DEFAULT_RATES[spec.kind] if spec.motion_rate is None else spec.motion_rate
        if rate <= 0:
            raise InvalidSpec(f"motion_rate must be > 0, got {rate}")
        frames = _motion_frames(t, spec.grid, d, rate, rng)
    else:  # scenecut
        cut = t // 2 if spec.cut_at is None else spec.cut_at
        first = _static_frames(cut, spec.grid, d, spec.jitter, rng)
        second = _static_frames(t - cut, spec.grid, d, spec.jitter, rng)
        frames = np.concatenate([first, second], axis=0)
    return LatentSequence(frames=frames.astype(np.float32), fps=0.0)
