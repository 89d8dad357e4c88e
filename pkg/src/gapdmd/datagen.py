"""Synthetic snapshot generators.

Two kinds of data are produced:

``periodic_field``
    A smooth spatial field oscillating with one or more integer periods, in
    the spirit of a vortex street behind a bluff body. Each period ``p``
    contributes its mean and every harmonic up to ``p // 2``, each with its
    own smooth spatial profile and phase field, so a single noiseless period
    spans exactly ``p`` independent directions. Phases are evaluated at
    ``t mod p``, which makes noiseless output periodic bit for bit.
``linear_system``
    Iterates ``x_{t+1} = A x_t + v_t`` with a marginally stable ``A`` made of
    rotation blocks (one per period) and damped components, conjugated by a
    random orthogonal matrix.

Randomness comes from numpy's PCG64 bit generator seeded with ``seed``.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import asdict, dataclass

import numpy as np

from .errors import PeriodWarning, ValidationError
from .matstore import SnapshotMatrix

__all__ = ["GeneratorSpec", "generate", "smooth_profile"]

KINDS = ("periodic_field", "linear_system")
MAX_RANK_RETRIES = 16


@dataclass(frozen=True)
class GeneratorSpec:
    N: int
    L: int
    periods: tuple = (30,)
    amplitudes: tuple = ()
    noise_rel: float = 0.0
    seed: int = 0
    kind: str = "periodic_field"

    def __post_init__(self):
        object.__setattr__(self, "periods", tuple(int(p) for p in self.periods))
        amps = tuple(float(a) for a in self.amplitudes) or (1.0,) * len(self.periods)
        object.__setattr__(self, "amplitudes", amps)
        if self.N < 1:
            raise ValidationError(f"N must be >= 1, got {self.N}")
        if self.L < 2:
            raise ValidationError(f"L must be >= 2, got {self.L}")
        if not self.periods:
            raise ValidationError("at least one period is required")
        if any(p < 2 for p in self.periods):
            raise ValidationError(f"periods must be >= 2, got {self.periods}")
        if len(self.amplitudes) != len(self.periods):
            raise ValidationError("one amplitude per period is required")
        if not (self.noise_rel >= 0.0 and np.isfinite(self.noise_rel)):
            raise ValidationError(f"noise_rel must be a finite value >= 0, got {self.noise_rel}")
        if self.kind not in KINDS:
            raise ValidationError(f"unknown kind {self.kind!r}; expected one of {KINDS}")

    @classmethod
    def from_json(cls, text: str) -> "GeneratorSpec":
        raw = json.loads(text)
        unknown = set(raw) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValidationError(f"unknown generator fields: {sorted(unknown)}")
        return cls(**raw)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def smooth_profile(rng: np.random.Generator, n: int, width: int | None = None) -> np.ndarray:
    """White noise through a moving average of `width` (default ``n // 20``), unit RMS."""
    width = max(1, n // 20 if width is None else width)
    z = rng.standard_normal(n + width - 1)
    s = np.convolve(z, np.full(width, 1.0 / width), mode="valid")
    rms = np.sqrt(np.mean(s * s))
    return s / rms if rms > 0 else s


def _periodic_field(spec: GeneratorSpec, rng: np.random.Generator) -> np.ndarray:
    t = np.arange(1, spec.L + 1)
    x = np.zeros((spec.N, spec.L))
    for p, amp in zip(spec.periods, spec.amplitudes):
        phase_t = 2.0 * np.pi * (t % p) / p
        for h in range(p // 2 + 1):
            profile = smooth_profile(rng, spec.N)
            phase = np.pi * smooth_profile(rng, spec.N) / 3.0
            weight = amp if h == 0 else amp / h
            x += weight * profile[:, None] * np.cos(h * phase_t[None, :] + phase[:, None])
    return x


def _linear_system(spec: GeneratorSpec, rng: np.random.Generator) -> np.ndarray:
    blocks = []
    for p in spec.periods:
        if p == 2:
            blocks.append(np.array([[-1.0]]))
        else:
            a = 2.0 * np.pi / p
            blocks.append(np.array([[np.cos(a), -np.sin(a)], [np.sin(a), np.cos(a)]]))
    used = sum(b.shape[0] for b in blocks)
    if used > spec.N:
        raise ValidationError(f"N={spec.N} too small for {used} oscillatory state components")
    core = np.zeros((spec.N, spec.N))
    i = 0
    for b in blocks:
        d = b.shape[0]
        core[i : i + d, i : i + d] = b
        i += d
    core[np.arange(i, spec.N), np.arange(i, spec.N)] = rng.uniform(-0.9, 0.9, spec.N - i)
    q, r = np.linalg.qr(rng.standard_normal((spec.N, spec.N)))
    q = q * np.sign(np.diag(r))
    a_op = q @ core @ q.T

    x = np.empty((spec.N, spec.L))
    x[:, 0] = rng.standard_normal(spec.N)
    for t in range(spec.L - 1):
        nxt = a_op @ x[:, t]
        if spec.noise_rel > 0:
            scale = spec.noise_rel * np.sqrt(np.mean(x[:, t] ** 2))
            nxt = nxt + scale * rng.standard_normal(spec.N)
        x[:, t + 1] = nxt
    return x


def _seed_sequence(seed: int):
    yield seed
    for attempt in range(1, MAX_RANK_RETRIES):
        yield int(np.random.SeedSequence([seed, attempt]).generate_state(1, np.uint64)[0])


def generate(spec: GeneratorSpec) -> SnapshotMatrix:
    """Generate snapshots according to `spec`.

    For a ``periodic_field`` with a single period ``p`` observable in the
    record, the first ``p`` noiseless snapshots are checked to be linearly
    independent; on failure the field is redrawn from a seed derived
    deterministically from ``spec.seed``. Noise is added afterwards, so the
    noisy and noiseless outputs of one seed share the same clean field.
    """
    longest = max(spec.periods)
    if longest >= spec.L:
        warnings.warn(
            f"period {longest} >= L={spec.L}: periodicity is not observable in the record",
            PeriodWarning,
            stacklevel=2,
        )

    if spec.kind == "linear_system":
        return SnapshotMatrix(_linear_system(spec, np.random.Generator(np.random.PCG64(spec.seed))))

    check_rank = len(spec.periods) == 1 and longest <= min(spec.N, spec.L) - 1
    for seed in _seed_sequence(spec.seed):
        rng = np.random.Generator(np.random.PCG64(seed))
        x = _periodic_field(spec, rng)
        if not check_rank or np.linalg.matrix_rank(x[:, :longest]) == longest:
            break
    else:
        raise ValidationError(f"could not draw {longest} independent snapshots after {MAX_RANK_RETRIES} seeds")

    if spec.noise_rel > 0:
        rms = np.sqrt(np.mean(x * x))
        x = x + spec.noise_rel * rms * rng.standard_normal(x.shape)
    return SnapshotMatrix(x)
