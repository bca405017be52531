"""Biased Pauli channels: parameters, i.i.d. chain sampling, chain log-probabilities."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .pauli import PauliOperator

__all__ = [
    "NoiseParams",
    "make_noise",
    "parse_noise",
    "sample_chain",
    "sample_codes",
    "chain_log_prob",
    "letter_log_probs",
    "trial_seed_sequence",
    "codes_to_pauli",
    "pauli_to_codes",
]

INF = math.inf


@dataclass(frozen=True)
class NoiseParams:
    p: float
    px: float
    py: float
    pz: float
    axis: str
    eta: float  # math.inf for pure noise

    @property
    def probs(self) -> dict[str, float]:
        return {"I": 1.0 - self.p, "X": self.px, "Y": self.py, "Z": self.pz}

    def spec(self) -> str:
        eta = "inf" if math.isinf(self.eta) else repr(self.eta)
        return f"p={self.p!r},eta={eta},axis={self.axis}"

    @property
    def sampling_order(self) -> str:
        """Letter order used by the sampler: bias axis first, then the rest as X < Y < Z."""
        return self.axis + "".join(s for s in "XYZ" if s != self.axis)


def make_noise(p: float, eta: float = 0.5, axis: str = "Z") -> NoiseParams:
    axis = axis.upper()
    if axis not in ("X", "Y", "Z"):
        raise ValueError(f"bias axis must be X, Y or Z, got {axis!r}")
    p = float(p)
    if not 0.0 <= p < 1.0:
        raise ValueError(f"p must lie in [0, 1), got {p}")
    eta = float(eta)
    if not eta > 0.0:
        raise ValueError(f"eta must be positive, got {eta}")
    if math.isinf(eta):
        on, off = p, 0.0
    else:
        on = p * eta / (1.0 + eta)
        off = p / (2.0 * (1.0 + eta))
    if eta == 0.5:
        on = off = p / 3.0
    per = {s: off for s in "XYZ"}
    per[axis] = on
    return NoiseParams(p, per["X"], per["Y"], per["Z"], axis, eta)


_SPEC_RE = re.compile(r"^\s*p=([^,]+),\s*eta=([^,]+),\s*axis=([XYZxyz])\s*$")


def parse_noise(text: str) -> NoiseParams:
    """Parse ``p=<float>,eta=<float|inf>,axis=<X|Y|Z>``."""
    m = _SPEC_RE.match(text)
    if not m:
        raise ValueError(f"noise spec must look like 'p=0.1,eta=0.5,axis=Z', got {text!r}")
    return make_noise(float(m.group(1)), float(m.group(2)), m.group(3))


# letter codes follow the packed encoding x + 2 z: I=0, X=1, Z=2, Y=3
_CODE = {"I": 0, "X": 1, "Z": 2, "Y": 3}


def letter_log_probs(noise: NoiseParams) -> np.ndarray:
    """Log-probability per letter code (I, X, Z, Y); -inf for impossible letters."""
    out = np.empty(4)
    with np.errstate(divide="ignore"):
        for s, pr in noise.probs.items():
            out[_CODE[s]] = np.log(pr) if pr > 0 else -np.inf
    return out


def trial_seed_sequence(master_seed: int, *key: int) -> np.random.SeedSequence:
    """Independent substream for ``key`` (e.g. point index, trial index, purpose)."""
    return np.random.SeedSequence(master_seed, spawn_key=tuple(int(k) for k in key))


def sample_codes(noise: NoiseParams, uniforms: np.ndarray) -> np.ndarray:
    """Map per-qubit uniforms to letter codes; qubit ``q`` depends on ``uniforms[..., q]`` only."""
    order = noise.sampling_order
    probs = noise.probs
    c1 = probs[order[0]]
    c2 = c1 + probs[order[1]]
    c3 = c2 + probs[order[2]]
    codes = np.zeros(uniforms.shape, dtype=np.uint8)
    codes[uniforms < c3] = _CODE[order[2]]
    codes[uniforms < c2] = _CODE[order[1]]
    codes[uniforms < c1] = _CODE[order[0]]
    # zero-mass letters never appear, whatever the float comparisons say
    for s in "XYZ":
        if probs[s] == 0.0:
            codes[codes == _CODE[s]] = 0
    return codes


def codes_to_pauli(codes: np.ndarray) -> PauliOperator:
    x = z = 0
    for q, c in enumerate(codes.tolist()):
        if c & 1:
            x |= 1 << q
        if c & 2:
            z |= 1 << q
    return PauliOperator(len(codes), x, z)


def pauli_to_codes(op: PauliOperator) -> np.ndarray:
    x = np.array([(op.x_bits >> i) & 1 for i in range(op.n)], dtype=np.uint8)
    z = np.array([(op.z_bits >> i) & 1 for i in range(op.n)], dtype=np.uint8)
    return x + 2 * z


def sample_chain(noise: NoiseParams, n: int, rng: np.random.Generator) -> PauliOperator:
    """Draw one i.i.d. error chain; qubit ``q`` uses the ``q``-th uniform of ``rng``."""
    return codes_to_pauli(sample_codes(noise, rng.random(n)))


def chain_log_prob(noise: NoiseParams, chain: PauliOperator) -> float:
    x, z = chain.x_bits, chain.z_bits
    counts = {
        "X": (x & ~z).bit_count(),
        "Y": (x & z).bit_count(),
        "Z": (z & ~x).bit_count(),
    }
    counts["I"] = chain.n - counts["X"] - counts["Y"] - counts["Z"]
    total = 0.0
    for s, k in counts.items():
        if k == 0:
            continue
        pr = noise.probs[s]
        if pr == 0.0:
            return -INF
        total += k * math.log(pr)
    return total
