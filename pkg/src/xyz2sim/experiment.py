"""Seeded Monte-Carlo failure-rate estimation, sweeps and threshold crossings.

Every trial draws from its own substream keyed by
``(master_seed, point index, trial index, purpose)``, so results do not
depend on how trials are split across worker processes.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .analytic import analytic_pf_pure
from .codes import StabilizerCode, build_rotated_surface, build_xyz2, build_xzzx, code_to_text
from .decoding import (
    EXACT_MAX_QUBITS,
    _tables,
    exact_from_codes,
    ewd_walks,
    make_decoder_config,
)
from .noise import NoiseParams, make_noise, sample_codes, trial_seed_sequence
from .validation import CapabilityError

__all__ = [
    "ExperimentSpec",
    "PointResult",
    "ExperimentResult",
    "NotBracketedError",
    "build_code",
    "run_trials",
    "sweep",
    "estimate_threshold",
    "CSV_HEADER",
]

BUILDERS = {"xyz2": build_xyz2, "xzzx": build_xzzx, "rotated_surface": build_rotated_surface}
DECODERS = ("ewd", "exact", "analytic")
CSV_HEADER = ["family", "d", "n", "p", "eta", "axis", "decoder", "p_sample",
              "trials", "failures", "pf", "stderr", "seed"]

# substream purposes
SAMPLE, DECODE, TIE = 0, 1, 2


class NotBracketedError(ValueError):
    """The difference of two failure curves never changes sign on the grid."""


def build_code(family: str, d: int) -> StabilizerCode:
    try:
        return BUILDERS[family](d)
    except KeyError:
        raise ValueError(f"unknown code family {family!r}") from None


def code_checksum(code: StabilizerCode) -> str:
    return hashlib.sha256(code_to_text(code).encode()).hexdigest()[:16]


@dataclass
class ExperimentSpec:
    family: str
    distances: list[int]
    p_values: list[float]
    eta: float = 0.5
    axis: str = "Z"
    decoder: str = "ewd"
    trials: int = 10_000
    master_seed: int = 0
    p_sample: float | None = None
    steps_per_class: int | None = None
    burn_in: int | None = None
    unique_chain_cap: int = 2**16

    def __post_init__(self) -> None:
        if self.decoder not in DECODERS:
            raise ValueError(f"decoder must be one of {DECODERS}, got {self.decoder!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        for p in self.p_values:
            if not 0.0 <= p < 1.0:
                raise ValueError(f"p values must lie in [0, 1), got {p}")
        if self.decoder == "exact":
            for d in self.distances:
                n = build_code(self.family, d).n
                if n > EXACT_MAX_QUBITS:
                    raise CapabilityError(
                        f"exact decoder is capped at n <= {EXACT_MAX_QUBITS}; "
                        f"{self.family} d={d} has n={n}"
                    )

    def points(self) -> list[tuple[int, float]]:
        return [(d, p) for d in self.distances for p in self.p_values]

    def to_dict(self) -> dict:
        out = asdict(self)
        if math.isinf(self.eta):
            out["eta"] = "inf"
        return out


@dataclass
class PointResult:
    family: str
    d: int
    n: int
    p: float
    eta: float
    axis: str
    decoder: str
    p_sample: float | None
    trials: int
    failures: int
    pf: float
    stderr: float
    seed: int
    diagnostics: dict = field(default_factory=dict)

    def csv_row(self) -> list[str]:
        eta = "inf" if math.isinf(self.eta) else repr(self.eta)
        ps = "" if self.p_sample is None else repr(self.p_sample)
        return [self.family, str(self.d), str(self.n), repr(self.p), eta, self.axis, self.decoder,
                ps, str(self.trials), str(self.failures), repr(self.pf), repr(self.stderr), str(self.seed)]


@dataclass
class ExperimentResult:
    points: list[PointResult]
    provenance: dict

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for pt in self.points:
            w.writerow(pt.csv_row())
        return buf.getvalue()

    def sidecar(self) -> str:
        payload = {
            "provenance": self.provenance,
            "diagnostics": [
                {"d": pt.d, "p": pt.p, **pt.diagnostics} for pt in self.points
            ],
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    def curve(self, d: int) -> list[PointResult]:
        return sorted((pt for pt in self.points if pt.d == d), key=lambda pt: pt.p)


# ---------------------------------------------------------------- trials

def _trial_chunk(args) -> tuple[int, dict]:
    code, noise, decoder, cfg, master_seed, point, lo, hi = args
    t = _tables(code)
    n = code.n
    failures = 0
    diag = {"accepted": 0, "proposals": 0, "saturated_walks": 0, "ties": 0}
    for trial in range(lo, hi):
        rng = np.random.Generator(np.random.Philox(trial_seed_sequence(master_seed, point, trial, SAMPLE)))
        error = sample_codes(noise, rng.random(n))
        syn = t.syndrome_codes(error)
        start = t.pure_error_codes(syn)
        true_class = t.class_of_codes(error ^ start)
        if decoder == "exact":
            res = exact_from_codes(code, start, noise)
        else:
            res = ewd_walks(code, start, noise, cfg, trial_seed_sequence(master_seed, point, trial, DECODE))
            diag["accepted"] += res.diagnostics["accepted"]
            diag["proposals"] += res.diagnostics["proposals"]
            diag["saturated_walks"] += sum(res.diagnostics["saturated"].values())
        if len(res.tied_classes) > 1:
            diag["ties"] += 1
            if true_class in res.tied_classes:
                u = np.random.Generator(np.random.Philox(
                    trial_seed_sequence(master_seed, point, trial, TIE))).random()
                failures += int(u >= 1.0 / len(res.tied_classes))
            else:
                failures += 1
        elif res.chosen_class != true_class:
            failures += 1
    return failures, diag


def _chunks(trials: int, workers: int) -> list[tuple[int, int]]:
    size = max(1, math.ceil(trials / max(1, workers * 4)))
    return [(lo, min(trials, lo + size)) for lo in range(0, trials, size)]


def run_trials(
    code: StabilizerCode,
    noise: NoiseParams,
    decoder: str,
    trials: int,
    master_seed: int,
    *,
    point: int = 0,
    p_sample: float | None = None,
    steps_per_class: int | None = None,
    burn_in: int | None = None,
    unique_chain_cap: int = 2**16,
    workers: int = 1,
) -> PointResult:
    """Estimate the logical failure rate at one (code, noise) point."""
    if decoder not in ("ewd", "exact"):
        raise ValueError(f"run_trials needs a sampling decoder, got {decoder!r}")
    if decoder == "exact" and code.n > EXACT_MAX_QUBITS:
        raise CapabilityError(f"exact decoder is capped at n <= {EXACT_MAX_QUBITS}, code has n={code.n}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    cfg = None
    if decoder == "ewd":
        cfg = make_decoder_config(code.n, noise, p_sample, steps_per_class, burn_in, unique_chain_cap)
    jobs = [(code, noise, decoder, cfg, master_seed, point, lo, hi) for lo, hi in _chunks(trials, workers)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outs = list(pool.map(_trial_chunk, jobs))
    else:
        outs = [_trial_chunk(j) for j in jobs]
    failures = sum(f for f, _ in outs)
    diag: dict = {}
    for _, dg in outs:
        for k, v in dg.items():
            diag[k] = diag.get(k, 0) + v
    if decoder == "exact":
        diag = {"ties": diag["ties"]}
    pf = failures / trials
    return PointResult(
        family=code.family, d=code.d, n=code.n, p=noise.p, eta=noise.eta, axis=noise.axis,
        decoder=decoder, p_sample=None if cfg is None else cfg.p_sample,
        trials=trials, failures=failures, pf=pf, stderr=math.sqrt(pf * (1.0 - pf) / trials),
        seed=master_seed, diagnostics=diag,
    )


def sweep(spec: ExperimentSpec, workers: int = 1) -> ExperimentResult:
    points = []
    checksums = {}
    for idx, (d, p) in enumerate(spec.points()):
        if spec.decoder == "analytic":
            noise = make_noise(p, math.inf, spec.axis)
            pf = analytic_pf_pure(spec.family, d, p, spec.axis)
            n = 2 * d * d if spec.family == "xyz2" else d * d
            points.append(PointResult(spec.family, d, n, p, math.inf, spec.axis, "analytic", None,
                                      0, 0, pf, 0.0, spec.master_seed))
            continue
        code = build_code(spec.family, d)
        checksums[str(d)] = code_checksum(code)
        noise = make_noise(p, spec.eta, spec.axis)
        points.append(run_trials(
            code, noise, spec.decoder, spec.trials, spec.master_seed, point=idx,
            p_sample=spec.p_sample, steps_per_class=spec.steps_per_class, burn_in=spec.burn_in,
            unique_chain_cap=spec.unique_chain_cap, workers=workers,
        ))
    provenance = {
        "spec": spec.to_dict(),
        "master_seed": spec.master_seed,
        "code_checksums": checksums,
        "version": __version__,
    }
    return ExperimentResult(points, provenance)


# ---------------------------------------------------------------- thresholds

def _crossing(ps: list[float], diff: list[float]) -> tuple[float, int] | None:
    """First upward zero of ``diff``, linearly interpolated, with its left grid index."""
    for i in range(len(ps) - 1):
        a, b = diff[i], diff[i + 1]
        if a < 0.0 <= b:
            if b == 0.0:
                return ps[i + 1], i
            return ps[i] + (ps[i + 1] - ps[i]) * (-a) / (b - a), i
    return None


def estimate_threshold(
    results: ExperimentResult, d_pair: tuple[int, int]
) -> tuple[float, tuple[float, float]]:
    """Crossing point of the failure curves of two distances.

    ``p_th`` interpolates the sign change of ``pf(d_large) - pf(d_small)``;
    the interval is the bracketing grid cell, widened to the crossings of
    the difference shifted by plus/minus its combined standard error.
    """
    small, large = sorted(d_pair)
    a = {pt.p: pt for pt in results.curve(small)}
    b = {pt.p: pt for pt in results.curve(large)}
    ps = sorted(set(a) & set(b))
    if len(ps) < 2:
        raise NotBracketedError(f"need a common p grid for d={small} and d={large}")
    diff = [b[p].pf - a[p].pf for p in ps]
    sig = [math.hypot(a[p].stderr, b[p].stderr) for p in ps]
    hit = _crossing(ps, diff)
    if hit is None:
        raise NotBracketedError(f"pf(d={large}) - pf(d={small}) has no upward sign change on the grid")
    p_th, i = hit
    lo, hi = (p_th, p_th) if p_th == ps[i + 1] else (ps[i], ps[i + 1])
    up = _crossing(ps, [x + s for x, s in zip(diff, sig)])
    down = _crossing(ps, [x - s for x, s in zip(diff, sig)])
    lo = min(lo, up[0] if up else ps[0])
    hi = max(hi, down[0] if down else ps[-1])
    return p_th, (lo, hi)


def default_workers() -> int:
    return int(os.environ.get("XYZ2SIM_WORKERS", "1"))
