"""Syndromes, pure errors, logical classes, and maximum-likelihood decoders.

Two decoders share the :class:`DecodeResult` contract: :func:`ewd_decode`
estimates class likelihoods by Metropolis sampling of each equivalence
class, :func:`exact_mld_decode` sums every chain of each class (small codes).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .codes import StabilizerCode
from .ewd_kernel import ChainSet, metropolis_walk, zobrist_keys
from .noise import NoiseParams, letter_log_probs, make_noise, pauli_to_codes
from .pauli import BitMatrix, PauliOperator, _eliminate, commutes, gf2_nullspace, gf2_solve
from .validation import CapabilityError

__all__ = [
    "CLASSES",
    "ConsistencyError",
    "PreconditionError",
    "Syndrome",
    "DecoderConfig",
    "DecodeResult",
    "P_SAMPLE_PRESETS",
    "syndrome",
    "pure_error",
    "logical_class",
    "class_operator",
    "make_decoder_config",
    "ewd_decode",
    "exact_mld_decode",
    "EXACT_MAX_QUBITS",
]

CLASSES = ("I", "X", "Y", "Z")
EXACT_MAX_QUBITS = 20
TIE_TOL = 1e-9

# tuned sampling-rate ranges quoted for the published runs
P_SAMPLE_PRESETS = {
    "depolarizing": (0.05, 0.6),
    "x_biased": (0.14, 0.37),
    "z_biased": (0.26, 0.41),
    "y_biased": (0.26, 0.41),
}


class ConsistencyError(RuntimeError):
    """The code's syndrome map is not onto; signals a construction bug."""


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class Syndrome:
    """One bit per generator; bit ``g`` packed at position ``g``."""

    bits: int
    length: int

    def __getitem__(self, g: int) -> int:
        return (self.bits >> g) & 1

    def weight(self) -> int:
        return self.bits.bit_count()

    def to_string(self) -> str:
        return "".join(str(self[g]) for g in range(self.length))

    @classmethod
    def from_string(cls, s: str) -> "Syndrome":
        s = s.strip()
        if any(ch not in "01" for ch in s):
            raise ValueError("syndrome string must contain only 0 and 1")
        return cls(sum(1 << g for g, ch in enumerate(s) if ch == "1"), len(s))

    @classmethod
    def from_array(cls, bits) -> "Syndrome":
        return cls(sum(1 << g for g, b in enumerate(bits) if b), len(bits))


# ---------------------------------------------------------------- per-code tables

class _Tables:
    def __init__(self, code: StabilizerCode):
        self.n = code.n
        self.m = code.num_generators
        gx = np.zeros((self.m, self.n), dtype=np.uint8)
        gz = np.zeros((self.m, self.n), dtype=np.uint8)
        for g, op in enumerate(code.generators):
            gx[g] = [(op.x_bits >> q) & 1 for q in range(self.n)]
            gz[g] = [(op.z_bits >> q) & 1 for q in range(self.n)]
        self.gx, self.gz = gx, gz
        width = max(g.weight for g in code.generators)
        self.gen_q = np.zeros((self.m, width), dtype=np.int64)
        self.gen_c = np.zeros((self.m, width), dtype=np.uint8)
        self.gen_w = np.zeros(self.m, dtype=np.int64)
        for g, op in enumerate(code.generators):
            sup = op.support()
            self.gen_w[g] = len(sup)
            for k, q in enumerate(sup):
                self.gen_q[g, k] = q
                self.gen_c[g, k] = ((op.x_bits >> q) & 1) | (((op.z_bits >> q) & 1) << 1)
        self._destab: list[PauliOperator] | None = None
        self._destab_codes: np.ndarray | None = None
        self.class_ops = {c: class_operator(code, c) for c in CLASSES}
        self.class_codes = {c: pauli_to_codes(op) for c, op in self.class_ops.items()}
        self.lx_codes = pauli_to_codes(code.logical_x)
        self.lz_codes = pauli_to_codes(code.logical_z)
        self._code = code
        self._exact = None

    def destabilizers(self) -> list[PauliOperator]:
        """Chain ``T_g`` with syndrome equal to the ``g``-th unit vector."""
        if self._destab is None:
            code = self._code
            n = code.n
            rows = BitMatrix.from_rows((g.z_bits | (g.x_bits << n) for g in code.generators), 2 * n)
            out = []
            for g in range(self.m):
                v = gf2_solve(rows, 1 << g)
                if v is None:
                    raise ConsistencyError(f"syndrome unit vector {g} is not realizable")
                out.append(PauliOperator.from_symplectic(n, v))
            self._destab = out
            self._destab_codes = np.array([pauli_to_codes(t) for t in out], dtype=np.uint8)
        return self._destab

    def destab_codes(self) -> np.ndarray:
        self.destabilizers()
        return self._destab_codes

    def syndrome_codes(self, codes: np.ndarray) -> np.ndarray:
        ex = codes & 1
        ez = codes >> 1
        return ((self.gz.astype(np.int32) @ ex + self.gx.astype(np.int32) @ ez) & 1).astype(np.uint8)

    def pure_error_codes(self, syn: np.ndarray) -> np.ndarray:
        sel = self.destab_codes()[syn.astype(bool)]
        if len(sel) == 0:
            return np.zeros(self.n, dtype=np.uint8)
        return np.bitwise_xor.reduce(sel, axis=0)

    def _letter_solver(self, letter: str):
        """Precomputed solver for syndromes of chains using only ``letter``.

        Returns ``(pivot_cols, pivot_combos, zero_combos, kernel)`` where the
        combos are 0/1 matrices over syndrome bits and ``kernel`` lists the
        letter-only chains (as qubit masks) with trivial syndrome.
        """
        cache = self.__dict__.setdefault("_solvers", {})
        if letter not in cache:
            # column q of A is the syndrome of `letter` on qubit q
            code = _CODE_OF[letter]
            cols = (self.gz if code & 1 else 0) ^ (self.gx if code & 2 else 0)
            cols = np.asarray(cols, dtype=np.uint8)
            rows = [int(sum(1 << q for q in np.flatnonzero(cols[g]))) for g in range(self.m)]
            a = BitMatrix.from_rows(rows, self.n)
            null = gf2_nullspace(a)
            kernel = [] if len(null) > _SEED_KERNEL_MAX else _span_masks(null, self.n)
            work = list(rows)
            pivots, combos = _eliminate(work, self.n, track=True)
            r = len(pivots)
            bits = lambda c: [(c >> g) & 1 for g in range(self.m)]  # noqa: E731
            # float matrices so the GF(2) products below go through BLAS; sums stay exact
            pc = np.array([bits(c) for c in combos[:r]], dtype=np.float64).reshape(r, self.m)
            zc = np.array([bits(c) for c in combos[r:]], dtype=np.float64).reshape(-1, self.m)
            cache[letter] = (np.array(pivots, dtype=np.int64), pc, zc, kernel)
        return cache[letter]

    def letter_syndromes(self, code: int) -> np.ndarray:
        """Row ``q`` is the syndrome of the letter with code ``code`` on qubit ``q``."""
        cols = (self.gz if code & 1 else 0) ^ (self.gx if code & 2 else 0)
        return np.ascontiguousarray(np.asarray(cols, dtype=np.int32).T)

    def _placements(self, axis: str):
        """Off-axis placements and their axis-letter solutions, cached per axis.

        Placement ``k`` puts letter ``b[k]`` on qubit ``q[k]``. The axis-only
        chain needed to complete it is linear in the syndrome, so
        ``y[k]``/``z[k]`` hold the pivot solution and consistency bits of the
        placement's own syndrome and any sum of placements is an XOR of rows.
        """
        cache = self.__dict__.setdefault("_placement_cache", {})
        if axis not in cache:
            pivots, pc, zc, _ = self._letter_solver(axis)
            a = _CODE_OF[axis]
            n = self.n
            q = np.repeat(np.arange(n), 2)
            b = np.tile([c for c in (1, 2, 3) if c != a], n).astype(np.uint8)
            syn = np.stack([self.letter_syndromes(int(c))[k] for k, c in zip(q, b)]).astype(np.float64)
            y = np.zeros((len(q), n), dtype=np.uint8)
            y[:, pivots] = (syn @ pc.T).astype(np.int64) & 1
            z = (syn @ zc.T).astype(np.int64) & 1
            i, j = np.triu_indices(len(q), k=1)
            keep = q[i] != q[j]
            cache[axis] = (q, b, y, z, i[keep], j[keep])
        return cache[axis]

    def near_axis_chains(self, syn: np.ndarray, axis: str, max_off: int = 2) -> np.ndarray:
        """Every chain with syndrome ``syn`` using ``axis`` on all but at most ``max_off`` qubits.

        ``max_off`` is 0, 1 or 2. Returns an array of letter codes, one chain
        per row; empty when the axis-only solution space is too large to list.
        """
        pivots, pc, zc, kernel = self._letter_solver(axis)
        if not kernel:
            return np.zeros((0, self.n), dtype=np.uint8)
        a = np.uint8(_CODE_OF[axis])
        q, b, ys, zs, i, j = self._placements(axis)
        s = syn.astype(np.float64)
        y0 = np.zeros(self.n, dtype=np.uint8)
        y0[pivots] = (pc @ s).astype(np.int64) & 1
        z0 = (zc @ s).astype(np.int64) & 1
        parts = [(y0[None, :], z0[None, :], [])]
        if max_off >= 1:
            parts.append((y0 ^ ys, z0 ^ zs, [(q, b)]))
        if max_off >= 2:
            parts.append((y0 ^ ys[i] ^ ys[j], z0 ^ zs[i] ^ zs[j], [(q[i], b[i]), (q[j], b[j])]))
        out = []
        ker = np.array(kernel, dtype=np.uint8) * a
        for y, z, places in parts:
            chains = y * a
            rows = np.arange(len(chains))
            for qq, bb in places:
                chains[rows, qq] ^= bb
            ok = ~np.any(z, axis=1)
            out.append((chains[ok][:, None, :] ^ ker[None, :, :]).reshape(-1, self.n))
        return np.vstack(out)

    def classes_of_codes(self, diffs: np.ndarray) -> np.ndarray:
        """Vectorized :meth:`class_of_codes`; returns indices into ``CLASSES``."""
        w = self.__dict__.get("_class_weights")
        if w is None:
            lx, lz = self.lx_codes, self.lz_codes
            cols = [np.concatenate([lx >> 1, lx & 1]), np.concatenate([lz >> 1, lz & 1])]
            w = self.__dict__["_class_weights"] = np.stack(cols, axis=1).astype(np.float32)
        # symplectic products with the logicals as one float matmul (exact small integers)
        bits = np.concatenate([diffs & 1, diffs >> 1], axis=1).astype(np.float32)
        anti = (bits @ w).astype(np.int64) & 1
        return _CLASS_INDEX[anti[:, 0], anti[:, 1]]

    def class_of_codes(self, diff: np.ndarray) -> str:
        """Logical class of a syndrome-free chain given as letter codes."""
        dx, dz = diff & 1, diff >> 1
        lx, lz = self.lx_codes, self.lz_codes
        anti_lx = int(np.sum((dx & (lx >> 1)) ^ (dz & (lx & 1)))) & 1
        anti_lz = int(np.sum((dx & (lz >> 1)) ^ (dz & (lz & 1)))) & 1
        return _CLASS_BY_PARITY[(anti_lx, anti_lz)]


_CLASS_BY_PARITY = {(0, 0): "I", (0, 1): "X", (1, 0): "Z", (1, 1): "Y"}
_CODE_OF = {"X": 1, "Z": 2, "Y": 3}
_CLASS_INDEX = np.array([[CLASSES.index(_CLASS_BY_PARITY[(i, j)]) for j in (0, 1)] for i in (0, 1)])
_SEED_KERNEL_MAX = 10  # list at most 2**10 letter-only solutions


def _span_masks(basis: list[int], n: int) -> list[np.ndarray]:
    """All GF(2) combinations of packed vectors, as 0/1 arrays (identity first)."""
    out = [0]
    for b in basis:
        out += [v ^ b for v in out]
    return [np.array([(v >> q) & 1 for q in range(n)], dtype=np.uint8) for v in out]


def _tables(code: StabilizerCode) -> _Tables:
    # memoized on the instance; frozen dataclasses still own a writable __dict__
    t = code.__dict__.get("_decode_tables")
    if t is None:
        t = _Tables(code)
        code.__dict__["_decode_tables"] = t
    return t


# ---------------------------------------------------------------- basic operations

def syndrome(code: StabilizerCode, chain: PauliOperator) -> Syndrome:
    if chain.n != code.n:
        raise ValueError(f"chain acts on {chain.n} qubits, code has {code.n}")
    bits = 0
    for g, gen in enumerate(code.generators):
        if not commutes(gen, chain):
            bits |= 1 << g
    return Syndrome(bits, code.num_generators)


def _check_syndrome(code: StabilizerCode, s: Syndrome) -> None:
    if s.length != code.num_generators:
        raise ValueError(f"syndrome has {s.length} bits, code has {code.num_generators} generators")


def pure_error(code: StabilizerCode, s: Syndrome) -> PauliOperator:
    """Deterministic chain with syndrome ``s``: the product of the matching destabilizers."""
    _check_syndrome(code, s)
    out = PauliOperator.identity(code.n)
    for g, t in enumerate(_tables(code).destabilizers()):
        if s[g]:
            out = out * t
    return out


def class_operator(code: StabilizerCode, c: str) -> PauliOperator:
    return {
        "I": PauliOperator.identity(code.n),
        "X": code.logical_x,
        "Y": code.logical_y,
        "Z": code.logical_z,
    }[c]


def logical_class(code: StabilizerCode, actual: PauliOperator, recovery: PauliOperator) -> str:
    if syndrome(code, actual) != syndrome(code, recovery):
        raise PreconditionError("actual and recovery chains have different syndromes")
    diff = actual * recovery
    anti_lx = not commutes(diff, code.logical_x)
    anti_lz = not commutes(diff, code.logical_z)
    return _CLASS_BY_PARITY[(int(anti_lx), int(anti_lz))]


# ---------------------------------------------------------------- results

@dataclass(frozen=True)
class DecodeResult:
    class_scores: tuple[float, float, float, float]
    chosen_class: str
    tied_classes: tuple[str, ...] = ()
    diagnostics: dict = field(default_factory=dict, compare=False)

    def to_json(self) -> str:
        scores = [s if math.isfinite(s) else None for s in self.class_scores]
        return json.dumps(
            {"class_scores": scores, "chosen": self.chosen_class, "diagnostics": self.diagnostics},
            sort_keys=True,
        )


def _choose(scores: tuple[float, ...]) -> tuple[str, tuple[str, ...]]:
    best = max(scores)
    if best == -math.inf:
        return "I", CLASSES
    tied = tuple(c for c, s in zip(CLASSES, scores) if s >= best - TIE_TOL)
    return tied[0], tied


# ---------------------------------------------------------------- EWD

@dataclass(frozen=True)
class DecoderConfig:
    p_sample: float
    sample_bias: NoiseParams
    steps_per_class: int
    burn_in: int
    unique_chain_cap: int = 2**16

    def __post_init__(self) -> None:
        if not 0.0 < self.p_sample < 1.0:
            raise ValueError(f"p_sample must lie in (0, 1), got {self.p_sample}")
        if not self.steps_per_class >= self.burn_in >= 0:
            raise ValueError("need steps_per_class >= burn_in >= 0")
        if self.unique_chain_cap < 1:
            raise ValueError("unique_chain_cap must be >= 1")


def default_p_sample(p: float) -> float:
    return min(max(p, 0.05), 0.6)


def make_decoder_config(
    n: int,
    physical: NoiseParams,
    p_sample: float | None = None,
    steps_per_class: int | None = None,
    burn_in: int | None = None,
    unique_chain_cap: int = 2**16,
) -> DecoderConfig:
    """Defaults: 200 n proposals per class, 10 n burn-in, p_sample = clamp(p, 0.05, 0.6)."""
    ps = default_p_sample(physical.p) if p_sample is None else float(p_sample)
    steps = 200 * n if steps_per_class is None else int(steps_per_class)
    burn = min(10 * n, steps) if burn_in is None else int(burn_in)
    return DecoderConfig(ps, make_noise(ps, physical.eta, physical.axis), steps, burn, unique_chain_cap)


_CHAIN_SETS: dict[int, ChainSet] = {}


def _chain_set(cap: int) -> ChainSet:
    cs = _CHAIN_SETS.get(cap)
    if cs is None:
        cs = _CHAIN_SETS[cap] = ChainSet(cap)
    return cs


def _seed_words(rng) -> np.ndarray:
    if isinstance(rng, np.random.Generator):
        return rng.integers(0, 2**32, size=4, dtype=np.uint64)
    if isinstance(rng, np.random.SeedSequence):
        return rng.generate_state(4, dtype=np.uint32).astype(np.uint64)
    return np.random.SeedSequence(int(rng)).generate_state(4, dtype=np.uint32).astype(np.uint64)


def _class_starts(t: _Tables, start_codes: np.ndarray, physical: NoiseParams) -> dict[str, np.ndarray]:
    """Starting chain of each class walk.

    The default is ``start * L_c``. Under biased noise that chain is far from
    the typical set and single-generator moves climb out of it slowly, so
    every chain using the bias-axis letter on all but at most two qubits is
    also considered and each class starts from its most probable candidate.
    Labels stay relative to ``start_codes``.
    """
    default = np.array([start_codes ^ t.class_codes[c] for c in CLASSES], dtype=np.uint8)
    near = t.near_axis_chains(t.syndrome_codes(start_codes), physical.axis)
    cands = np.vstack([default, near])
    lp = letter_log_probs(physical)
    bad = np.isinf(lp)
    ones = np.ones(cands.shape[1], dtype=np.float32)
    counts = np.stack([(cands == k).astype(np.float32) @ ones for k in range(4)], axis=1).astype(np.float64)
    forbidden = counts @ bad
    logp = counts @ np.where(bad, 0.0, lp)
    cls = np.concatenate([np.arange(4), t.classes_of_codes(near ^ start_codes)])
    starts = {}
    for k, c in enumerate(CLASSES):
        rows = np.flatnonzero(cls == k)
        # fewest impossible letters first, then highest probability; ties keep the default
        order = np.lexsort((rows, -logp[rows], forbidden[rows]))
        starts[c] = cands[rows[order[0]]]
    return starts


def ewd_walks(
    code: StabilizerCode,
    start_codes: np.ndarray,
    physical: NoiseParams,
    cfg: DecoderConfig,
    rng,
    debug: bool = False,
) -> DecodeResult:
    """Run the four class walks from a pure error given as letter codes."""
    t = _tables(code)
    lp_s = letter_log_probs(cfg.sample_bias)
    forbid = np.isinf(lp_s).astype(np.int64)
    lp_s = np.where(forbid == 1, 0.0, lp_s)
    lp_p = letter_log_probs(physical)
    keys = zobrist_keys(code.n)
    table = _chain_set(cfg.unique_chain_cap)
    seeds = _seed_words(rng)
    starts = _class_starts(t, start_codes, physical)
    scores, accepted, unique, saturated = [], [], [], []
    for k, c in enumerate(CLASSES):
        start = starts[c]
        score, acc, uniq, sat, final = metropolis_walk(
            t.gen_q, t.gen_c, t.gen_w, start, lp_s, forbid, lp_p,
            cfg.steps_per_class, cfg.burn_in, cfg.unique_chain_cap, int(seeds[k]),
            keys, table.keys, table.stamps, table.next_stamp(),
        )
        if debug:
            if not np.array_equal(t.syndrome_codes(final), t.syndrome_codes(start_codes)):
                raise ConsistencyError(f"walk for class {c} left the syndrome coset")
            if t.class_of_codes(final ^ start) != "I":
                raise ConsistencyError(f"walk for class {c} left its equivalence class")
        scores.append(float(score))
        accepted.append(int(acc))
        unique.append(int(uniq))
        saturated.append(bool(sat))
    chosen, tied = _choose(tuple(scores))
    diag = {
        "proposals": 4 * cfg.steps_per_class,
        "accepted": sum(accepted),
        "unique_chains": dict(zip(CLASSES, unique)),
        "saturated": dict(zip(CLASSES, saturated)),
    }
    return DecodeResult(tuple(scores), chosen, tied, diag)


def ewd_decode(
    code: StabilizerCode,
    s: Syndrome,
    physical: NoiseParams,
    cfg: DecoderConfig,
    rng,
    debug: bool = False,
) -> DecodeResult:
    """Effective-weight-and-degeneracy decoding of syndrome ``s``.

    Each class walk starts from the most probable of ``pure_error(s) * L_c``
    and the near-axis chains of that class (see ``_class_starts``) and
    proposes products with a uniformly chosen generator, accepted with the Metropolis rule
    under ``cfg.sample_bias``. A class scores the log of the summed physical
    probabilities of the distinct chains it visited after burn-in.
    ``rng`` is a Generator, SeedSequence or integer seed.
    """
    _check_syndrome(code, s)
    start = pauli_to_codes(pure_error(code, s))
    return ewd_walks(code, start, physical, cfg, rng, debug=debug)


# ---------------------------------------------------------------- exact MLD

class _ExactTables:
    """Stabilizer group split as (disjoint-support block generators) x (the rest).

    Summing over the block part factorizes qubit block by qubit block, so
    only the remaining generators are enumerated.
    """

    def __init__(self, code: StabilizerCode):
        order = sorted(range(code.num_generators), key=lambda g: (code.generators[g].weight, g))
        used = 0
        blocks: list[int] = []
        for g in order:
            sup = code.generators[g].x_bits | code.generators[g].z_bits
            if sup & used == 0:
                blocks.append(g)
                used |= sup
        rest = [g for g in range(code.num_generators) if g not in set(blocks)]
        if len(rest) > EXACT_MAX_QUBITS:
            raise CapabilityError(f"exact decoding would enumerate 2^{len(rest)} elements")
        n = code.n
        # all 2^|rest| products as letter-code rows
        span = np.zeros((1, n), dtype=np.uint8)
        for g in rest:
            span = np.concatenate([span, span ^ pauli_to_codes(code.generators[g])])
        self.span = span
        self.block_qubits = [code.generators[g].support() for g in blocks]
        self.block_codes = [
            pauli_to_codes(code.generators[g])[code.generators[g].support()] for g in blocks
        ]
        self.free_qubits = [q for q in range(n) if not (used >> q) & 1]


def _exact(code: StabilizerCode) -> _ExactTables:
    t = _tables(code)
    if t._exact is None:
        t._exact = _ExactTables(code)
    return t._exact


def _logsumexp(a: np.ndarray, axis: int = -1) -> np.ndarray:
    top = np.max(a, axis=axis, keepdims=True)
    safe = np.where(np.isfinite(top), top, 0.0)
    with np.errstate(divide="ignore"):
        out = np.log(np.sum(np.exp(a - safe), axis=axis, keepdims=True)) + safe
    return np.squeeze(out, axis=axis)


def exact_class_log_probs(code: StabilizerCode, start_codes: np.ndarray, physical: NoiseParams) -> np.ndarray:
    """Log total probability of each class coset (I, X, Y, Z) of ``start_codes``."""
    ex = _exact(code)
    t = _tables(code)
    lp = letter_log_probs(physical)
    starts = np.stack([start_codes ^ t.class_codes[c] for c in CLASSES])  # (4, n)
    chains = starts[:, None, :] ^ ex.span[None, :, :]  # (4, S, n)
    with np.errstate(invalid="ignore"):
        total = lp[chains[..., ex.free_qubits]].sum(axis=-1)
        for qs, bc in zip(ex.block_qubits, ex.block_codes):
            part = chains[..., qs]
            a = lp[part].sum(axis=-1)
            b = lp[part ^ bc].sum(axis=-1)
            total = total + np.logaddexp(a, b)
    return _logsumexp(total, axis=-1)


def exact_mld_decode(code: StabilizerCode, s: Syndrome, physical: NoiseParams) -> DecodeResult:
    """Maximum-likelihood class by exhaustive summation over the stabilizer group."""
    if code.n > EXACT_MAX_QUBITS:
        raise CapabilityError(
            f"exact decoding is capped at n <= {EXACT_MAX_QUBITS} qubits, code has n={code.n}"
        )
    _check_syndrome(code, s)
    start = pauli_to_codes(pure_error(code, s))
    return exact_from_codes(code, start, physical)


def exact_from_codes(code: StabilizerCode, start_codes: np.ndarray, physical: NoiseParams) -> DecodeResult:
    scores = tuple(float(v) for v in exact_class_log_probs(code, start_codes, physical))
    chosen, tied = _choose(scores)
    return DecodeResult(scores, chosen, tied, {"group_size_log2": code.num_generators})
