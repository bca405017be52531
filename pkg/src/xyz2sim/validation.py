"""Algebraic validation and exhaustive distance search for stabilizer codes."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .codes import StabilizerCode
from .pauli import BitMatrix, PauliOperator, commutes, gf2_nullspace, gf2_rank

__all__ = [
    "CapabilityError",
    "ValidationReport",
    "SEARCH_CAP_LOG2",
    "validate_code",
    "min_weight_logical",
    "syndrome_directions",
]

SEARCH_CAP_LOG2 = 24
_INNER_LOG2 = 16


class CapabilityError(RuntimeError):
    """A request exceeds a hard computational bound."""


@dataclass
class ValidationReport:
    commutation_ok: bool
    rank: int
    single_error_detection_ok: bool
    logical_ok: bool
    anticommuting_pairs: list[tuple[int, int]] = field(default_factory=list)
    undetected_errors: list[tuple[int, str]] = field(default_factory=list)
    distance_unrestricted: int | None = None
    distance_pure: dict[str, int] = field(default_factory=dict)
    syndrome_directions: dict[str, tuple[float, float]] | None = None
    directionality_ok: bool | None = None

    @property
    def ok(self) -> bool:
        flags = [self.commutation_ok, self.single_error_detection_ok, self.logical_ok]
        if self.directionality_ok is not None:
            flags.append(self.directionality_ok)
        return all(flags)

    def summary(self) -> str:
        def mark(b: bool) -> str:
            return "OK" if b else "FAIL"

        lines = [
            f"commutation        {mark(self.commutation_ok)}",
            f"rank               {self.rank}",
            f"single-error det.  {mark(self.single_error_detection_ok)}",
            f"logicals           {mark(self.logical_ok)}",
        ]
        if self.anticommuting_pairs:
            lines.append(f"  anticommuting generator pairs: {self.anticommuting_pairs[:10]}")
        if self.undetected_errors:
            lines.append(f"  undetected single errors: {self.undetected_errors[:10]}")
        if self.directionality_ok is not None:
            lines.append(f"directionality     {mark(self.directionality_ok)}")
            for s, v in (self.syndrome_directions or {}).items():
                lines.append(f"  {s}: ({v[0]:+.4f}, {v[1]:+.4f})")
        if self.distance_unrestricted is not None:
            lines.append(f"distance           {self.distance_unrestricted}")
        for s, w in sorted(self.distance_pure.items()):
            lines.append(f"distance pure-{s}    {w}")
        return "\n".join(lines)


def _syndrome_int(code: StabilizerCode, op: PauliOperator) -> int:
    out = 0
    for g, gen in enumerate(code.generators):
        if not commutes(gen, op):
            out |= 1 << g
    return out


def _bulk_qubits(code: StabilizerCode) -> list[int]:
    """Qubits inside three full plaquettes and no boundary stabilizer."""
    plaq = code.generator_indices("plaquette")
    half = code.generator_indices("half_plaquette")
    count = [0] * code.n
    on_boundary = [False] * code.n
    for g in plaq:
        for q in code.generators[g].support():
            count[q] += 1
    for g in half:
        for q in code.generators[g].support():
            on_boundary[q] = True
    return [q for q in range(code.n) if count[q] == 3 and not on_boundary[q]]


def _canonical_direction(v: tuple[float, float]) -> tuple[float, float]:
    x, y = v
    norm = math.hypot(x, y)
    x, y = x / norm, y / norm
    if x < -1e-9 or (abs(x) <= 1e-9 and y < 0):
        x, y = -x, -y
    return (x + 0.0, y + 0.0)


def syndrome_directions(code: StabilizerCode) -> tuple[bool, dict[str, tuple[float, float]]]:
    """Check the unidirectional plaquette-pair signature of isolated bulk errors.

    X errors must flag two plaquettes and no link; Y and Z errors two
    plaquettes and one link. Each letter must produce one direction
    (up to sign) over all bulk qubits, and the three must be non-parallel.
    """
    plaq = set(code.generator_indices("plaquette"))
    links = set(code.generator_indices("link"))
    expected_links = {"X": 0, "Y": 1, "Z": 1}
    directions: dict[str, tuple[float, float]] = {}
    ok = True
    bulk = _bulk_qubits(code)
    if not bulk:
        return False, directions
    for s in "XYZ":
        for q in bulk:
            syn = _syndrome_int(code, PauliOperator.single(code.n, q, s))
            flagged = [g for g in range(code.num_generators) if (syn >> g) & 1]
            fp = [g for g in flagged if g in plaq]
            fl = [g for g in flagged if g in links]
            if len(fp) != 2 or len(fl) != expected_links[s] or len(fp) + len(fl) != len(flagged):
                ok = False
                continue
            a, b = code.centers[fp[0]], code.centers[fp[1]]
            v = _canonical_direction((b[0] - a[0], b[1] - a[1]))
            if s not in directions:
                directions[s] = v
            elif math.dist(directions[s], v) > 1e-9:
                ok = False
    if len(directions) == 3:
        vs = list(directions.values())
        for i in range(3):
            for j in range(i):
                if abs(vs[i][0] * vs[j][1] - vs[i][1] * vs[j][0]) < 1e-9:
                    ok = False
    else:
        ok = False
    return ok, directions


def validate_code(code: StabilizerCode, compute_distances: bool = False) -> ValidationReport:
    gens = code.generators
    pairs = [
        (a, b) for a in range(len(gens)) for b in range(a + 1, len(gens)) if not commutes(gens[a], gens[b])
    ]
    mat = code.check_matrix()
    rank = gf2_rank(mat)
    undetected = [
        (q, s)
        for q in range(code.n)
        for s in "XYZ"
        if _syndrome_int(code, PauliOperator.single(code.n, q, s)) == 0
    ]
    lx, lz = code.logical_x, code.logical_z
    logical_ok = (
        all(commutes(g, lx) and commutes(g, lz) for g in gens)
        and not commutes(lx, lz)
        and gf2_rank(BitMatrix.from_rows([*mat, lx.symplectic()], mat.cols)) == rank + 1
        and gf2_rank(BitMatrix.from_rows([*mat, lz.symplectic()], mat.cols)) == rank + 1
    )
    report = ValidationReport(
        commutation_ok=not pairs,
        rank=rank,
        single_error_detection_ok=not undetected,
        logical_ok=logical_ok,
        anticommuting_pairs=pairs,
        undetected_errors=undetected,
    )
    if code.family == "xyz2":
        report.directionality_ok, report.syndrome_directions = syndrome_directions(code)
    if compute_distances:
        if code.num_generators <= SEARCH_CAP_LOG2 and code.n <= 64:
            report.distance_unrestricted = min_weight_logical(code)[0]
        for s in "XYZ":
            try:
                report.distance_pure[s] = min_weight_logical(code, s)[0]
            except CapabilityError:
                pass
    return report


# ---------------------------------------------------------------- distance search

def _span(vectors: list[tuple[int, int]]) -> tuple[np.ndarray, np.ndarray]:
    """All 2^k XOR combinations of (x, z) pairs as uint64 arrays."""
    xs = np.zeros(1, dtype=np.uint64)
    zs = np.zeros(1, dtype=np.uint64)
    for x, z in vectors:
        xs = np.concatenate([xs, xs ^ np.uint64(x)])
        zs = np.concatenate([zs, zs ^ np.uint64(z)])
    return xs, zs


def _parity(a: np.ndarray) -> np.ndarray:
    return np.bitwise_count(a) & np.uint8(1)


def min_weight_logical(code: StabilizerCode, restriction: str | None = None) -> tuple[int, int]:
    """Minimum weight of a logical operator and the number of representatives at that weight.

    With ``restriction`` set to a letter, only operators made of that
    single letter are considered. The enumeration is exhaustive and
    refuses search spaces above ``2**SEARCH_CAP_LOG2`` elements.
    """
    if code.n > 64:
        raise CapabilityError(f"exhaustive search supports n <= 64, got n={code.n}")
    lx, lz = code.logical_x, code.logical_z
    if restriction is None:
        m = code.num_generators
        if m > SEARCH_CAP_LOG2:
            raise CapabilityError(
                f"stabilizer group has 2^{m} elements, above the 2^{SEARCH_CAP_LOG2} search cap"
            )
        gens = [(g.x_bits, g.z_bits) for g in code.generators]
        inner, outer = gens[:_INNER_LOG2], gens[_INNER_LOG2:]
        ix, iz = _span(inner)
        best, count = code.n + 1, 0
        for L in (lx, lz, code.logical_y):
            ox, oz = _span(outer)
            for a, b in zip(ox.tolist(), oz.tolist()):
                w = np.bitwise_count((ix ^ np.uint64(a ^ L.x_bits)) | (iz ^ np.uint64(b ^ L.z_bits)))
                wmin = int(w.min())
                if wmin < best:
                    best, count = wmin, int(np.count_nonzero(w == wmin))
                elif wmin == best:
                    count += int(np.count_nonzero(w == wmin))
        return best, count

    s = restriction.upper()
    if s not in ("X", "Y", "Z"):
        raise ValueError(f"restriction must be X, Y, Z or None, got {restriction!r}")
    # a pure-s operator on support v commutes with g iff <row_g, v> = 0
    rows = []
    for g in code.generators:
        rows.append({"X": g.z_bits, "Z": g.x_bits, "Y": g.x_bits ^ g.z_bits}[s])
    basis = gf2_nullspace(BitMatrix.from_rows(rows, code.n))
    if len(basis) > SEARCH_CAP_LOG2:
        raise CapabilityError(
            f"pure-{s} solution space has 2^{len(basis)} elements, above the 2^{SEARCH_CAP_LOG2} cap"
        )
    sup, _ = _span([(v, 0) for v in basis])
    xs = sup if s in "XY" else np.zeros_like(sup)
    zs = sup if s in "ZY" else np.zeros_like(sup)
    # in the normalizer: logical iff it anticommutes with a logical
    anti_x = _parity((xs & np.uint64(lx.z_bits)) ^ (zs & np.uint64(lx.x_bits)))
    anti_z = _parity((xs & np.uint64(lz.z_bits)) ^ (zs & np.uint64(lz.x_bits)))
    logical = (anti_x | anti_z).astype(bool)
    if not logical.any():
        return 0, 0
    w = np.bitwise_count(sup[logical])
    wmin = int(w.min())
    return wmin, int(np.count_nonzero(w == wmin))
