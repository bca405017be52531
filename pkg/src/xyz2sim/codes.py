"""Stabilizer code builders: XYZ² honeycomb, XZZX and rotated surface codes.

All three families share one square-lattice bookkeeping. Square-lattice
qubit ``(i, j)`` has id ``i * d + j``; the unit cell ``(i, j)`` has corners
``(i, j)`` (left), ``(i, j + 1)`` (top), ``(i + 1, j)`` (bottom) and
``(i + 1, j + 1)`` (right) once the lattice is drawn rotated by 45 degrees.
The XYZ² code replaces every square-lattice qubit by a vertical link of two
qubits, ``2 * (i * d + j) + t`` with ``t = 0`` bottom and ``t = 1`` top, and
every unit cell by a hexagon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

from .pauli import BitMatrix, PauliOperator, gf2_in_rowspace, gf2_rank

__all__ = [
    "ParameterError",
    "StabilizerCode",
    "build_xyz2",
    "build_xzzx",
    "build_rotated_surface",
    "hadamard_transform",
    "relabel_letters",
    "double_qubits",
    "same_stabilizer_group",
    "in_stabilizer_group",
    "code_to_text",
    "code_from_text",
]

FAMILIES = ("xyz2", "xzzx", "rotated_surface", "yzzy", "xyz2_zlink")
KINDS = ("plaquette", "link", "half_plaquette", "square_plaquette", "boundary_pair")
SQRT3_2 = math.sqrt(3.0) / 2.0


class ParameterError(ValueError):
    """Invalid builder or transform parameters."""


@dataclass(frozen=True)
class StabilizerCode:
    family: str
    d: int
    n: int
    generators: tuple[PauliOperator, ...]
    kinds: tuple[str, ...]
    logical_x: PauliOperator
    logical_z: PauliOperator
    qubit_coords: tuple[tuple[float, float], ...]
    # one entry per generator; None for links
    centers: tuple[tuple[float, float] | None, ...] = field(default=())

    @property
    def logical_y(self) -> PauliOperator:
        return self.logical_x * self.logical_z

    @property
    def num_generators(self) -> int:
        return len(self.generators)

    def check_matrix(self) -> BitMatrix:
        """Symplectic generator matrix, one packed ``x | z << n`` row per generator."""
        return BitMatrix.from_rows((g.symplectic() for g in self.generators), 2 * self.n)

    def generator_indices(self, kind: str) -> list[int]:
        return [g for g, k in enumerate(self.kinds) if k == kind]


def _check_distance(d: int) -> None:
    if not isinstance(d, int) or isinstance(d, bool) or d < 3 or d % 2 == 0:
        raise ParameterError(f"distance must be an odd integer >= 3, got {d!r}")


def _cells(d: int) -> list[tuple[tuple[int, int], str]]:
    """Unit cells carrying a stabilizer: bulk cells, then boundary cells.

    Boundary cells alternate along each side so that every side carries
    (d - 1) / 2 truncated stabilizers.
    """
    cells = [((i, j), "bulk") for i in range(d - 1) for j in range(d - 1)]
    cells += [((-1, j), "boundary") for j in range(1, d - 1, 2)]
    cells += [((i, d - 1), "boundary") for i in range(1, d - 1, 2)]
    cells += [((d - 1, j), "boundary") for j in range(0, d - 1, 2)]
    cells += [((i, -1), "boundary") for i in range(0, d - 1, 2)]
    return cells


def _cell_corners(i: int, j: int) -> dict[str, tuple[int, int]]:
    return {"left": (i, j), "top": (i, j + 1), "bottom": (i + 1, j), "right": (i + 1, j + 1)}


def _inside(rc: tuple[int, int], d: int) -> bool:
    return 0 <= rc[0] < d and 0 <= rc[1] < d


# ---------------------------------------------------------------- square lattice

def _square_coord(i: int, j: int) -> tuple[float, float]:
    return (float(j), float(-i))


def build_rotated_surface(d: int) -> StabilizerCode:
    """Rotated surface code with ``d * d`` qubits.

    Cells with even ``i + j`` carry ZZZZ, odd cells XXXX; the top/bottom
    boundaries are ZZ and the left/right boundaries XX, so the X logical
    runs horizontally and the Z logical vertically.
    """
    _check_distance(d)
    n = d * d
    gens, kinds, centers = [], [], []
    for (i, j), where in _cells(d):
        letter = "Z" if (i + j) % 2 == 0 else "X"
        support = {
            r * d + c: letter
            for r, c in _cell_corners(i, j).values()
            if _inside((r, c), d)
        }
        gens.append(PauliOperator.from_letters(n, support))
        kinds.append("square_plaquette" if where == "bulk" else "boundary_pair")
        centers.append((j + 0.5, -i - 0.5))
    mid = (d - 1) // 2
    lx = PauliOperator.from_letters(n, {mid * d + j: "X" for j in range(d)})
    lz = PauliOperator.from_letters(n, {i * d + mid: "Z" for i in range(d)})
    coords = tuple(_square_coord(i, j) for i in range(d) for j in range(d))
    return StabilizerCode(
        "rotated_surface", d, n, tuple(gens), tuple(kinds), lx, lz, coords, tuple(centers)
    )


def _mask(qubits: Iterable[int], n: int) -> int:
    m = 0
    for q in qubits:
        if not 0 <= q < n:
            raise ParameterError(f"qubit index {q} out of range for n={n}")
        m |= 1 << q
    return m


def _hadamard_op(op: PauliOperator, mask: int) -> PauliOperator:
    x, z = op.x_bits, op.z_bits
    return PauliOperator(op.n, (x & ~mask) | (z & mask), (z & ~mask) | (x & mask))


def hadamard_transform(code: StabilizerCode, qubits: Iterable[int]) -> StabilizerCode:
    """Swap X and Z on the selected qubits of every generator and logical."""
    mask = _mask(qubits, code.n)
    return replace(
        code,
        generators=tuple(_hadamard_op(g, mask) for g in code.generators),
        logical_x=_hadamard_op(code.logical_x, mask),
        logical_z=_hadamard_op(code.logical_z, mask),
    )


def _relabel_op(op: PauliOperator, pair: str, mask: int) -> PauliOperator:
    x, z = op.x_bits, op.z_bits
    if pair == "XY":
        z ^= x & mask
    elif pair == "YZ":
        x ^= z & mask
    elif pair == "XZ":
        return _hadamard_op(op, mask)
    else:
        raise ParameterError(f"unknown letter pair {pair!r}")
    return PauliOperator(op.n, x, z)


def relabel_letters(
    code: StabilizerCode, pair: str, qubits: Iterable[int] | None = None, family: str | None = None
) -> StabilizerCode:
    """Swap the two letters in ``pair`` (``"XY"``, ``"YZ"`` or ``"XZ"``) on ``qubits``."""
    pair = "".join(sorted(pair.upper()))
    mask = _mask(range(code.n) if qubits is None else qubits, code.n)
    return replace(
        code,
        family=family or code.family,
        generators=tuple(_relabel_op(g, pair, mask) for g in code.generators),
        logical_x=_relabel_op(code.logical_x, pair, mask),
        logical_z=_relabel_op(code.logical_z, pair, mask),
    )


def build_xzzx(d: int) -> StabilizerCode:
    """XZZX code: rotated surface code with a Hadamard on every even-parity qubit.

    Logicals are the two pure diagonal representatives: X along the
    anti-diagonal and Z along the main diagonal.
    """
    _check_distance(d)
    base = build_rotated_surface(d)
    even = [i * d + j for i in range(d) for j in range(d) if (i + j) % 2 == 0]
    code = hadamard_transform(base, even)
    lx = PauliOperator.from_letters(code.n, {k * d + (d - 1 - k): "X" for k in range(d)})
    lz = PauliOperator.from_letters(code.n, {k * d + k: "Z" for k in range(d)})
    return replace(code, family="xzzx", logical_x=lx, logical_z=lz)


# ---------------------------------------------------------------- honeycomb

def _link_center(r: int, c: int) -> tuple[float, float]:
    return ((r + c) * SQRT3_2, (c - r) * 1.5)


def _xyz2_coords(d: int) -> tuple[tuple[float, float], ...]:
    coords = []
    for r in range(d):
        for c in range(d):
            x, y = _link_center(r, c)
            coords += [(x, y - 0.5), (x, y + 0.5)]
    return tuple(coords)


def _hex_center(i: int, j: int) -> tuple[float, float]:
    return ((i + j + 1) * SQRT3_2, (j - i) * 1.5)


def build_xyz2(d: int) -> StabilizerCode:
    """XYZ² code on ``2 d^2`` qubits with XX vertical links.

    Hexagon letters run X, Y, Z clockwise from the top-middle qubit:
    X on the two middle qubits, Z/Y (top/bottom) on the left link and
    Y/Z on the right link. Boundary cells keep the surviving half.
    """
    _check_distance(d)
    n = 2 * d * d

    def qid(rc: tuple[int, int], t: int) -> int:
        return 2 * (rc[0] * d + rc[1]) + t

    plaq, half, plaq_c, half_c = [], [], [], []
    for (i, j), where in _cells(d):
        corners = _cell_corners(i, j)
        support: dict[int, str] = {}
        if _inside(corners["top"], d):
            support[qid(corners["top"], 0)] = "X"
        if _inside(corners["right"], d):
            support[qid(corners["right"], 1)] = "Y"
            support[qid(corners["right"], 0)] = "Z"
        if _inside(corners["bottom"], d):
            support[qid(corners["bottom"], 1)] = "X"
        if _inside(corners["left"], d):
            support[qid(corners["left"], 0)] = "Y"
            support[qid(corners["left"], 1)] = "Z"
        op = PauliOperator.from_letters(n, support)
        if where == "bulk":
            plaq.append(op)
            plaq_c.append(_hex_center(i, j))
        else:
            half.append(op)
            half_c.append(_hex_center(i, j))
    links = [
        PauliOperator.from_letters(n, {qid((r, c), 0): "X", qid((r, c), 1): "X"})
        for r in range(d)
        for c in range(d)
    ]
    gens = tuple(plaq + links + half)
    kinds = tuple(["plaquette"] * len(plaq) + ["link"] * len(links) + ["half_plaquette"] * len(half))
    centers = tuple(plaq_c + [None] * len(links) + half_c)
    lx = PauliOperator.from_letters(n, {qid((k, k), 0): "X" for k in range(d)})
    lz_support: dict[int, str] = {}
    for r in range(d):
        lz_support[qid((r, d - 1 - r), 0)] = "Z"
        lz_support[qid((r, d - 1 - r), 1)] = "Y"
    lz = PauliOperator.from_letters(n, lz_support)
    return StabilizerCode("xyz2", d, n, gens, kinds, lx, lz, _xyz2_coords(d), centers)


# pair letters per single-qubit letter, ordered (bottom, top)
_DOUBLING = {
    "X": {"X": ("Z", "Z"), "Y": ("Y", "Z"), "Z": ("X", "I")},
    "Z": {"X": ("X", "X"), "Y": ("Y", "X"), "Z": ("Z", "I")},
}


def _double_op(op: PauliOperator, table: dict[str, tuple[str, str]]) -> PauliOperator:
    support: dict[int, str] = {}
    for q in op.support():
        lo, hi = table[op.letter(q)]
        support[2 * q] = lo
        support[2 * q + 1] = hi
    return PauliOperator.from_letters(2 * op.n, support)


def double_qubits(code: StabilizerCode, link_basis: str = "X") -> StabilizerCode:
    """Replace every qubit of a YZZY-form code by a pair stabilized by XX (or ZZ).

    Letters map to the first listed alternative: for XX pairs
    X -> ZZ, Y -> YZ, Z -> XI; for ZZ pairs X -> XX, Y -> YX, Z -> ZI.
    """
    if code.family != "yzzy":
        raise ParameterError(f"double_qubits needs a yzzy-family code, got {code.family!r}")
    link_basis = link_basis.upper()
    if link_basis not in _DOUBLING:
        raise ParameterError(f"link basis must be X or Z, got {link_basis!r}")
    table = _DOUBLING[link_basis]
    d = code.d
    n2 = 2 * code.n
    gens, kinds, centers = [], [], []
    for g, kind, center in zip(code.generators, code.kinds, code.centers):
        gens.append(_double_op(g, table))
        kinds.append("plaquette" if kind == "square_plaquette" else "half_plaquette")
        # square-lattice cell centre -> hexagon centre
        i, j = -center[1] - 0.5, center[0] - 0.5
        centers.append(_hex_center(round(i), round(j)))
    for q in range(code.n):
        gens.append(PauliOperator.from_letters(n2, {2 * q: link_basis, 2 * q + 1: link_basis}))
        kinds.append("link")
        centers.append(None)
    family = "xyz2" if link_basis == "X" else "xyz2_zlink"
    return StabilizerCode(
        family,
        d,
        n2,
        tuple(gens),
        tuple(kinds),
        _double_op(code.logical_x, table),
        _double_op(code.logical_z, table),
        _xyz2_coords(d),
        tuple(centers),
    )


# ---------------------------------------------------------------- group tests

def in_stabilizer_group(code: StabilizerCode, op: PauliOperator) -> bool:
    return gf2_in_rowspace(op.symplectic(), code.check_matrix())


def same_stabilizer_group(a: StabilizerCode, b: StabilizerCode) -> bool:
    """Row-space equality of the two symplectic generator matrices."""
    if a.n != b.n:
        return False
    ma, mb = a.check_matrix(), b.check_matrix()
    if gf2_rank(ma) != gf2_rank(mb):
        return False
    return all(gf2_in_rowspace(r, ma) for r in mb) and all(gf2_in_rowspace(r, mb) for r in ma)


# ---------------------------------------------------------------- text format

def code_to_text(code: StabilizerCode) -> str:
    lines = [f"{code.family} {code.d} {code.n}"]
    for g, (op, kind) in enumerate(zip(code.generators, code.kinds)):
        lines.append(f"{kind} {g} {op}")
    lines.append(f"LX {code.logical_x}")
    lines.append(f"LZ {code.logical_z}")
    for q, (x, y) in enumerate(code.qubit_coords):
        lines.append(f"Q {q} {x!r} {y!r}")
    for g, c in enumerate(code.centers):
        if c is not None:
            lines.append(f"C {g} {c[0]!r} {c[1]!r}")
    return "\n".join(lines) + "\n"


def code_from_text(text: str) -> StabilizerCode:
    rows = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not rows or len(rows[0]) != 3:
        raise ValueError("missing header line 'family d n'")
    family, d, n = rows[0][0], int(rows[0][1]), int(rows[0][2])
    gens: list[PauliOperator] = []
    kinds: list[str] = []
    coords: list[tuple[float, float]] = []
    centers: dict[int, tuple[float, float]] = {}
    lx = lz = None
    for lineno, row in enumerate(rows[1:], start=2):
        tag = row[0]
        if tag in KINDS:
            if int(row[1]) != len(gens):
                raise ValueError(f"line {lineno}: generator index {row[1]} out of order")
            op = PauliOperator.from_string(row[2])
            if op.n != n:
                raise ValueError(f"line {lineno}: expected {n} letters")
            gens.append(op)
            kinds.append(tag)
        elif tag == "LX":
            lx = PauliOperator.from_string(row[1])
        elif tag == "LZ":
            lz = PauliOperator.from_string(row[1])
        elif tag == "Q":
            coords.append((float(row[2]), float(row[3])))
        elif tag == "C":
            centers[int(row[1])] = (float(row[2]), float(row[3]))
        else:
            raise ValueError(f"line {lineno}: unknown record {tag!r}")
    if lx is None or lz is None:
        raise ValueError("missing LX/LZ lines")
    return StabilizerCode(
        family,
        d,
        n,
        tuple(gens),
        tuple(kinds),
        lx,
        lz,
        tuple(coords),
        tuple(centers.get(g) for g in range(len(gens))),
    )
