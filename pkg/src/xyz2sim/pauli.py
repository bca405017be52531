"""Phase-free Pauli operators and GF(2) linear algebra on int bitsets.

Bit ``q`` of an integer stands for qubit ``q`` (or column ``q`` of a
:class:`BitMatrix`). Python ints are arbitrary width, so the same code
handles 9-qubit and 50-qubit operators.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

__all__ = [
    "DimensionError",
    "PauliOperator",
    "BitMatrix",
    "pauli_mul",
    "commutes",
    "weight",
    "gf2_rank",
    "gf2_solve",
    "gf2_nullspace",
    "gf2_in_rowspace",
    "letters",
]

letters = "IXZY"  # indexed by x_bit + 2 * z_bit


class DimensionError(ValueError):
    """Raised when operands act on different numbers of qubits/columns."""


@dataclass(frozen=True)
class PauliOperator:
    n: int
    x_bits: int = 0
    z_bits: int = 0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"qubit count must be positive, got {self.n}")
        full = (1 << self.n) - 1
        if self.x_bits & ~full or self.z_bits & ~full or self.x_bits < 0 or self.z_bits < 0:
            raise ValueError(f"bit vectors do not fit in {self.n} qubits")

    @classmethod
    def identity(cls, n: int) -> "PauliOperator":
        return cls(n)

    @classmethod
    def from_string(cls, s: str) -> "PauliOperator":
        """Parse ``"XIZY..."`` with qubit 0 first."""
        x = z = 0
        for q, ch in enumerate(s.strip().upper()):
            if ch == "X":
                x |= 1 << q
            elif ch == "Z":
                z |= 1 << q
            elif ch == "Y":
                x |= 1 << q
                z |= 1 << q
            elif ch not in "I_":
                raise ValueError(f"invalid Pauli letter {ch!r} at position {q}")
        return cls(len(s.strip()), x, z)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> "PauliOperator":
        if not 0 <= qubit < n:
            raise ValueError(f"qubit {qubit} out of range for n={n}")
        return cls.from_letters(n, {qubit: letter})

    @classmethod
    def from_letters(cls, n: int, support: dict[int, str]) -> "PauliOperator":
        x = z = 0
        for q, ch in support.items():
            if ch in ("X", "Y"):
                x |= 1 << q
            if ch in ("Z", "Y"):
                z |= 1 << q
            if ch not in "IXYZ":
                raise ValueError(f"invalid Pauli letter {ch!r}")
        return cls(n, x, z)

    def letter(self, q: int) -> str:
        return letters[((self.x_bits >> q) & 1) | (((self.z_bits >> q) & 1) << 1)]

    def support(self) -> list[int]:
        bits = self.x_bits | self.z_bits
        return [q for q in range(self.n) if (bits >> q) & 1]

    @property
    def weight(self) -> int:
        return (self.x_bits | self.z_bits).bit_count()

    def symplectic(self) -> int:
        """Pack as one 2n-bit int: x bits low, z bits high."""
        return self.x_bits | (self.z_bits << self.n)

    @classmethod
    def from_symplectic(cls, n: int, v: int) -> "PauliOperator":
        full = (1 << n) - 1
        return cls(n, v & full, (v >> n) & full)

    def __mul__(self, other: "PauliOperator") -> "PauliOperator":
        return pauli_mul(self, other)

    def __str__(self) -> str:
        return "".join(self.letter(q) for q in range(self.n))

    def __repr__(self) -> str:
        return f"PauliOperator({str(self)!r})"


def _check_dims(a: PauliOperator, b: PauliOperator) -> None:
    if a.n != b.n:
        raise DimensionError(f"qubit counts differ: {a.n} vs {b.n}")


def pauli_mul(a: PauliOperator, b: PauliOperator) -> PauliOperator:
    _check_dims(a, b)
    return PauliOperator(a.n, a.x_bits ^ b.x_bits, a.z_bits ^ b.z_bits)


def commutes(a: PauliOperator, b: PauliOperator) -> bool:
    _check_dims(a, b)
    return ((a.x_bits & b.z_bits) ^ (a.z_bits & b.x_bits)).bit_count() % 2 == 0


def weight(a: PauliOperator) -> int:
    return a.weight


@dataclass(frozen=True)
class BitMatrix:
    """Dense GF(2) matrix; ``data[i]`` is row ``i`` with column ``j`` at bit ``j``."""

    rows: int
    cols: int
    data: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.data) != self.rows:
            raise DimensionError(f"expected {self.rows} rows, got {len(self.data)}")
        full = (1 << self.cols) - 1
        for r in self.data:
            if r < 0 or r & ~full:
                raise DimensionError(f"row does not fit in {self.cols} columns")

    @classmethod
    def from_rows(cls, rows: Iterable[int], cols: int) -> "BitMatrix":
        data = tuple(rows)
        return cls(len(data), cols, data)

    @classmethod
    def from_lists(cls, rows: Sequence[Sequence[int]]) -> "BitMatrix":
        cols = len(rows[0]) if rows else 0
        packed = []
        for row in rows:
            if len(row) != cols:
                raise DimensionError("ragged rows")
            packed.append(sum(1 << j for j, b in enumerate(row) if b & 1))
        return cls(len(packed), cols, tuple(packed))

    @classmethod
    def identity(cls, k: int) -> "BitMatrix":
        return cls(k, k, tuple(1 << i for i in range(k)))

    def __iter__(self) -> Iterator[int]:
        return iter(self.data)

    def to_lists(self) -> list[list[int]]:
        return [[(r >> j) & 1 for j in range(self.cols)] for r in self.data]

    def matvec(self, x: int) -> int:
        """Return ``M x`` packed with row ``i`` at bit ``i``."""
        out = 0
        for i, r in enumerate(self.data):
            out |= ((r & x).bit_count() & 1) << i
        return out


def _eliminate(rows: list[int], cols: int, track: bool = False):
    """Reduced row echelon form in place.

    Pivot search scans rows top-down so ties go to the lowest row index.
    Returns ``(pivot_cols, combos)`` where ``combos[i]`` records which
    original rows were summed into row ``i`` (only when ``track``).
    """
    combos = [1 << i for i in range(len(rows))] if track else None
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        bit = 1 << c
        pivot = next((i for i in range(r, len(rows)) if rows[i] & bit), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        if track:
            combos[r], combos[pivot] = combos[pivot], combos[r]
        for i in range(len(rows)):
            if i != r and rows[i] & bit:
                rows[i] ^= rows[r]
                if track:
                    combos[i] ^= combos[r]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return pivots, combos


def gf2_rank(m: BitMatrix) -> int:
    pivots, _ = _eliminate(list(m.data), m.cols)
    return len(pivots)


def gf2_solve(m: BitMatrix, b: int | Sequence[int]) -> int | None:
    """Solve ``M x = b`` over GF(2).

    ``b`` is either a packed int (bit ``i`` for row ``i``) or a 0/1
    sequence of length ``m.rows``. Returns a packed ``x`` (free variables
    set to zero) or ``None`` if the system is inconsistent.
    """
    if not isinstance(b, int):
        if len(b) != m.rows:
            raise DimensionError(f"rhs length {len(b)} != {m.rows} rows")
        b = sum(1 << i for i, v in enumerate(b) if v & 1)
    elif b < 0 or b >> m.rows:
        raise DimensionError(f"rhs does not fit in {m.rows} rows")
    # augment each row with its rhs bit in column `cols`
    rows = [r | (((b >> i) & 1) << m.cols) for i, r in enumerate(m.data)]
    pivots, _ = _eliminate(rows, m.cols)
    x = 0
    rhs_bit = 1 << m.cols
    for i, c in enumerate(pivots):
        if rows[i] & rhs_bit:
            x |= 1 << c
    for i in range(len(pivots), len(rows)):
        if rows[i] & rhs_bit:
            return None
    return x


def gf2_nullspace(m: BitMatrix) -> list[int]:
    """Basis of ``{x : M x = 0}``, one packed vector per free column."""
    rows = list(m.data)
    pivots, _ = _eliminate(rows, m.cols)
    pivot_set = set(pivots)
    basis = []
    for f in range(m.cols):
        if f in pivot_set:
            continue
        v = 1 << f
        for i, c in enumerate(pivots):
            if (rows[i] >> f) & 1:
                v |= 1 << c
        basis.append(v)
    return basis


def gf2_in_rowspace(v: int, m: BitMatrix) -> bool:
    rows = list(m.data)
    pivots, _ = _eliminate(rows, m.cols)
    for i, c in enumerate(pivots):
        if (v >> c) & 1:
            v ^= rows[i]
    return v == 0
