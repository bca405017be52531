"""Closed-form logical failure rates under pure X, Y or Z noise.

Sums are evaluated in exact rational arithmetic (the float ``p`` is
converted exactly), then rounded once to float.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb

from .codes import ParameterError, _check_distance

__all__ = ["analytic_pf_pure", "analytic_ps_pure", "pure_noise_model"]


def pure_noise_model(family: str, d: int, axis: str) -> tuple[str, int]:
    """Which formula applies: ``("whole", N)`` or ``("row", d)``.

    ``whole``: one pure logical covering all ``N`` qubits, so failure is a
    majority vote over ``N`` sites. ``row``: ``d`` independent sites along
    the shortest pure logical with odd/even error probabilities.
    """
    _check_distance(d)
    axis = axis.upper()
    if axis not in ("X", "Y", "Z"):
        raise ParameterError(f"axis must be X, Y or Z, got {axis!r}")
    if family == "xyz2":
        return ("row", d) if axis == "X" else ("whole", 2 * d * d)
    if family == "xzzx":
        return ("whole", d * d) if axis == "Y" else ("row", d)
    raise ParameterError(f"no closed form for family {family!r}")


def _odd_even(family: str, p: Fraction) -> tuple[Fraction, Fraction]:
    q = 1 - p
    if family == "xyz2":
        # parity of errors on each two-qubit link of the central row
        return 2 * p * q, q * q + p * p
    return p, q


def _sums(family: str, d: int, p: Fraction, axis: str) -> tuple[Fraction, Fraction]:
    """(failure, success) probabilities; both exact, summing to one."""
    kind, size = pure_noise_model(family, d, axis)
    q = 1 - p
    fail = Fraction(0)
    ok = Fraction(0)
    if kind == "whole":
        for k in range(size + 1):
            term = comb(size, k) * p**k * q ** (size - k)
            if 2 * k > size:
                fail += term
            elif 2 * k < size:
                ok += term
            else:
                # marginal: both complementary chains equally likely
                fail += term / 2
                ok += term / 2
        return fail, ok
    po, pe = _odd_even(family, p)
    for k in range(size + 1):
        term = comb(size, k) * po**k * pe ** (size - k)
        if 2 * k > size:
            fail += term
        else:
            ok += term
    return fail, ok


def _as_fraction(p: float | Fraction) -> Fraction:
    return p if isinstance(p, Fraction) else Fraction(float(p))


def analytic_pf_pure(family: str, d: int, p: float | Fraction, axis: str, exact: bool = False):
    """Logical failure rate of maximum-likelihood decoding under pure noise, ``0 <= p <= 0.5``."""
    fp = _as_fraction(p)
    if not 0 <= fp <= Fraction(1, 2):
        raise ParameterError(f"p must lie in [0, 0.5], got {p}")
    fail, _ = _sums(family, d, fp, axis)
    return fail if exact else float(fail)


def analytic_ps_pure(family: str, d: int, p: float | Fraction, axis: str, exact: bool = False):
    """Success probability; defined on ``[0, 1]`` for identity checks."""
    fp = _as_fraction(p)
    if not 0 <= fp <= 1:
        raise ParameterError(f"p must lie in [0, 1], got {p}")
    _, ok = _sums(family, d, fp, axis)
    return ok if exact else float(ok)


def _pf_unchecked(family: str, d: int, p: float | Fraction, axis: str) -> Fraction:
    return _sums(family, d, _as_fraction(p), axis)[0]
