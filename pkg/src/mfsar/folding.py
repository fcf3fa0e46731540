"""Exact modular operators and the forward cascaded velocity-folding model.

A moving target's radial velocity is observed through two nested modulo
reductions: pulse-rate sampling folds it by the time-domain blind speed
``v_t = lambda * f_p / 2``, and the cross-channel interferometric phase folds
the result again by the space-domain blind speed ``v_s = lambda * v_a / d``.
Both reductions use the same half-open centered interval ``[-b/2, b/2)``.

The two scalar operators accept floats or exact :class:`fractions.Fraction`
values; results are exact whenever the inputs are.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real

import numpy as np

from .errors import ConfigurationError

__all__ = [
    "ModulusPair",
    "FoldResult",
    "bracket_fold",
    "centered_remainder",
    "blind_speeds",
    "forward_fold",
    "forward_fold_grid",
    "doppler_of",
    "circular_distance",
]


@dataclass(frozen=True)
class ModulusPair:
    """Blind speeds of one wavelength: time-domain ``v_t`` and space-domain ``v_s``."""

    v_t: Real
    v_s: Real

    def __post_init__(self):
        if not (self.v_t > 0 and self.v_s > 0):
            raise ConfigurationError(
                f"blind speeds must be positive, got v_t={self.v_t}, v_s={self.v_s}"
            )


@dataclass(frozen=True)
class FoldResult:
    """Outcome of the cascaded fold of one radial velocity.

    ``v_time`` is the velocity after the pulse-rate fold, ``v_space`` after the
    subsequent cross-channel fold; ``n_t`` and ``n_s`` are the corresponding
    folding integers, so ``v_r = v_space + n_s * v_s + n_t * v_t`` exactly.
    """

    v_time: Real
    v_space: Real
    n_t: int
    n_s: int


def _split(a, b):
    """Return ``(n, r)`` with ``a == n*b + r`` and ``r`` in ``[-b/2, b/2)``.

    Works on floats and Fractions alike.  The fold-up branch triggers at
    exactly ``r >= b/2`` so the interval is half-open on the right.
    """
    if not b > 0:
        raise ConfigurationError(f"modulus must be positive, got {b}")
    half = b / 2
    if -half <= a < half:
        # Inside the principal interval the remainder is the input, exactly.
        return 0, a
    q = math.floor(a / b)
    r = a - q * b
    # Float guard: division rounding can land r a hair outside [0, b).
    if r < 0:
        q -= 1
        r += b
    elif r >= b:
        q += 1
        r -= b
    if 2 * r >= b:
        return q + 1, r - b
    return q, r


def bracket_fold(a, b):
    """Folding integer of ``a`` modulo ``b``: the ``n`` with ``a - n*b`` in ``[-b/2, b/2)``."""
    return _split(a, b)[0]


def centered_remainder(a, b):
    """Absolutely least remainder of ``a`` modulo ``b``, in ``[-b/2, b/2)``."""
    return _split(a, b)[1]


def blind_speeds(lam, f_p, v_a, d) -> ModulusPair:
    """Blind speeds for one carrier wavelength.

    Parameters
    ----------
    lam : wavelength (m)
    f_p : pulse repetition frequency (Hz)
    v_a : platform velocity (m/s)
    d : channel spacing (m)

    Returns
    -------
    ModulusPair with ``v_t = lam*f_p/2`` and ``v_s = lam*v_a/d``.
    """
    for name, value in (("lam", lam), ("f_p", f_p), ("v_a", v_a), ("d", d)):
        if not value > 0:
            raise ConfigurationError(f"{name} must be positive, got {value}")
    return ModulusPair(v_t=lam * f_p / 2, v_s=lam * v_a / d)


def forward_fold(v_r, moduli: ModulusPair) -> FoldResult:
    """Fold a radial velocity through the time modulus, then the space modulus."""
    n_t, v_time = _split(v_r, moduli.v_t)
    n_s, v_space = _split(v_time, moduli.v_s)
    return FoldResult(v_time=v_time, v_space=v_space, n_t=n_t, n_s=n_s)


def forward_fold_grid(v_r, v_t, v_s):
    """Vectorised cascade fold of an array of radial velocities.

    Returns ``(v_time, v_space, n_t, n_s)`` arrays; same branch behaviour as
    the scalar operators (fold-up at exactly ``b/2``).
    """

    def split(a, b):
        q = np.floor(a / b)
        r = a - q * b
        low = r < 0
        q = q - low
        r = r + low * b
        high = r >= b
        q = q + high
        r = r - high * b
        up = r >= b / 2
        return q + up, r - up * b

    v_r = np.asarray(v_r, dtype=float)
    n_t, v_time = split(v_r, float(v_t))
    n_s, v_space = split(v_time, float(v_s))
    return v_time, v_space, n_t.astype(int), n_s.astype(int)


def doppler_of(v_r, lam):
    """Doppler frequency of a radial velocity: ``-2*v_r/lam`` (Hz)."""
    if not lam > 0:
        raise ConfigurationError(f"wavelength must be positive, got {lam}")
    return -2 * v_r / lam


def circular_distance(a, b, modulus):
    """Shortest distance between ``a`` and ``b`` on a circle of the given modulus."""
    d = abs(centered_remainder(a - b, modulus))
    return d


def as_fraction(x, max_denominator: int = 10**6, tol: float = 1e-9) -> Fraction:
    """Rationalise a physical quantity specified with finite precision.

    Raises ConfigurationError when no rational with the given denominator bound
    reproduces ``x`` to within ``tol`` (relative for large values).
    """
    if isinstance(x, (Fraction, int)):
        return Fraction(x)
    f = Fraction(x).limit_denominator(max_denominator)
    if abs(f - Fraction(x)) > tol * max(1.0, abs(x)):
        raise ConfigurationError(
            f"value {x!r} is not a ratio of small integers (closest: {f})"
        )
    return f
