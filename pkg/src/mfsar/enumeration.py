"""Brute-force determinable-velocity-size computation for dual-fold systems.

For a multi-wavelength system whose blind-speed ratio is the reduced rational
p/q, the velocity range over which the vector of space-domain remainders stays
injective is bounded below by ``lcm(v_s)/q`` and above by ``lcm(v_t)``, but its
actual value between those bounds is irregular.  This module finds it by exact
enumeration: walk candidate velocities outward from zero on a step grid and
stop at the first repeated remainder vector.

All arithmetic is exact: inputs are rationalised, scaled to integers by the
common denominator, and remainder vectors are compared as integer tuples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import ConfigurationError
from .folding import as_fraction
from .system import RadarConfig

__all__ = ["EnumerationReport", "lcm_rational", "determinable_size", "size_sweep"]

SWEEP_CSV_HEADER = "lambda1,lambda2,vt1,vs1,vt2,vs2,v_lb,size,v_ub"


@dataclass(frozen=True)
class EnumerationReport:
    """Determinable velocity size with its two analytic bounds.

    ``collision_pair`` holds the two velocities whose remainder vectors first
    coincide during the walk; their distance equals ``size``.
    """

    size: Fraction
    v_lb: Fraction
    v_ub: Fraction
    collision_pair: tuple

    def __post_init__(self):
        if not (self.v_lb <= self.size <= self.v_ub):
            raise AssertionError(
                f"bounds violated: {self.v_lb} <= {self.size} <= {self.v_ub}"
            )


def lcm_rational(values) -> Fraction:
    """Least positive rational that is an integer multiple of every input."""
    vals = [as_fraction(v) for v in values]
    if not vals:
        raise ConfigurationError("lcm of an empty list")
    if any(v <= 0 for v in vals):
        raise ConfigurationError("lcm inputs must be positive")
    den = math.lcm(*(v.denominator for v in vals))
    num = math.lcm(*(v.numerator * (den // v.denominator) for v in vals))
    return Fraction(num, den)


def _centered_int(a: int, b: int):
    """(n, r) with a == n*b + r, r integer in [-b/2, b/2) — exact."""
    n, r = divmod(a, b)
    if 2 * r >= b:
        return n + 1, r - b
    return n, r


def determinable_size(v_t_list, v_s_list, step=1) -> EnumerationReport:
    """Enumerate the determinable velocity size of a multi-wavelength system.

    Parameters
    ----------
    v_t_list, v_s_list : positive rationals, one pair per wavelength, sharing
        one exact reduced ratio p/q.
    step : walk step in m/s (exact; default 1).  The enumerated size is
        step-dependent for non-integral moduli, so keep moduli and step
        commensurate.

    Walks 0, -step, +step, -2*step, ... computing the space-domain remainder
    vector of each candidate; the first duplicate vector marks the maximum
    determinable velocity, and the size is twice that value.
    """
    vts = [as_fraction(v) for v in v_t_list]
    vss = [as_fraction(v) for v in v_s_list]
    if len(vts) != len(vss) or len(vts) < 2:
        raise ConfigurationError("need matching v_t/v_s lists with at least two wavelengths")
    if any(v <= 0 for v in vts + vss):
        raise ConfigurationError("blind speeds must be positive")
    ratios = {vt / vs for vt, vs in zip(vts, vss)}
    if len(ratios) != 1:
        raise ConfigurationError(f"wavelengths disagree on v_t/v_s: {sorted(ratios)}")
    ratio = ratios.pop()
    step = as_fraction(step)
    if step <= 0:
        raise ConfigurationError("step must be positive")

    v_lb = lcm_rational(vss) / ratio.denominator
    v_ub = lcm_rational(vts)

    # Scale everything to integers so remainder vectors compare exactly.
    scale = math.lcm(*(x.denominator for x in vts + vss + [step]))
    vt_i = [int(v * scale) for v in vts]
    vs_i = [int(v * scale) for v in vss]
    step_i = int(step * scale)

    def residues(v: int) -> tuple:
        out = []
        for vt, vs in zip(vt_i, vs_i):
            _, v_time = _centered_int(v, vt)
            _, v_space = _centered_int(v_time, vs)
            out.append(v_space)
        return tuple(out)

    # Collision is guaranteed by the v_ub periodicity, so cap the walk there.
    limit = int(v_ub * scale) // 2 + step_i
    if limit // step_i > 2_000_000:
        # A plausible system collides within a few hundred steps; a bound this
        # large means the inputs are effectively incommensurable (e.g. floats
        # of irrational moduli rationalised to huge denominators).
        raise ConfigurationError(
            f"enumeration would need {limit // step_i} steps; moduli "
            f"{v_t_list}/{v_s_list} are effectively incommensurable at step {step}")
    seen = {}
    v = 0
    while True:
        for cand in ((v,) if v == 0 else (-v, v)):
            vec = residues(cand)
            if vec in seen:
                half = Fraction(abs(cand), scale)
                pair = (Fraction(seen[vec], scale), Fraction(cand, scale))
                return EnumerationReport(size=2 * half, v_lb=v_lb, v_ub=v_ub,
                                         collision_pair=pair)
            seen[vec] = cand
        v += step_i
        if v > limit:
            raise AssertionError("walk exceeded the periodicity bound without collision")


def size_sweep(cfg: RadarConfig, lambda_pairs) -> list:
    """Determinable size for a list of wavelength pairs of one system.

    Returns one row per pair:
    ``(lambda_pair, v_t1, v_s1, v_t2, v_s2, report)``.
    """
    f_p = as_fraction(cfg.f_p)
    v_a = as_fraction(cfg.v_a)
    d = as_fraction(cfg.d)
    rows = []
    for lam1, lam2 in lambda_pairs:
        l1, l2 = as_fraction(lam1), as_fraction(lam2)
        vts = [l1 * f_p / 2, l2 * f_p / 2]
        vss = [l1 * v_a / d, l2 * v_a / d]
        report = determinable_size(vts, vss)
        rows.append(((lam1, lam2), vts[0], vss[0], vts[1], vss[1], report))
    return rows


def _num(x: Fraction) -> str:
    return str(int(x)) if x.denominator == 1 else str(float(x))


def sweep_to_csv(rows) -> str:
    """Serialise size_sweep output; one line per pair, SI units (m/s)."""
    lines = [SWEEP_CSV_HEADER]
    for (lam1, lam2), vt1, vs1, vt2, vs2, rep in rows:
        lines.append(",".join([
            str(lam1), str(lam2), _num(vt1), _num(vs1), _num(vt2), _num(vs2),
            _num(rep.v_lb), _num(rep.size), _num(rep.v_ub),
        ]))
    return "\n".join(lines) + "\n"
