"""Total variation distance, light-cone checks and the easy-regime bounds.

Bounds that carry unspecified constants are evaluated with the constant set
to 1 and compared through ratios, never as certificates. The exception is
:func:`path_sum_bound`, which is a rigorous upper bound on the measured
distance.
"""

from __future__ import annotations

import math
from typing import Iterator, Optional

import numpy as np
from scipy import special

from bosonlab.core.lattice import build_lattice
from bosonlab.core.models import (
    BoundParams,
    CheckResult,
    Configuration,
    EnvelopeReport,
    EnvelopeViolation,
    LatticeSpec,
    LatticeSum,
    OutcomeDistribution,
    Propagator,
    Timescales,
)
from bosonlab.core.permanent import permanent
from bosonlab.monitoring.logging import get_logger
from bosonlab.utils.exceptions import DimensionMismatchError, GuardExceededError, ValidationError

logger = get_logger(__name__)

ENVELOPE_TOL = 1e-12
FIT_FLOOR = 1e-14
TAIL_TOL = 1e-15
LATTICE_POINT_LIMIT = 100_000_000
EASY_FRACTION = 0.9


def tvd(p: OutcomeDistribution, q: OutcomeDistribution) -> float:
    """½ Σ |p(s) − q(s)| over the union of both supports."""
    if (p.n, p.m) != (q.n, q.m):
        raise DimensionMismatchError("distributions describe different systems", (p.n, p.m), (q.n, q.m))
    keys = dict.fromkeys(list(p.entries) + list(q.entries))
    return 0.5 * math.fsum(abs(p.probability(k) - q.probability(k)) for k in keys)


def _check_geometry(R: Propagator, spec: LatticeSpec) -> None:
    if R.m != spec.m:
        raise DimensionMismatchError("propagator and lattice disagree on m", spec.m, R.m)


def _fit_decay_length(magnitudes: np.ndarray, distances: np.ndarray, floor: float) -> float:
    """-1/slope of log|R_ij| against ℓ_ij over pairs above ``floor``.

    0 when no off-diagonal amplitude rises above the floor, inf when the
    slope is not negative, nan when all usable pairs share one distance.
    """
    keep = magnitudes > floor
    if not np.any(keep):
        return 0.0
    ell = distances[keep]
    if np.ptp(ell) == 0:
        return float("nan")
    slope, _ = np.polyfit(ell, np.log(magnitudes[keep]), 1)
    if slope >= 0:
        return float("inf")
    return float(-1.0 / slope)


def _envelope_report(
    R: Propagator,
    spec: LatticeSpec,
    vt: float,
    xi: float,
    tol: float,
    fit_floor: float,
    critical_xi: Optional[float] = None,
) -> EnvelopeReport:
    mags = np.abs(R.R)
    ell = spec.distances
    with np.errstate(over="ignore"):
        env = np.minimum(1.0, np.exp((vt - ell) / xi))
    excess = mags - env
    rows, cols = np.nonzero(excess > tol)
    violations = tuple(
        EnvelopeViolation(int(i), int(j), float(mags[i, j]), float(env[i, j])) for i, j in zip(rows, cols)
    )
    off = ~np.eye(spec.m, dtype=bool)
    below = off & (excess <= tol)
    return EnvelopeReport(
        violations=violations,
        max_excess=float(excess.max()),
        fitted_xi=_fit_decay_length(mags[below], ell[below], fit_floor),
        critical_xi=critical_xi,
        pairs_checked=spec.m * spec.m,
    )


def lr_envelope_check(
    R: Propagator,
    t: float,
    params: BoundParams,
    spec: LatticeSpec,
    tol: float = ENVELOPE_TOL,
    fit_floor: float = FIT_FLOOR,
) -> EnvelopeReport:
    """Compare |R_ij(t)| with min(1, exp((vt − ℓ_ij)/ξ)) for every pair."""
    _check_geometry(R, spec)
    report = _envelope_report(R, spec, params.v * t, params.xi, tol, fit_floor)
    logger.debug("bounds.lr_envelope", t=t, v=params.v, xi=params.xi, violations=len(report.violations))
    return report


def critical_localization_length(R: Propagator, spec: LatticeSpec) -> float:
    """Smallest ξ with |R_ij| ≤ exp(−ℓ_ij/ξ) for all i ≠ j."""
    _check_geometry(R, spec)
    mags = np.abs(R.R)
    off = ~np.eye(spec.m, dtype=bool) & (mags > 0)
    if not np.any(off):
        return 0.0
    if np.any(mags[off] >= 1.0):
        return float("inf")
    return float(np.max(spec.distances[off] / -np.log(mags[off])))


def localization_check(
    R: Propagator,
    spec: LatticeSpec,
    xi: Optional[float] = None,
    tol: float = ENVELOPE_TOL,
    fit_floor: float = FIT_FLOOR,
) -> EnvelopeReport:
    """The zero-velocity envelope |R_ij| ≤ exp(−ℓ_ij/ξ).

    ``critical_xi`` is the smallest ξ that passes and ``fitted_xi`` the
    least-squares decay length. Without ``xi`` the check is run at the
    critical value.
    """
    critical = critical_localization_length(R, spec)
    if xi is None:
        # any length passes when nothing leaves the diagonal
        xi = critical if critical > 0 else 1.0
    elif not xi > 0:
        raise ValidationError(f"decay length must be positive, got {xi}")
    return _envelope_report(R, spec, 0.0, xi, tol, fit_floor, critical_xi=critical)


def _exp(x: float) -> float:
    # deep in the hard regime the exponent leaves double range
    return math.inf if x > 709.0 else math.exp(x)


def lemma1_bound(L: float, vt: float, xi: float, d: int) -> float:
    """exp(2(vt − L)/ξ + 2(d − 1)·ln L): the easy-regime decay shape with unit constant."""
    if not L > 0:
        raise ValidationError(f"L must be positive, got {L}")
    return _exp(2.0 * (vt - L) / xi + 2.0 * (d - 1) * math.log(L))


def interference_matrix(R: Propagator, r: Configuration) -> np.ndarray:
    """M[a, b] = Σ_j |amp(in_a → j)|·|amp(in_b → j)|.

    The diagonal holds D_a and the off-diagonal row sums are the collision
    strengths C_a.
    """
    if r.m != R.m:
        raise DimensionMismatchError("input configuration does not match propagator", R.m, r.m)
    rows = np.abs(R.transfer[list(r.sites)])
    return rows @ rows.T


def collision_strength(R: Propagator, r: Configuration, i: int) -> tuple[float, float]:
    """(C_i, D_i) for input boson i."""
    if not 0 <= i < r.n:
        raise ValidationError(f"boson index {i} outside 0..{r.n - 1}")
    M = interference_matrix(R, r)
    D = float(M[i, i])
    return float(M[i].sum() - D), D


def path_sum_bound(R: Propagator, r: Configuration) -> float:
    """½·(Per(M) − Π_a M[a, a]), an upper bound on tvd(D_U, D_DP) for distinct input sites."""
    if any(x > 1 for x in r.occ):
        raise ValidationError("path-sum bound needs bosons on distinct sites")
    M = interference_matrix(R, r)
    return 0.5 * max(0.0, permanent(M).real - float(np.prod(np.diag(M))))


def binomial_bound(c: float, n: int) -> float:
    """½·((1 + c)^n − n·c − 1) for a uniform collision strength c."""
    if c < 0:
        raise ValidationError(f"collision strength must be nonnegative, got {c}")
    return 0.5 * ((1.0 + c) ** n - n * c - 1.0)


def lemma_s2_check(
    R: Propagator,
    r: Configuration,
    spec: LatticeSpec,
    params: BoundParams,
    t: float,
) -> CheckResult:
    """max_i C_i against L^{d−1}·exp((vt − L)/ξ); the ratio should stay bounded in L."""
    _check_geometry(R, spec)
    M = interference_matrix(R, r)
    strengths = M.sum(axis=1) - np.diag(M)
    measured = float(strengths.max(initial=0.0))
    log_envelope = (spec.d - 1) * math.log(spec.L) + (params.v * t - spec.L) / params.xi
    ratio = _exp(math.log(measured) - log_envelope) if measured > 0 else 0.0
    return CheckResult(
        check="lemma_s2",
        params={"L": spec.L, "d": spec.d, "t": t, "v": params.v, "xi": params.xi},
        measured=measured,
        envelope=_exp(log_envelope),
        ratio=ratio,
        passed=math.isfinite(ratio),
    )


def _shell_mass(radius: float, xi: float, d: int, shift: float = 0.0) -> float:
    """e^{shift/ξ}·∫_{‖y‖ ≥ radius} e^{−‖y‖/ξ} dy over R^d.

    Uses Γ(d, ρ) = (d−1)!·e^{−ρ}·Σ_{k<d} ρ^k/k! so the exponential can be
    offset by ``shift`` before it leaves double range.
    """
    surface = 2.0 * math.pi ** (d / 2.0) / special.gamma(d / 2.0)
    rho = max(radius, 0.0) / xi
    poly = sum(math.factorial(d - 1) / math.factorial(k) * rho**k for k in range(d))
    return float(surface * xi**d * poly * _exp(shift / xi - rho))


def _remainder_bound(radius: float, xi: float, d: int, shift: float = 0.0) -> float:
    # lattice points beyond ``radius`` own unit cells lying beyond radius − √d/2
    half_diag = math.sqrt(d) / 2.0
    return _shell_mass(radius - half_diag, xi, d, shift + half_diag)


def _tail_norms(L: float, radius: int, d: int) -> Iterator[np.ndarray]:
    """Norms of the lattice points with L ≤ ‖x‖ ≤ radius, one slice of x_0 at a time."""
    axis = np.arange(-radius, radius + 1, dtype=np.int64)
    inner = np.zeros(1, dtype=np.int64)
    for _ in range(d - 1):
        inner = (inner[:, None] + axis[None, :] ** 2).ravel()
    lo2 = L * L * (1.0 - 1e-12)
    hi2 = radius * radius
    for x0 in axis:
        norm2 = inner + x0 * x0
        keep = (norm2 >= lo2) & (norm2 <= hi2)
        if keep.any():
            yield np.sqrt(norm2[keep].astype(float))


def _enumerate_tail(L: float, radius: int, xi: float, d: int) -> tuple[float, float]:
    """Nearest norm r0 ≥ L and Σ e^{−(‖x‖ − r0)/ξ} over L ≤ ‖x‖ ≤ radius."""
    r0 = min(float(norms.min()) for norms in _tail_norms(L, radius, d))
    total = math.fsum(math.fsum(np.exp(-(norms - r0) / xi)) for norms in _tail_norms(L, radius, d))
    return r0, total


def _tail_sum(L: float, xi: float, d: int, tol: float, max_points: int) -> tuple[float, int, float]:
    """Tail sum and its certified remainder, both multiplied by e^{L/ξ}."""
    radius = int(math.ceil(L + 40.0 * xi)) + 1
    while True:
        points = (2 * radius + 1) ** d
        if points > max_points:
            raise GuardExceededError("lattice_points", points, max_points, f"L={L:g}, xi={xi:g}, d={d}")
        r0, total = _enumerate_tail(L, radius, xi, d)
        remainder = _remainder_bound(radius, xi, d, shift=r0)
        if remainder < tol * total:
            back = math.exp(-(r0 - L) / xi)
            return total * back, radius, remainder * back
        radius = int(math.ceil(radius * 1.5))


def _check_dimension(d: int) -> None:
    if d not in (1, 2, 3):
        raise ValidationError(f"dimension must be 1, 2 or 3, got {d}")


def lattice_tail_sum(
    L: float,
    xi: float,
    d: int,
    tol: float = TAIL_TOL,
    max_points: int = LATTICE_POINT_LIMIT,
) -> LatticeSum:
    """Σ_{x ∈ Z^d, ‖x‖ ≥ L} e^{−‖x‖/ξ} and its ratio to ξ·L^{d−1}·e^{−L/ξ}.

    Enumeration stops at a radius whose certified remainder is below
    ``tol`` of the partial sum. The ratio is formed before the common factor
    e^{−L/ξ} is applied, so it stays finite when the sum itself underflows.
    """
    _check_dimension(d)
    if L / xi < 1:
        raise ValidationError(f"need L/xi >= 1, got {L / xi:g}")
    scaled, radius, remainder = _tail_sum(L, xi, d, tol, max_points)
    ratio = scaled / (xi * L ** (d - 1))
    factor = math.exp(-L / xi)
    logger.debug("bounds.tail_sum", L=L, xi=xi, d=d, radius=radius, ratio=ratio)
    return LatticeSum(scaled * factor, ratio, float(radius), remainder * factor)


def lattice_tail_integral(L: float, xi: float, d: int) -> tuple[float, float]:
    """Continuum tail mass at L and the certified lattice upper bound built from it.

    Returns (g(L), e^{√d/(2ξ)}·g(L − √d/2)); the second value bounds
    :func:`lattice_tail_sum` from above.
    """
    _check_dimension(d)
    return _shell_mass(L, xi, d), _remainder_bound(L, xi, d)


def scaled_lattice_sum(
    L: float,
    xi: float,
    d: int,
    tol: float = TAIL_TOL,
    max_points: int = LATTICE_POINT_LIMIT,
) -> tuple[float, float]:
    """f_d = Σ_{‖x‖ ≥ 1} e^{−2L‖x‖/ξ} and f_d·e^{2L/ξ}."""
    _check_dimension(d)
    if L / xi < 1:
        raise ValidationError(f"need L/xi >= 1, got {L / xi:g}")
    scaled, _, _ = _tail_sum(1.0, xi / (2.0 * L), d, tol, max_points)
    return scaled * math.exp(-2.0 * L / xi), scaled


def timescales(
    n: int,
    beta: float,
    c1: float,
    d: int,
    params: BoundParams,
    easy_fraction: float = EASY_FRACTION,
) -> Timescales:
    """t_easy = fraction·L/v on the realised lattice, the hardness scale n^{1+β/d}
    and the window of exponents c for the crossover time t ∝ n^c.
    """
    spec = build_lattice(n, beta, c1, d)
    t_easy = math.inf if params.v == 0 else easy_fraction * spec.L / params.v
    return Timescales(t_easy, hard_timescale(n, beta, d), spec.L, params.v, *phase_exponents(beta, d))


def hard_timescale(n: int, beta: float, d: int) -> float:
    """n^{1+β/d}; a scale only, no constant attached."""
    return float(n) ** (1.0 + beta / d)


def phase_exponents(beta: float, d: int) -> tuple[float, float]:
    """Window ((β−1)/d, (β+d)/d) that the easy-to-hard exponent of t ∝ n^c must fall in."""
    return (beta - 1.0) / d, (beta + d) / d


__all__ = [
    "EASY_FRACTION",
    "LATTICE_POINT_LIMIT",
    "binomial_bound",
    "collision_strength",
    "critical_localization_length",
    "hard_timescale",
    "interference_matrix",
    "lattice_tail_integral",
    "lattice_tail_sum",
    "lemma1_bound",
    "lemma_s2_check",
    "localization_check",
    "lr_envelope_check",
    "path_sum_bound",
    "phase_exponents",
    "scaled_lattice_sum",
    "timescales",
    "tvd",
]
