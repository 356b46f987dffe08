"""Eigenvalue location, simplicity certificates and normalised eigen-elements."""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .characteristic import (
    PiecewiseSolution,
    char_derivative_at_eigenvalue,
    char_value,
    left_solution,
    right_solution,
    proportionality_constant,
    root_tolerance,
    weighted_chi_norm,
)
from .errors import NotAnEigenvalue, ScanExhausted
from .hilbert import DEFAULT_NODES, HElement, grid, inner_product_H1

PHASE_STEP = math.pi / 2
MAX_SUBDIVISION_DEPTH = 6
EXTRA_HALF_PERIODS = 8


class MissedRootWarning(UserWarning):
    """Shooting and finite-difference eigenvalue counts disagree."""


def scan_step(spec, lam):
    """Largest step keeping the estimated phase increment at most pi/2.

    Also capped at 1 + |lam|/10 so the non-oscillatory region below the
    potential is still sampled.
    """
    cap = 1.0 + 0.1 * abs(lam)
    base = spec.phase(lam)
    if spec.phase(lam + cap) - base <= PHASE_STEP:
        return cap
    lo, hi = 0.0, cap
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        if spec.phase(lam + mid) - base <= PHASE_STEP:
            lo = mid
        else:
            hi = mid
    return max(lo, 1e-6 * (1.0 + abs(lam)))


def scan_ceiling(spec, lam_start, count):
    """A lambda whose phase lies ``count + 8`` half-periods beyond ``lam_start``."""
    target = spec.phase(lam_start) + (count + EXTRA_HALF_PERIODS) * math.pi
    top = max(lam_start, max(spec.q_mean(i) for i in range(4))) + 1.0
    span = 1.0
    while spec.phase(top + span) < target:
        span *= 2.0
    return top + span


def resolve_start(spec, lam_start):
    if lam_start is None or lam_start == "auto":
        return spec.lambda_floor()
    return float(lam_start)


@dataclass(frozen=True)
class Eigenpair:
    index: int
    mu: float
    bracket: tuple
    phi: PiecewiseSolution
    norm_H: float
    Phi: HElement
    w_prime: float
    c1: float
    delta: float
    scale: float


def _hermite_crosses(a, b, fa, fb, da, db, samples=32):
    """Does the cubic Hermite interpolant of (f, f') on [a, b] leave the sign of fa?"""
    hlen = b - a
    t = np.linspace(0.0, 1.0, samples + 2)[1:-1]
    h00 = 2 * t**3 - 3 * t**2 + 1
    h10 = t**3 - 2 * t**2 + t
    h01 = -2 * t**3 + 3 * t**2
    h11 = t**3 - t**2
    vals = h00 * fa + h10 * hlen * da + h01 * fb + h11 * hlen * db
    return bool(np.any(np.sign(vals) != np.sign(fa)))


def _brackets(spec, a, b, fa, fb, depth=0):
    """Sign-change subintervals of [a, b]; pairs of roots hiding inside are split out."""
    if np.sign(fa[0]) != np.sign(fb[0]):
        return [(a, b, fa, fb)]
    if depth >= MAX_SUBDIVISION_DEPTH or not _hermite_crosses(a, b, fa[0], fb[0], fa[1], fb[1]):
        return []
    m = 0.5 * (a + b)
    fm = _nonzero_value(spec, m)
    return (_brackets(spec, a, m, fa, fm, depth + 1)
            + _brackets(spec, m, b, fm, fb, depth + 1))


def _nonzero_value(spec, lam):
    f = char_value(spec, lam)
    if f[0] == 0.0:
        f = char_value(spec, lam + 1e-12 * (1.0 + abs(lam)))
    return f


def refine_root(spec, lo, hi, flo):
    """Bisect to width <= 1e-11 max(1, |mu|), then one Newton step with dDelta."""
    slo = np.sign(flo)
    while hi - lo > 1e-11 * max(1.0, abs(0.5 * (lo + hi))):
        mid = 0.5 * (lo + hi)
        fm = char_value(spec, mid)[0]
        if fm == 0.0:
            lo = hi = mid
            break
        if np.sign(fm) == slo:
            lo = mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    f, df = char_value(spec, x)
    if df != 0.0:
        xn = x - f / df
        if lo <= xn <= hi:
            x = xn
    return x


def eigen_element(spec, pair_or_phi):
    """Normalised H-element (phi, N'(phi)) / ||.||_H with the stated sign convention."""
    phi = getattr(pair_or_phi, "phi", pair_or_phi)
    Phi, _ = _normalise(spec, phi)
    return Phi


def normalising_factor(spec, phi):
    """(c, ||(phi, N'(phi))||_H) with c Phi of unit norm and the sign convention applied.

    The sign makes the first of phi(-1), phi'(-1) exceeding 1e-12 in size positive.
    """
    u1, du1 = phi.at_right()[:2]
    scalar = spec.Nprime(u1, du1)
    f = phi.values()
    k = spec.constants
    norm = math.sqrt(inner_product_H1(spec, f, f) + scalar * scalar / (k.rho * k.tgx))
    sign = 1.0
    for v in phi.at_left()[:2]:
        if abs(v) > 1e-12:
            sign = 1.0 if v > 0 else -1.0
            break
    return sign / norm, norm


def _normalise(spec, phi):
    c, norm = normalising_factor(spec, phi)
    scalar = spec.Nprime(*phi.at_right()[:2])
    return HElement(tuple(c * s for s in phi.values()), c * scalar), norm


def make_eigenpair(spec, index, mu, bracket, scale, nodes=DEFAULT_NODES):
    phi = left_solution(spec, mu, nodes=grid(spec, nodes))
    w_prime, c1 = char_derivative_at_eigenvalue(spec, mu, scale=scale)
    Phi, norm = _normalise(spec, phi)
    delta = spec.right_residual(mu, *phi.at_right()[:2])
    return Eigenpair(index, float(mu), tuple(map(float, bracket)), phi, norm, Phi,
                     float(w_prime), float(c1), float(delta), float(scale))


def locate_eigenvalues(spec, count, lam_start=None, lam_max=None):
    """Scan and refine; returns (mu, bracket, scale) triples without eigenfunctions."""
    if count < 1:
        raise ValueError("count must be positive")
    lam = resolve_start(spec, lam_start)
    ceiling = scan_ceiling(spec, lam, count) if lam_max is None else float(lam_max)
    found = []
    fa = _nonzero_value(spec, lam)
    while len(found) < count:
        if lam >= ceiling:
            raise ScanExhausted(f"found {len(found)} of {count} eigenvalues below {ceiling:g}",
                                found=[r[0] for r in found], ceiling=ceiling,
                                requested=count)
        b = min(lam + scan_step(spec, lam), ceiling)
        fb = _nonzero_value(spec, b)
        for lo, hi, flo, fhi in _brackets(spec, lam, b, fa, fb):
            mu = refine_root(spec, lo, hi, flo[0])
            found.append((mu, (lo, hi), max(abs(flo[0]), abs(fhi[0]))))
        lam, fa = b, fb
    return found[:count]


def find_eigenvalues(spec, count, lam_start=None, nodes=DEFAULT_NODES, lam_max=None,
                     oracle_guard=False, guard_mesh=200):
    """The ``count`` smallest eigenvalues at or above ``lam_start`` (``None``: heuristic floor).

    With ``oracle_guard`` one further root is located, and the number of roots
    below the midpoint of the last gap is compared against a coarse
    finite-difference determinant scan; a :class:`MissedRootWarning` is
    issued on disagreement.
    """
    roots = locate_eigenvalues(spec, count + 1 if oracle_guard else count, lam_start, lam_max)
    pairs = [make_eigenpair(spec, n + 1, mu, br, sc, nodes)
             for n, (mu, br, sc) in enumerate(roots[:count])]
    if oracle_guard:
        mus = [r[0] for r in roots]
        check_root_count(spec, mus[:count], resolve_start(spec, lam_start), guard_mesh,
                         hi=count_window(mus[:count], mus[count]))
    return pairs


def count_window(mus, next_mu=None):
    """Upper end of a window holding exactly ``mus``.

    The midpoint to ``next_mu`` when it is known, else half the last gap
    past the final root.
    """
    last = mus[-1]
    if next_mu is not None:
        return 0.5 * (last + next_mu)
    gap = last - mus[-2] if len(mus) > 1 else 1.0 + abs(last)
    return last + 0.5 * gap


def check_root_count(spec, mus, lam_start, m=200, hi=None):
    """Finite-difference sign-change count on [lam_start, hi]; warns if it differs."""
    from .fd_oracle import count_sign_changes

    if hi is None:
        hi = count_window(mus)
    n_fd = count_sign_changes(spec, lam_start, hi, m)
    if n_fd != len(mus):
        warnings.warn(f"shooting found {len(mus)} eigenvalues in [{lam_start:g}, {hi:g}] "
                      f"but the finite-difference scan found {n_fd}", MissedRootWarning,
                      stacklevel=2)
    return n_fd


@dataclass(frozen=True)
class SimplicityReport:
    mu: float
    w_prime: float
    c1: float
    positive_sum: float
    ddelta: float
    cross_check: float
    passed: bool

    @property
    def status(self):
        return "PASS" if self.passed else "FAIL"


def simplicity_certificate(spec, pair, tol=1e-4):
    """Compare w'(mu) from the closed-form sum with dDelta/(theta gamma xi)."""
    mu = pair.mu
    delta, ddelta = char_value(spec, mu)
    limit = root_tolerance(mu, pair.scale)
    if not abs(delta) <= limit:
        raise NotAnEigenvalue(f"|Delta({mu!r})| = {abs(delta):.3e} exceeds {limit:.3e}",
                              mu=mu, delta=float(delta), tolerance=limit)
    phi = left_solution(spec, mu)
    chi = right_solution(spec, mu)
    c1 = proportionality_constant(phi, chi)
    positive = weighted_chi_norm(spec, chi)
    w_prime = c1 * positive
    cross = abs(w_prime * spec.constants.tgx - ddelta) / abs(ddelta)
    passed = w_prime != 0.0 and positive > 0.0 and cross <= tol
    return SimplicityReport(float(mu), float(w_prime), float(c1), float(positive),
                            float(ddelta), float(cross), bool(passed))
