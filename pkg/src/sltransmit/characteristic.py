"""Shooting solutions, the characteristic function and its derivative.

``left_solution`` starts from the left boundary condition and crosses the
interfaces with the transmission blocks; ``right_solution`` starts from the
lambda-dependent right boundary data and crosses them with the inverse
blocks. Their Wronskian on segment i is w_i = scale_i * w_1, and

    Delta(lam) = lam N'(phi) + N(phi)  (at x = 1)  = theta*gamma*xi * w_1(lam)

vanishes exactly at the eigenvalues.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateTrace, NotAnEigenvalue
from .ivp import LEFT_TO_RIGHT, RIGHT_TO_LEFT, SegmentState, integrate_segment
from .problem import NSEG

TRACE_NAMES = ("-1", "h1-", "h1+", "h2-", "h2+", "h3-", "h3+", "1")


@dataclass(frozen=True)
class PiecewiseSolution:
    """A solution on all four segments plus its one-sided traces.

    ``traces`` has shape (8, 4): rows follow ``TRACE_NAMES`` and columns are
    (u, u', du/dlam, du'/dlam).
    """

    lam: float
    segments: tuple
    traces: np.ndarray

    def trace(self, name):
        return self.traces[TRACE_NAMES.index(name)]

    def at_right(self):
        return self.traces[-1]

    def at_left(self):
        return self.traces[0]

    def quad(self):
        """Per-segment integrals of u^2."""
        return np.array([abs(seg.quad[-1] - seg.quad[0]) for seg in self.segments])

    def values(self):
        return tuple(seg.u for seg in self.segments)

    def derivatives(self):
        return tuple(seg.du for seg in self.segments)


def _collect_traces(segments):
    rows = []
    for seg in segments:
        rows.append(seg.states[0, :4])
        rows.append(seg.states[-1, :4])
    return np.array(rows)


def _node_args(i, node_count, nodes):
    if nodes is None:
        return {"node_count": node_count}
    return {"nodes": nodes[i]}


def left_solution(spec, lam, node_count=2, nodes=None):
    """phi(x, lam): u(-1) = alpha2, u'(-1) = -alpha1, carried left to right.

    ``nodes`` optionally gives four per-segment abscissa arrays.
    """
    a1, a2 = spec.left_bc
    state = SegmentState(a2, -a1, 0.0, 0.0, 0.0)
    segments = []
    for i in range(NSEG):
        traj = integrate_segment(spec, i, lam, state, LEFT_TO_RIGHT,
                                 **_node_args(i, node_count, nodes))
        segments.append(traj)
        if i < NSEG - 1:
            end = traj.last()
            block = spec.trans[i]
            u, du = block.apply(end.u, end.du)
            ul, dul = block.apply(end.ul, end.dul)
            state = SegmentState(u, du, ul, dul, 0.0)
    return PiecewiseSolution(float(lam), tuple(segments), _collect_traces(segments))


def right_solution(spec, lam, node_count=2, nodes=None):
    """chi(x, lam): chi(1) = lam beta2' + beta2, chi'(1) = lam beta1' + beta1, carried leftwards."""
    b1, b2, b1p, b2p = spec.right_bc
    state = SegmentState(lam * b2p + b2, lam * b1p + b1, b2p, b1p, 0.0)
    segments = [None] * NSEG
    for i in range(NSEG - 1, -1, -1):
        traj = integrate_segment(spec, i, lam, state, RIGHT_TO_LEFT,
                                 **_node_args(i, node_count, nodes))
        segments[i] = traj
        if i > 0:
            start = traj.first()
            block = spec.trans[i - 1]
            u, du = block.invert(start.u, start.du)
            ul, dul = block.invert(start.ul, start.dul)
            state = SegmentState(u, du, ul, dul, 0.0)
    return PiecewiseSolution(float(lam), tuple(segments), _collect_traces(segments))


def delta_from_traces(spec, lam, tr):
    """(Delta, dDelta/dlam) from the right-end trace row (u, u', u_lam, u'_lam) of phi."""
    u, du, ul, dul = tr[:4]
    value = spec.right_residual(lam, u, du)
    deriv = spec.Nprime(u, du) + lam * spec.Nprime(ul, dul) + spec.N(ul, dul)
    return value, deriv


def char_value(spec, lam):
    """Fast path: (Delta(lam), dDelta/dlam) from the left shooting solution only."""
    phi = left_solution(spec, lam)
    return delta_from_traces(spec, lam, phi.at_right())


@dataclass(frozen=True)
class CharSample:
    lam: float
    delta: float
    ddelta: float
    w_seg: tuple


def wronskian(phi_seg, chi_seg):
    """phi chi' - phi' chi sampled at the segment nodes."""
    return phi_seg.u * chi_seg.du - phi_seg.du * chi_seg.u


def char_function(spec, lam):
    """Delta, dDelta and the four segment Wronskians (taken at segment midpoints)."""
    phi = left_solution(spec, lam, node_count=3)
    chi = right_solution(spec, lam, node_count=3)
    delta, ddelta = delta_from_traces(spec, lam, phi.at_right())
    w_seg = tuple(float(wronskian(p, c)[1]) for p, c in zip(phi.segments, chi.segments))
    return CharSample(float(lam), float(delta), float(ddelta), w_seg)


def proportionality_constant(phi, chi, floor=1e-12):
    """c1 with phi = c1 chi, read off the larger-magnitude trace at x = -1."""
    p0, dp0 = phi.at_left()[:2]
    c0, dc0 = chi.at_left()[:2]
    if max(abs(c0), abs(dc0)) < floor:
        raise DegenerateTrace("chi vanishes at x = -1", chi=float(c0), dchi=float(dc0))
    if abs(c0) >= abs(dc0):
        return p0 / c0
    return dp0 / dc0


def weighted_chi_norm(spec, chi):
    """Weighted sum of the segment integrals of chi^2 plus rho/(theta gamma xi).

    This equals the squared H-norm of (chi, N'(chi)), because N'(chi) = rho
    at any lambda by the choice of terminal data.
    """
    k = spec.constants
    return float(np.dot(spec.weights, chi.quad()) + k.rho / k.tgx)


def root_tolerance(lam, scale):
    return 1e-9 * (1.0 + abs(lam)) * scale


def local_scale(spec, lam):
    """max|Delta| at lam +- a quarter of the local scan step (stand-in for a scan bracket)."""
    from .spectrum import scan_step

    d = 0.25 * scan_step(spec, lam)
    return max(abs(char_value(spec, lam - d)[0]), abs(char_value(spec, lam + d)[0]))


def char_derivative_at_eigenvalue(spec, mu, scale=None):
    """(w'(mu), c1) from the closed-form sum at a real eigenvalue ``mu``.

    w'(mu) = c1 * (sum_i weight_i * int chi_i^2 + rho/(theta gamma xi)).
    ``scale`` is max|Delta| over the enclosing scan bracket; when omitted it
    is estimated locally.
    """
    delta, _ = char_value(spec, mu)
    if scale is None:
        scale = local_scale(spec, mu)
    tol = root_tolerance(mu, scale)
    if not abs(delta) <= tol:
        raise NotAnEigenvalue(f"|Delta({mu!r})| = {abs(delta):.3e} exceeds {tol:.3e}",
                              mu=float(mu), delta=float(delta), tolerance=tol)
    phi = left_solution(spec, mu)
    chi = right_solution(spec, mu)
    c1 = proportionality_constant(phi, chi)
    return c1 * weighted_chi_norm(spec, chi), float(c1)
