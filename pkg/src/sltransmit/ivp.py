"""Single-segment integration of -p^2 u'' + q u = lambda u.

The state carried along a segment is

    (u, u', d u/d lambda, d u'/d lambda, quad)

where the lambda-derivative pair obeys the variational equation
``-p^2 v'' + q v = lambda v + u`` and ``quad`` accumulates the integral of
u^2 over the part of the segment traversed so far (always nonnegative,
whichever direction the segment is crossed in).

The stepper is the Dormand-Prince 5(4) embedded pair with standard
error-per-step control. Output nodes are hard step stops: the integrator never
steps across a node, so states at nodes are integrator states rather than
interpolants.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numba import njit

from .errors import StepFailure

RTOL = 1e-12
ATOL = 1e-14
MIN_STEP_FRACTION = 1e-13
MAX_STEPS = 2_000_000  # per segment; lam ~ 1e10 still fits

LEFT_TO_RIGHT = 1
RIGHT_TO_LEFT = -1


class SegmentState(NamedTuple):
    u: float
    du: float
    ul: float = 0.0
    dul: float = 0.0
    quad: float = 0.0


@dataclass(frozen=True)
class SegmentTrajectory:
    """Samples of one segment solution at increasing abscissae ``x``.

    ``states`` has shape ``(len(x), 5)`` with columns u, du, ul, dul, quad.
    """

    segment: int
    lam: float
    x: np.ndarray
    states: np.ndarray

    @property
    def u(self):
        return self.states[:, 0]

    @property
    def du(self):
        return self.states[:, 1]

    @property
    def ul(self):
        return self.states[:, 2]

    @property
    def dul(self):
        return self.states[:, 3]

    @property
    def quad(self):
        return self.states[:, 4]

    def first(self):
        return SegmentState(*self.states[0])

    def last(self):
        return SegmentState(*self.states[-1])


# Dormand-Prince 5(4) tableau
_C2, _C3, _C4, _C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
# fifth-order minus embedded fourth-order weights
_E1 = 71 / 57600
_E3 = -71 / 16695
_E4 = 71 / 1920
_E5 = -17253 / 339200
_E6 = 22 / 525
_E7 = -1 / 40


@njit(cache=True)
def _rhs(x, y, lam, inv_p2, qc, sgn, out):
    q = 0.0
    for k in range(qc.shape[0] - 1, -1, -1):
        q = q * x + qc[k]
    g = (q - lam) * inv_p2
    out[0] = y[1]
    out[1] = g * y[0]
    out[2] = y[3]
    out[3] = g * y[2] - y[0] * inv_p2
    out[4] = sgn * y[0] * y[0]


@njit(cache=True)
def _integrate(y0, nodes, lam, inv_p2, qc, rtol, atol, hmin, h0, hmax, max_steps):
    """Integrate through ``nodes`` (monotone, nodes[0] is the start).

    Returns (states at nodes, status); status 0 on success, 1 when the step
    size falls below ``hmin``, 2 when ``max_steps`` attempts are used up.
    """
    attempts = 0
    n = nodes.shape[0]
    out = np.empty((n, 5))
    out[0, :] = y0
    direction = 1.0 if nodes[n - 1] >= nodes[0] else -1.0
    y = y0.copy()
    ytmp = np.empty(5)
    ynew = np.empty(5)
    k1 = np.empty(5)
    k2 = np.empty(5)
    k3 = np.empty(5)
    k4 = np.empty(5)
    k5 = np.empty(5)
    k6 = np.empty(5)
    k7 = np.empty(5)
    x = nodes[0]
    _rhs(x, y, lam, inv_p2, qc, direction, k1)
    hprop = min(h0, hmax)
    for j in range(1, n):
        target = nodes[j]
        while True:
            remaining = (target - x) * direction
            if remaining <= 0.0:
                break
            attempts += 1
            if attempts > max_steps:
                return out, 2
            last = hprop >= remaining
            h = remaining if last else hprop
            hs = h * direction
            for i in range(5):
                ytmp[i] = y[i] + hs * _A21 * k1[i]
            _rhs(x + _C2 * hs, ytmp, lam, inv_p2, qc, direction, k2)
            for i in range(5):
                ytmp[i] = y[i] + hs * (_A31 * k1[i] + _A32 * k2[i])
            _rhs(x + _C3 * hs, ytmp, lam, inv_p2, qc, direction, k3)
            for i in range(5):
                ytmp[i] = y[i] + hs * (_A41 * k1[i] + _A42 * k2[i] + _A43 * k3[i])
            _rhs(x + _C4 * hs, ytmp, lam, inv_p2, qc, direction, k4)
            for i in range(5):
                ytmp[i] = y[i] + hs * (_A51 * k1[i] + _A52 * k2[i] + _A53 * k3[i]
                                       + _A54 * k4[i])
            _rhs(x + _C5 * hs, ytmp, lam, inv_p2, qc, direction, k5)
            for i in range(5):
                ytmp[i] = y[i] + hs * (_A61 * k1[i] + _A62 * k2[i] + _A63 * k3[i]
                                       + _A64 * k4[i] + _A65 * k5[i])
            xnew = target if last else x + hs
            _rhs(xnew, ytmp, lam, inv_p2, qc, direction, k6)
            for i in range(5):
                ynew[i] = y[i] + hs * (_B1 * k1[i] + _B3 * k3[i] + _B4 * k4[i]
                                       + _B5 * k5[i] + _B6 * k6[i])
            _rhs(xnew, ynew, lam, inv_p2, qc, direction, k7)
            err = 0.0
            for i in range(5):
                e = hs * (_E1 * k1[i] + _E3 * k3[i] + _E4 * k4[i] + _E5 * k5[i]
                          + _E6 * k6[i] + _E7 * k7[i])
                sc = atol + rtol * max(abs(y[i]), abs(ynew[i]))
                r = abs(e) / sc
                if r > err:
                    err = r
            if err <= 1.0:
                x = xnew
                for i in range(5):
                    y[i] = ynew[i]
                    k1[i] = k7[i]
                fac = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
                if last:
                    # a landing step shortened to hit a node says little about the scale
                    hprop = min(max(hprop, h * fac), hmax)
                else:
                    hprop = min(h * fac, hmax)
            else:
                if h <= hmin:
                    return out, 1
                hprop = max(h * max(0.2, 0.9 * err ** -0.2), hmin)
        out[j, :] = y
    return out, 0


def _initial_step(length, lam, spec, i):
    """Step guess resolving roughly a tenth of a local wavelength."""
    qbar = spec.q_mean(i)
    k = np.sqrt(abs(lam - qbar) + 1.0) / abs(spec.p[i])
    return min(length, 0.1 / k)


def integrate_segment(spec, segment_index, lam, init, direction=LEFT_TO_RIGHT,
                      node_count=2, nodes=None):
    """Integrate segment ``segment_index`` (0-based) at spectral parameter ``lam``.

    ``init`` is the :class:`SegmentState` at the starting end (the left end
    for ``direction=LEFT_TO_RIGHT``, the right end otherwise). Samples are
    taken on ``node_count`` uniform nodes spanning the closed segment, or on
    explicit increasing ``nodes`` which must start and end at the segment
    endpoints. The returned trajectory is always ordered by increasing x.
    """
    a, b = spec.segment(segment_index)
    if nodes is None:
        if node_count < 2:
            raise ValueError("node_count must be at least 2")
        xs = np.linspace(a, b, node_count)
    else:
        xs = np.asarray(nodes, dtype=float)
        if xs[0] != a or xs[-1] != b or np.any(np.diff(xs) <= 0):
            raise ValueError("nodes must increase strictly from the segment start to its end")
    length = b - a
    path = xs if direction == LEFT_TO_RIGHT else xs[::-1].copy()
    y0 = np.array([float(v) for v in init], dtype=float)
    if y0.shape != (5,):
        y0 = np.array(list(SegmentState(*init)), dtype=float)
    p = spec.p[segment_index]
    states, status = _integrate(
        y0, path, float(lam), 1.0 / (p * p), spec.q.array(segment_index),
        RTOL, ATOL, MIN_STEP_FRACTION * length,
        _initial_step(length, lam, spec, segment_index), length, MAX_STEPS,
    )
    if status:
        reason = "step size fell below the minimum" if status == 1 else "step budget exhausted"
        raise StepFailure(reason, segment=segment_index + 1, lam=float(lam))
    if direction != LEFT_TO_RIGHT:
        states = states[::-1].copy()
    return SegmentTrajectory(segment_index + 1, float(lam), xs, states)
