"""Solve (A - eta) Y = F for real eta outside the spectrum.

The solution is y = d u + w where u is the left shooting solution at eta and
w solves the inhomogeneous equation with zero data at x = -1 and the
transmission conditions at the interfaces. The scalar d comes from the second
component of the operator equation, -N(y) - eta N'(y) = h, whose
coefficient -N(u) - eta N'(u) = -Delta(eta) is nonzero off the spectrum.
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_simpson

from .characteristic import char_value, left_solution
from .errors import EtaIsEigenvalue, GridMismatch
from .hilbert import HElement, grid, norm_H
from .ivp import LEFT_TO_RIGHT, SegmentState, integrate_segment
from .problem import NSEG


@dataclass(frozen=True)
class PiecewiseSamples:
    """Values and derivatives of a piecewise function on per-segment grids."""

    x: tuple
    y: tuple
    dy: tuple

    def at_right(self):
        return self.y[-1][-1], self.dy[-1][-1]

    def at_left(self):
        return self.y[0][0], self.dy[0][0]


@dataclass(frozen=True)
class ResolventSolution:
    eta: float
    d: float
    y: PiecewiseSamples
    Y: HElement
    residual: float
    residual_f: float
    residual_h: float


def _node_count(f):
    counts = {len(s) for s in f}
    if len(f) != NSEG or len(counts) != 1:
        raise GridMismatch("right-hand side needs four equally sized segment arrays")
    return counts.pop()


def homogeneous_solution(spec, eta, nodes=None):
    """The left shooting solution at ``lam = eta``, optionally on the Simpson grid."""
    if nodes is None:
        return left_solution(spec, eta)
    return left_solution(spec, eta, nodes=grid(spec, nodes))


def particular_solution(spec, eta, f):
    """w with tau w - eta w = f, w(-1) = w'(-1) = 0, and the transmission conditions.

    ``f`` is a sequence of four per-segment sample arrays (or an HElement).
    On each segment the fundamental pair with identity data at the segment's
    left end gives w by variation of parameters; cumulative integrals use
    Simpson's rule on the sample grid.
    """
    f = getattr(f, "f", f)
    n = _node_count(f)
    xs = grid(spec, n)
    state = (0.0, 0.0)
    ys, dys = [], []
    for i in range(NSEG):
        x = xs[i]
        U = integrate_segment(spec, i, eta, SegmentState(1.0, 0.0), LEFT_TO_RIGHT, nodes=x)
        V = integrate_segment(spec, i, eta, SegmentState(0.0, 1.0), LEFT_TO_RIGHT, nodes=x)
        r = -np.asarray(f[i], dtype=float) / spec.p[i] ** 2
        # w'' - (q - eta)/p^2 w = r and W(U, V) = 1
        Iu = cumulative_simpson(U.u * r, x=x, initial=0.0)
        Iv = cumulative_simpson(V.u * r, x=x, initial=0.0)
        A, B = state
        y = A * U.u + B * V.u + V.u * Iu - U.u * Iv
        dy = A * U.du + B * V.du + V.du * Iu - U.du * Iv
        ys.append(y)
        dys.append(dy)
        if i < NSEG - 1:
            state = spec.trans[i].apply(y[-1], dy[-1])
    return PiecewiseSamples(xs, tuple(ys), tuple(dys))


def derivative(values, h):
    """Fourth-order finite-difference derivative on a uniform grid."""
    v = np.asarray(values, dtype=float)
    out = np.empty_like(v)
    out[2:-2] = (v[:-4] - 8 * v[1:-3] + 8 * v[3:-1] - v[4:]) / (12 * h)
    c = np.array([-25, 48, -36, 16, -3]) / (12 * h)
    out[0] = c @ v[:5]
    out[1] = np.array([-3, -10, 18, -6, 1]) / (12 * h) @ v[:5]
    out[-1] = -c @ v[-1:-6:-1]
    out[-2] = -(np.array([-3, -10, 18, -6, 1]) / (12 * h)) @ v[-1:-6:-1]
    return out


def apply_operator(spec, eta, y):
    """Function part of (A - eta) Y: -p^2 y'' + (q - eta) y, with y'' from dy by differences."""
    out = []
    for i in range(NSEG):
        x = y.x[i]
        d2 = derivative(y.dy[i], x[1] - x[0])
        out.append(-spec.p[i] ** 2 * d2 + (spec.q.value(i, x) - eta) * y.y[i])
    return tuple(out)


def resolvent_residual(spec, eta, y, F):
    """(relative, function-part, scalar-part) residuals of (A - eta) Y = F."""
    Af = apply_operator(spec, eta, y)
    y1, dy1 = y.at_right()
    rh = -spec.N(y1, dy1) - eta * spec.Nprime(y1, dy1) - F.h
    R = HElement(tuple(a - b for a, b in zip(Af, F.f)), rh)
    scale = max(norm_H(spec, F), 1e-300)
    rf = norm_H(spec, HElement(R.f, 0.0)) / scale
    k = spec.constants
    rs = abs(rh) / np.sqrt(k.rho * k.tgx) / scale
    return norm_H(spec, R) / scale, rf, rs


def resolvent_solve(spec, eta, F):
    """Y = (A - eta)^{-1} F for an HElement F; raises EtaIsEigenvalue on the spectrum."""
    delta = char_value(spec, eta)[0]
    if not abs(delta) > 1e-8 * (1.0 + abs(eta)):
        raise EtaIsEigenvalue(f"eta = {eta!r} is (numerically) an eigenvalue",
                              eta=float(eta), delta=float(delta))
    n = _node_count(F.f)
    u = homogeneous_solution(spec, eta, nodes=n)
    w = particular_solution(spec, eta, F.f)
    u1, du1 = u.at_right()[:2]
    w1, dw1 = w.at_right()
    coef = -spec.N(u1, du1) - eta * spec.Nprime(u1, du1)
    d = (F.h + spec.N(w1, dw1) + eta * spec.Nprime(w1, dw1)) / coef
    y = PiecewiseSamples(
        w.x,
        tuple(d * s.u + wy for s, wy in zip(u.segments, w.y)),
        tuple(d * s.du + wd for s, wd in zip(u.segments, w.dy)),
    )
    y1, dy1 = y.at_right()
    Y = HElement(y.y, spec.Nprime(y1, dy1))
    rel, rf, rh = resolvent_residual(spec, eta, y, F)
    return ResolventSolution(float(eta), float(d), y, Y, rel, rf, rh)
