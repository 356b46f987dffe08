import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sltransmit.corpus import random_spec
from sltransmit.errors import StepFailure
from sltransmit.hilbert import simpson_weights
from sltransmit.ivp import (
    LEFT_TO_RIGHT,
    RIGHT_TO_LEFT,
    SegmentState,
    integrate_segment,
)


def test_sine_closed_form(b0):
    lam = math.pi**2
    tr = integrate_segment(b0, 0, lam, SegmentState(0.0, math.pi), LEFT_TO_RIGHT)
    end = tr.last()
    assert tr.segment == 1
    assert abs(end.u - 1.0) <= 1e-9
    assert abs(end.du) <= 1e-9


@pytest.mark.parametrize("seg", range(4))
def test_constant_solution_at_zero(b0, seg):
    tr = integrate_segment(b0, seg, 0.0, SegmentState(1.0, 0.0), node_count=9)
    assert np.all(tr.u == 1.0)
    assert np.all(tr.du == 0.0)
    assert np.allclose(tr.x, np.linspace(*b0.segment(seg), 9))


def test_variational_matches_finite_difference(b0):
    init = SegmentState(0.3, -0.7)
    eps = 1e-6
    hi = integrate_segment(b0, 0, 1.0 + eps, init).last()
    lo = integrate_segment(b0, 0, 1.0 - eps, init).last()
    mid = integrate_segment(b0, 0, 1.0, init).last()
    assert mid.ul == pytest.approx((hi.u - lo.u) / (2 * eps), rel=1e-6)
    assert mid.dul == pytest.approx((hi.du - lo.du) / (2 * eps), rel=1e-6)


@pytest.mark.parametrize("lam", [-30.0, -1.0, 0.0, 2.0, 400.0])
def test_constant_coefficient_closed_form(b0, lam):
    a, b = b0.segment(2)
    x = np.linspace(a, b, 11)
    A, B = 0.8, -1.3
    tr = integrate_segment(b0, 2, lam, SegmentState(A, B), nodes=x)
    t = x - a
    if lam > 0:
        s = math.sqrt(lam)
        u = A * np.cos(s * t) + B * np.sin(s * t) / s
        du = -A * s * np.sin(s * t) + B * np.cos(s * t)
    elif lam < 0:
        s = math.sqrt(-lam)
        u = A * np.cosh(s * t) + B * np.sinh(s * t) / s
        du = A * s * np.sinh(s * t) + B * np.cosh(s * t)
    else:
        u = A + B * t
        du = B + 0 * t
    scale = np.max(np.abs(u)) + np.max(np.abs(du))
    assert np.max(np.abs(tr.u - u)) <= 1e-9 * scale
    assert np.max(np.abs(tr.du - du)) <= 1e-9 * scale


@given(st.integers(0, 2**32 - 1), st.integers(0, 3), st.floats(-20, 200),
       st.floats(-2, 2), st.floats(-2, 2))
def test_reversibility(seed, seg, lam, u0, du0):
    if abs(u0) + abs(du0) < 1e-3:
        return
    spec = random_spec(seed)
    fwd = integrate_segment(spec, seg, lam, SegmentState(u0, du0), LEFT_TO_RIGHT).last()
    back = integrate_segment(spec, seg, lam, SegmentState(fwd.u, fwd.du), RIGHT_TO_LEFT).first()
    scale = max(abs(u0), abs(du0))
    assert abs(back.u - u0) <= 1e-9 * scale
    assert abs(back.du - du0) <= 1e-9 * scale


def test_right_to_left_orders_by_x(b0):
    tr = integrate_segment(b0, 3, 5.0, SegmentState(1.0, 0.0), RIGHT_TO_LEFT, node_count=5)
    assert np.all(np.diff(tr.x) > 0)
    assert tr.last().u == 1.0 and tr.last().du == 0.0


@pytest.mark.parametrize("lam", [0.5, 40.0])
def test_quad_matches_simpson(mixed_spec, lam):
    n = 1025
    x = np.linspace(*mixed_spec.segment(2), n)
    tr = integrate_segment(mixed_spec, 2, lam, SegmentState(1.0, 0.5), nodes=x)
    simpson = simpson_weights(n, x[-1] - x[0]) @ tr.u**2
    assert tr.quad[-1] == pytest.approx(simpson, rel=1e-8)
    assert tr.quad[0] == 0.0


def test_quad_analytic(b0):
    # u = sin(pi (x+1)) / pi on [-1, -0.5]: integral of u^2 is 1/(4 pi^2)
    tr = integrate_segment(b0, 0, math.pi**2, SegmentState(0.0, 1.0))
    assert tr.last().quad == pytest.approx(1 / (4 * math.pi**2), rel=1e-10)


def test_step_failure_on_absurd_lambda(b0):
    with pytest.raises(StepFailure) as info:
        integrate_segment(b0, 0, 1e20, SegmentState(0.0, 1.0))
    assert info.value.exit_code == 3
    assert info.value.context["segment"] == 1


def test_bad_nodes_rejected(b0):
    with pytest.raises(ValueError):
        integrate_segment(b0, 0, 1.0, SegmentState(1.0, 0.0), node_count=1)
    with pytest.raises(ValueError):
        integrate_segment(b0, 0, 1.0, SegmentState(1.0, 0.0), nodes=[-1.0, -0.7])
    with pytest.raises(ValueError):
        integrate_segment(b0, 0, 1.0, SegmentState(1.0, 0.0), nodes=[-1.0, -0.6, -0.8, -0.5])


def test_deterministic(mixed_spec):
    a = integrate_segment(mixed_spec, 1, 12.5, SegmentState(0.2, 1.0), node_count=33)
    b = integrate_segment(mixed_spec, 1, 12.5, SegmentState(0.2, 1.0), node_count=33)
    assert np.array_equal(a.states, b.states)
