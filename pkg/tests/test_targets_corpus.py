import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sltransmit.corpus import RANDOM_SEEDS, baseline, corpus, random_spec
from sltransmit.hilbert import grid
from sltransmit.problem import validate_spec
from sltransmit.targets import BadTarget, parse_builtin


def test_poly_same_on_all_segments():
    t = parse_builtin("poly:[1, 0, -1]x4")
    x = np.linspace(-1, 1, 7)
    for i in range(4):
        assert np.allclose(t.value(x, i), 1 - x**2)
        assert np.allclose(t.derivative(x, i), -2 * x)


def test_poly_per_segment():
    t = parse_builtin("poly:[1];[0,1];[0,0,1];[2,-1]")
    assert t.value(0.5, 0) == 1.0 and t.derivative(0.5, 0) == 0.0
    assert t.value(0.5, 2) == 0.25 and t.derivative(0.5, 2) == 1.0
    assert t.trace_right() == (1.0, -1.0)


def test_gauss():
    t = parse_builtin("gauss:2,0.25")
    assert t.value(0.25, 1) == 1.0
    x = np.array([0.1, 0.7])
    eps = 1e-6
    fd = (t.value(x + eps, 0) - t.value(x - eps, 0)) / (2 * eps)
    assert np.allclose(t.derivative(x, 0), fd, rtol=1e-8)


def test_element_default_scalar_is_n_prime():
    spec = baseline()
    F = parse_builtin("poly:[1,0,-1]x4").element(spec, n=9)
    # N'(f) = beta1' f(1) - beta2' f'(1) = f(1) = 0 for B0
    assert F.h == 0.0
    assert np.allclose(F.f[3], 1 - grid(spec, 9)[3] ** 2)
    assert parse_builtin("poly:[3]x4").element(spec, h=-2.0, n=9).h == -2.0


@pytest.mark.parametrize("text", [
    "poly", "poly:", "poly:[]x4", "poly:[1,2]", "poly:[1];[2]", "poly:[true]x4",
    "poly:[1,\"a\"]x4", "gauss:1", "gauss:a,b", "gauss:inf,0", "cosine:1,2", "poly:{1}x4",
])
def test_bad_builtins(text):
    with pytest.raises(BadTarget) as info:
        parse_builtin(text)
    assert info.value.exit_code == 2


def test_corpus_names_and_validity():
    specs = corpus()
    assert list(specs) == ["B0", "theta2", "mixed"] + [f"random{s}" for s in RANDOM_SEEDS]
    for spec in specs.values():
        assert validate_spec(spec) == spec
    assert specs["theta2"].constants.theta == 2.0


def test_corpus_deterministic():
    a, b = corpus(), corpus()
    assert all(a[k] == b[k] for k in a)


@given(st.integers(0, 2**32 - 1))
def test_random_spec_ranges(seed):
    spec = random_spec(seed)
    assert spec == random_spec(seed)
    assert all(0.6 <= abs(p) <= 1.6 for p in spec.p)
    assert np.all(np.diff(spec.edges) >= 0.2 - 1e-12)
    assert all(len(c) <= 3 and all(abs(v) <= 3 for v in c) for c in spec.q.coeffs)
    a1, a2 = spec.left_bc
    w = math.atan2(a2, a1)
    assert math.pi / 4 <= w <= 3 * math.pi / 4
    assert all(abs(b) <= 1.5 for b in spec.right_bc)
    assert spec.constants.rho >= 0.2
    for blk in spec.trans:
        assert 0.5 <= blk.a <= 2 and 0.5 <= blk.d <= 2
        assert abs(blk.b) <= 0.5 and abs(blk.c) <= 0.5
        assert blk.det > 0.1


def test_random_spec_accepts_generator():
    rng = np.random.default_rng(3)
    first = random_spec(rng)
    assert first != random_spec(rng)
    assert first == random_spec(np.random.default_rng(3))
