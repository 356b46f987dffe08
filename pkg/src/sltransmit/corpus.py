"""Regression corpus: the baseline problem, a few hand-built variants and
seeded random problems drawn from ranges that keep every determinant
comfortably positive.
"""

import math

import numpy as np

from .problem import IDENTITY, PotentialSpec, TransmissionBlock, make_spec

RANDOM_SEEDS = (11, 23, 47)


def baseline():
    """B0: p = 1, q = 0, u(-1) = 0 on the left, lam u(1) - u'(1) = 0 on the right."""
    return make_spec()


def theta_two():
    """B0 with the derivative doubled across h1, so theta = 2."""
    return make_spec(trans=(TransmissionBlock(1.0, 0.0, 0.0, 2.0), IDENTITY, IDENTITY))


def mixed():
    """Signed leading coefficients, coupled blocks and a nonzero potential."""
    return make_spec(
        p=(1.0, -0.8, 1.3, 0.7),
        h=(-0.4, 0.1, 0.55),
        q=PotentialSpec(((1.0, 2.0), (0.0,), (3.0, -1.0, 0.5), (0.0,))),
        left_bc=(0.6, 0.8),
        right_bc=(0.5, 1.0, 1.0, 0.3),
        trans=(TransmissionBlock(2.0, 0.3, 0.1, 1.0),
               TransmissionBlock(1.0, 0.0, 0.0, 1.5),
               TransmissionBlock(0.8, 0.1, -0.2, 1.2)),
    )


def _block(rng):
    while True:
        a, d = rng.uniform(0.5, 2.0, 2)
        b, c = rng.uniform(-0.5, 0.5, 2)
        if a * d - b * c > 0.1:
            return TransmissionBlock(a, b, c, d)


def random_spec(rng):
    """A random valid problem.

    p_i = +-[0.6, 1.6]; interface gaps >= 0.2; q of degree <= 2 with
    coefficients in [-3, 3]; left condition (cos w, sin w) with
    w in [pi/4, 3pi/4]; blocks with a, d in [0.5, 2] and b, c in [-0.5, 0.5];
    rho >= 0.2.
    """
    rng = np.random.default_rng(rng)
    p = rng.uniform(0.6, 1.6, 4) * rng.choice((-1.0, 1.0), 4)
    gaps = 0.2 + rng.dirichlet(np.ones(4)) * (2.0 - 0.8)
    h = -1.0 + np.cumsum(gaps)[:3]
    q = tuple(tuple(rng.uniform(-3.0, 3.0, rng.integers(1, 4))) for _ in range(4))
    w = rng.uniform(math.pi / 4, 3 * math.pi / 4)
    while True:
        b1, b2, b1p, b2p = rng.uniform(-1.5, 1.5, 4)
        if b1p * b2 - b1 * b2p >= 0.2:
            break
    return make_spec(p=p, h=h, q=PotentialSpec(q), left_bc=(math.cos(w), math.sin(w)),
                     right_bc=(b1, b2, b1p, b2p), trans=tuple(_block(rng) for _ in range(3)))


def corpus():
    """Named regression problems, in a fixed order."""
    specs = {"B0": baseline(), "theta2": theta_two(), "mixed": mixed()}
    for seed in RANDOM_SEEDS:
        specs[f"random{seed}"] = random_spec(seed)
    return specs
