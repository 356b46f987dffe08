"""Problem data: coefficients, validation, transmission algebra and JSON I/O.

The problem is

    -p_i^2 u'' + q(x) u = lambda u      on the i-th of four segments of [-1, 1]

with a left boundary condition ``alpha1 u(-1) + alpha2 u'(-1) = 0``, a right
boundary condition affine in lambda, and 2x2 transmission blocks linking the
one-sided traces at the three interior points.
"""

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple, Sequence

import numpy as np

from .errors import (
    BadInterfaces,
    DegenerateLeftBC,
    InvalidProblem,
    NonFiniteCoefficient,
    NonPositiveDeterminant,
    ZeroLeadingCoefficient,
)

NSEG = 4


@dataclass(frozen=True)
class TransmissionBlock:
    """u(h+0) = a u(h-0) + b u'(h-0),  u'(h+0) = c u(h-0) + d u'(h-0)."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        for name in ("a", "b", "c", "d"):
            object.__setattr__(self, name, float(getattr(self, name)))

    @property
    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    def apply(self, value, derivative):
        return (self.a * value + self.b * derivative,
                self.c * value + self.d * derivative)

    def invert(self, value, derivative):
        det = self.det
        return ((self.d * value - self.b * derivative) / det,
                (self.a * derivative - self.c * value) / det)


IDENTITY = TransmissionBlock(1.0, 0.0, 0.0, 1.0)


def apply_transmission(block, state):
    """Map the left trace ``(u, u')`` at an interface to the right trace."""
    return block.apply(state[0], state[1])


def invert_transmission(block, state_plus):
    """Recover the left trace from the right trace (needs ``block.det > 0``)."""
    return block.invert(state_plus[0], state_plus[1])


@dataclass(frozen=True)
class PotentialSpec:
    """Per-segment polynomial potential, coefficients in ascending degree."""

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs",
                           tuple(tuple(float(c) for c in seg) for seg in self.coeffs))

    @classmethod
    def zero(cls):
        return cls(((0.0,),) * NSEG)

    def array(self, i):
        return np.asarray(self.coeffs[i], dtype=float)

    def value(self, i, x):
        """q on segment ``i`` (0-based) at ``x`` (scalar or array)."""
        return np.polynomial.polynomial.polyval(x, self.coeffs[i])

    def is_zero(self):
        return all(c == 0.0 for seg in self.coeffs for c in seg)


class DerivedConstants(NamedTuple):
    theta: float
    gamma: float
    xi: float
    rho: float

    @property
    def scales(self):
        """Cumulative interface determinants (1, theta, theta*gamma, theta*gamma*xi)."""
        t, g, x = self.theta, self.gamma, self.xi
        return (1.0, t, t * g, t * g * x)

    @property
    def tgx(self):
        return self.theta * self.gamma * self.xi


@dataclass(frozen=True)
class ProblemSpec:
    """Validated problem data; construction raises on any violated assumption.

    ``right_bc`` is ``(beta1, beta2, beta1p, beta2p)`` and ``trans`` holds
    the three transmission blocks in the order h1, h2, h3.
    """

    p: tuple
    h: tuple
    q: PotentialSpec
    left_bc: tuple
    right_bc: tuple
    trans: tuple
    constants: DerivedConstants = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "p", tuple(float(v) for v in self.p))
        set_(self, "h", tuple(float(v) for v in self.h))
        set_(self, "left_bc", tuple(float(v) for v in self.left_bc))
        set_(self, "right_bc", tuple(float(v) for v in self.right_bc))
        if not isinstance(self.q, PotentialSpec):
            set_(self, "q", PotentialSpec(self.q))
        set_(self, "trans", tuple(b if isinstance(b, TransmissionBlock)
                                  else TransmissionBlock(*map(float, b))
                                  for b in self.trans))
        set_(self, "constants", _check(self))

    # -- geometry -----------------------------------------------------------
    @property
    def edges(self):
        return (-1.0,) + self.h + (1.0,)

    def segment(self, i):
        e = self.edges
        return e[i], e[i + 1]

    def lengths(self):
        e = self.edges
        return tuple(e[i + 1] - e[i] for i in range(NSEG))

    def segment_of(self, x):
        """0-based segment index containing ``x`` (interfaces go to the left segment)."""
        for i, hi in enumerate(self.h):
            if x <= hi:
                return i
        return NSEG - 1

    @property
    def weights(self):
        """Weights 1/(p_i^2 * scale_i) of the function part of the inner product."""
        return tuple(1.0 / (pi * pi * s) for pi, s in zip(self.p, self.constants.scales))

    # -- potential summaries used by the scanners ----------------------------
    def q_samples(self, i, n=101):
        a, b = self.segment(i)
        return self.q.value(i, np.linspace(a, b, n))

    def q_mean(self, i):
        return self._q_means[i]

    @cached_property
    def _q_means(self):
        return tuple(float(np.mean(self.q_samples(i))) for i in range(NSEG))

    def lambda_floor(self):
        """Heuristic lower end of the eigenvalue scan.

        min q (sampled) minus 10 (1 + max|q|). Eigenvalues are bounded below
        but no constant is available, so this is a guess guarded by the
        finite-difference count check.
        """
        qs = np.concatenate([self.q_samples(i) for i in range(NSEG)])
        return float(qs.min() - 10.0 * (1.0 + np.abs(qs).max()))

    def phase(self, lam):
        """WKB-style phase estimate sum_i L_i sqrt(max(lam - qbar_i, 0)) / |p_i|."""
        total = 0.0
        for i, L in enumerate(self.lengths()):
            total += L * math.sqrt(max(lam - self.q_mean(i), 0.0)) / abs(self.p[i])
        return total

    # -- boundary functionals --------------------------------------------------
    def N(self, value, derivative):
        b1, b2, _, _ = self.right_bc
        return b1 * value - b2 * derivative

    def Nprime(self, value, derivative):
        _, _, b1p, b2p = self.right_bc
        return b1p * value - b2p * derivative

    def right_residual(self, lam, value, derivative):
        """lam N'(u) + N(u): the right boundary condition evaluated at traces."""
        return lam * self.Nprime(value, derivative) + self.N(value, derivative)

    # -- serialisation -----------------------------------------------------------
    def to_dict(self):
        b1, b2, b1p, b2p = self.right_bc
        return {
            "p": list(self.p),
            "h": list(self.h),
            "q": [list(seg) for seg in self.q.coeffs],
            "left_bc": {"alpha1": self.left_bc[0], "alpha2": self.left_bc[1]},
            "right_bc": {"beta1": b1, "beta2": b2, "beta1p": b1p, "beta2p": b2p},
            "transmission": [{"a": t.a, "b": t.b, "c": t.c, "d": t.d} for t in self.trans],
        }

    def replace(self, **changes):
        kw = dict(p=self.p, h=self.h, q=self.q, left_bc=self.left_bc,
                  right_bc=self.right_bc, trans=self.trans)
        kw.update(changes)
        return ProblemSpec(**kw)


def _finite(name, values):
    for v in values:
        if not math.isfinite(v):
            raise NonFiniteCoefficient(f"non-finite value in {name}", field=name)


def _check(spec):
    _finite("p", spec.p)
    _finite("h", spec.h)
    _finite("left_bc", spec.left_bc)
    _finite("right_bc", spec.right_bc)
    for seg in spec.q.coeffs:
        _finite("q", seg)
    for k, t in enumerate(spec.trans):
        _finite(f"transmission[{k}]", (t.a, t.b, t.c, t.d))

    if len(spec.p) != NSEG or len(spec.h) != 3 or len(spec.trans) != 3:
        raise InvalidProblem("expected 4 leading coefficients, 3 interfaces and 3 blocks",
                             p=len(spec.p), h=len(spec.h), transmission=len(spec.trans))
    if len(spec.q.coeffs) != NSEG or any(len(seg) == 0 for seg in spec.q.coeffs):
        raise InvalidProblem("q needs a nonempty coefficient list for each of 4 segments")
    if len(spec.left_bc) != 2 or len(spec.right_bc) != 4:
        raise InvalidProblem("left_bc needs 2 and right_bc 4 coefficients")

    for i, pi in enumerate(spec.p):
        if pi == 0.0:
            raise ZeroLeadingCoefficient(f"p{i + 1} is zero", index=i + 1)
    if abs(spec.left_bc[0]) + abs(spec.left_bc[1]) == 0.0:
        raise DegenerateLeftBC("alpha1 and alpha2 are both zero")
    e = spec.edges
    if not all(e[i] < e[i + 1] for i in range(NSEG)):
        raise BadInterfaces("interfaces must satisfy -1 < h1 < h2 < h3 < 1", h=list(spec.h))

    b1, b2, b1p, b2p = spec.right_bc
    dets = {
        "theta": spec.trans[0].det,
        "gamma": spec.trans[1].det,
        "xi": spec.trans[2].det,
        "rho": b1p * b2 - b1 * b2p,
    }
    for name, value in dets.items():
        if not value > 0.0:
            raise NonPositiveDeterminant(f"{name} = {value!r} must be positive",
                                         which=name, value=value)
    return DerivedConstants(**{k: float(v) for k, v in dets.items()})


def validate_spec(raw):
    """Validate a candidate (mapping in the JSON layout, or a ProblemSpec).

    Returns the validated :class:`ProblemSpec`; its derived determinants are
    available as ``spec.constants``.
    """
    if isinstance(raw, ProblemSpec):
        return raw.replace()
    return from_dict(raw)


def from_dict(data):
    try:
        lb = data["left_bc"]
        rb = data["right_bc"]
        trans = [(t["a"], t["b"], t["c"], t["d"]) for t in data["transmission"]]
        fields = dict(
            p=_numbers(data["p"], "p"),
            h=_numbers(data["h"], "h"),
            q=PotentialSpec(tuple(_numbers(seg, "q") for seg in data["q"])),
            left_bc=_numbers((lb["alpha1"], lb["alpha2"]), "left_bc"),
            right_bc=_numbers((rb["beta1"], rb["beta2"], rb["beta1p"], rb["beta2p"]),
                              "right_bc"),
            trans=[_numbers(t, "transmission") for t in trans],
        )
    except KeyError as exc:
        raise InvalidProblem(f"missing key {exc.args[0]!r}", key=exc.args[0]) from None
    except TypeError as exc:
        raise InvalidProblem(f"malformed problem data: {exc}") from None
    return ProblemSpec(**fields)


def _numbers(values, name):
    out = []
    for v in values:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise InvalidProblem(f"{name} entries must be numbers", field=name, value=repr(v))
        out.append(float(v))
    return tuple(out)


def load_problem(path):
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidProblem(f"invalid JSON: {exc}", path=str(path)) from None
    return from_dict(data)


def save_problem(spec, path):
    with open(path, "w") as fh:
        json.dump(spec.to_dict(), fh, indent=2)
        fh.write("\n")


def make_spec(p=(1, 1, 1, 1), h=(-0.5, 0.0, 0.5), q=None, left_bc=(1, 0),
              right_bc=(0, 1, 1, 0), trans: Sequence = (IDENTITY,) * 3):
    """Convenience constructor; defaults give the baseline problem B0."""
    if q is None:
        q = PotentialSpec.zero()
    return ProblemSpec(p=p, h=h, q=q, left_bc=left_bc, right_bc=right_bc, trans=trans)
