"""Builtin functions for expansion targets and resolvent right-hand sides.

Grammar::

    poly:[c0,c1,...]x4              same ascending coefficients on all segments
    poly:[c0,...];[c0,...];[..];[..] one coefficient list per segment
    gauss:a,b                       exp(-a (x - b)^2) on every segment
"""

import json
import re

import numpy as np

from .errors import SLError
from .hilbert import DEFAULT_NODES, HElement, grid
from .problem import NSEG

P = np.polynomial.polynomial


class BadTarget(SLError, ValueError):
    code = "BadTarget"
    exit_code = 2


class Builtin:
    """A piecewise function with its derivative, both vectorised in x."""

    def __init__(self, text, value, deriv):
        self.text = text
        self._value = value
        self._deriv = deriv

    def value(self, x, i):
        return self._value(np.asarray(x, dtype=float), i)

    def derivative(self, x, i):
        return self._deriv(np.asarray(x, dtype=float), i)

    def trace_right(self):
        return float(self.value(1.0, NSEG - 1)), float(self.derivative(1.0, NSEG - 1))

    def element(self, spec, h=None, n=DEFAULT_NODES):
        """Sample on the grid; ``h`` defaults to N'(f) at x = 1."""
        if h is None:
            h = spec.Nprime(*self.trace_right())
        return HElement(tuple(self.value(x, i) * np.ones_like(x)
                              for i, x in enumerate(grid(spec, n))), h)


def _coeff_list(text):
    try:
        vals = json.loads(text)
    except json.JSONDecodeError:
        vals = None
    if not isinstance(vals, list) or not vals or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in vals):
        raise BadTarget(f"bad coefficient list {text!r}", text=text)
    return [float(v) for v in vals]


def _poly(body, text):
    m = re.fullmatch(r"\s*(\[[^\]]*\])\s*x\s*4\s*", body)
    if m:
        segs = [_coeff_list(m.group(1))] * NSEG
    else:
        parts = body.split(";")
        if len(parts) != NSEG:
            raise BadTarget("poly needs '[...]x4' or four ';'-separated lists", text=text)
        segs = [_coeff_list(s.strip()) for s in parts]
    ders = [P.polyder(c) if len(c) > 1 else [0.0] for c in segs]
    return Builtin(text, lambda x, i: P.polyval(x, segs[i]),
                   lambda x, i: P.polyval(x, ders[i]))


def _gauss(body, text):
    try:
        a, b = (float(v) for v in body.split(","))
    except ValueError:
        raise BadTarget("gauss needs two numbers 'a,b'", text=text) from None
    if not (np.isfinite(a) and np.isfinite(b)):
        raise BadTarget("gauss parameters must be finite", text=text)
    return Builtin(text, lambda x, i: np.exp(-a * (x - b) ** 2),
                   lambda x, i: -2 * a * (x - b) * np.exp(-a * (x - b) ** 2))


def parse_builtin(text):
    kind, sep, body = text.partition(":")
    if not sep:
        raise BadTarget(f"expected 'poly:...' or 'gauss:...', got {text!r}", text=text)
    kind = kind.strip().lower()
    if kind == "poly":
        return _poly(body, text)
    if kind == "gauss":
        return _gauss(body, text)
    raise BadTarget(f"unknown builtin {kind!r}", text=text)
