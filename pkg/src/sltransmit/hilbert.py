"""Weighted inner products on H1 and H = H1 + C, expansions in eigen-elements.

Functions are stored as samples on a uniform grid per segment (odd node
count, closed segments) and integrated with composite Simpson weights.
"""

import csv
from dataclasses import dataclass

import numpy as np

from .errors import GridMismatch, NotOrthonormal
from .problem import NSEG

DEFAULT_NODES = 2049


def simpson_weights(n, length):
    if n < 3 or n % 2 == 0:
        raise GridMismatch(f"Simpson grids need an odd node count >= 3, got {n}", nodes=n)
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * (length / (n - 1) / 3.0)


def grid(spec, n=DEFAULT_NODES):
    """Per-segment uniform abscissae (closed segments, shared interface points)."""
    return tuple(np.linspace(*spec.segment(i), n) for i in range(NSEG))


@dataclass(frozen=True)
class HElement:
    """F = (f, h): four per-segment sample arrays and a real scalar."""

    f: tuple
    h: float

    def __post_init__(self):
        object.__setattr__(self, "f", tuple(np.asarray(s, dtype=float) for s in self.f))
        object.__setattr__(self, "h", float(self.h))

    @property
    def nodes(self):
        return tuple(len(s) for s in self.f)

    def __add__(self, other):
        _match(self.f, other.f)
        return HElement(tuple(a + b for a, b in zip(self.f, other.f)), self.h + other.h)

    def __sub__(self, other):
        _match(self.f, other.f)
        return HElement(tuple(a - b for a, b in zip(self.f, other.f)), self.h - other.h)

    def __mul__(self, c):
        return HElement(tuple(c * s for s in self.f), c * self.h)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self * (1.0 / c)

    @classmethod
    def zeros(cls, n=DEFAULT_NODES):
        return cls(tuple(np.zeros(n) for _ in range(NSEG)), 0.0)

    @classmethod
    def from_function(cls, spec, func, h=0.0, n=DEFAULT_NODES):
        """Sample ``func(x, segment)`` (vectorised in x, 0-based segment) on the grid."""
        xs = grid(spec, n)
        return cls(tuple(np.asarray(func(x, i), dtype=float) * np.ones_like(x)
                         for i, x in enumerate(xs)), h)


def _match(f, g):
    if len(f) != NSEG or len(g) != NSEG:
        raise GridMismatch("piecewise data must have four segments")
    for i, (a, b) in enumerate(zip(f, g)):
        if len(a) != len(b):
            raise GridMismatch(f"segment {i + 1} has {len(a)} vs {len(b)} nodes",
                               segment=i + 1, left=len(a), right=len(b))


def inner_product_H1(spec, f, g):
    """sum_i 1/(p_i^2 scale_i) * integral over segment i of f g."""
    _match(f, g)
    total = 0.0
    for i, (a, b, wt, L) in enumerate(zip(f, g, spec.weights, spec.lengths())):
        total += wt * float(np.dot(simpson_weights(len(a), L), a * b))
    return total


def inner_product_H(spec, F, G):
    """<f, g>_1 + h k / (rho theta gamma xi)."""
    k = spec.constants
    return inner_product_H1(spec, F.f, G.f) + F.h * G.h / (k.rho * k.tgx)


def norm_H(spec, F):
    return float(np.sqrt(inner_product_H(spec, F, F)))


def boundary_functionals(spec, value, derivative):
    """(N, N') = (beta1 f(1) - beta2 f'(1), beta1' f(1) - beta2' f'(1))."""
    return spec.N(value, derivative), spec.Nprime(value, derivative)


@dataclass(frozen=True)
class GramReport:
    gram: np.ndarray
    max_off_diagonal: float
    max_diagonal_error: float


def _elements(items):
    return [getattr(e, "Phi", e) for e in items]


def gram_matrix(spec, elements):
    els = _elements(elements)
    n = len(els)
    G = np.empty((n, n))
    for m in range(n):
        for j in range(m, n):
            G[m, j] = G[j, m] = inner_product_H(spec, els[m], els[j])
    return G


def orthogonality_check(spec, eigenpairs):
    """Gram matrix of the eigen-elements with its largest off-diagonal entry."""
    if len(eigenpairs) < 2:
        raise ValueError("orthogonality_check needs at least two eigen-elements")
    G = gram_matrix(spec, eigenpairs)
    off = G - np.diag(np.diag(G))
    return GramReport(G, float(np.abs(off).max()), float(np.abs(np.diag(G) - 1.0).max()))


@dataclass(frozen=True)
class Expansion:
    coefficients: np.ndarray
    reconstruction: HElement
    residuals: np.ndarray  # residuals[N-1] = ||F - F_N||_H
    norm: float

    def parseval_gap(self):
        """||F||^2 - sum_{n<=N} c_n^2 for each N."""
        return self.norm ** 2 - np.cumsum(self.coefficients ** 2)


def expand(spec, F, eigenpairs, orth_tol=1e-5):
    """Coefficients <F, Phi_n>, truncated sums and their residual norms."""
    els = _elements(eigenpairs)
    if len(els) >= 2:
        rep = orthogonality_check(spec, els)
        if rep.max_off_diagonal > orth_tol or rep.max_diagonal_error > orth_tol:
            raise NotOrthonormal("eigen-elements are not orthonormal",
                                 max_off_diagonal=rep.max_off_diagonal,
                                 max_diagonal_error=rep.max_diagonal_error)
    elif els and abs(norm_H(spec, els[0]) - 1.0) > orth_tol:
        raise NotOrthonormal("eigen-element is not normalised")
    coeffs = np.array([inner_product_H(spec, F, e) for e in els])
    partial = HElement(tuple(np.zeros_like(s) for s in F.f), 0.0)
    residuals = np.empty(len(els))
    for n, (c, e) in enumerate(zip(coeffs, els)):
        partial = partial + c * e
        residuals[n] = norm_H(spec, F - partial)
    return Expansion(coeffs, partial, residuals, norm_H(spec, F))


def write_gram_csv(path_or_file, gram):
    rows = [(m + 1, n + 1, gram[m, n]) for m in range(gram.shape[0])
            for n in range(gram.shape[1])]
    _write_csv(path_or_file, ("m", "n", "gram"), rows)


def write_residual_csv(path_or_file, residuals):
    _write_csv(path_or_file, ("N", "residual"),
               [(n + 1, r) for n, r in enumerate(residuals)])


def fmt(x):
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x) + 0.0, ".17g")  # + 0.0 folds -0 into 0


def _write_csv(path_or_file, header, rows):
    own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
    fh = open(path_or_file, "w", newline="") if own else path_or_file
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    finally:
        if own:
            fh.close()
