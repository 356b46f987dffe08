"""Finite-difference cross-check of the shooting eigenvalues.

Each segment gets ``m`` uniform nodes including both ends, so interface values
are duplicated (h-0 and h+0 are separate unknowns). Interior nodes carry the
central second-difference form of the equation, and the eight remaining rows
carry the left condition, the six transmission conditions and the
lambda-affine right condition, with one-sided three-point derivatives. The
resulting matrix M(lam) = M0 + lam M1 is singular exactly at the discrete
eigenvalues, which are located by scanning the sign of det M(lam).

Unknown (segment i, node j) sits in column i*m + j. The eight constraint
rows fill the row slots of the segment end nodes, keeping the matrix inside
a band of 3 sub- and 2 super-diagonals.
"""

import math
from functools import lru_cache

import numpy as np
import scipy.sparse
from scipy.linalg.lapack import dgbtrf

from .errors import ScanExhausted
from .problem import NSEG

KL, KU = 3, 2
MIN_MESH = 16
SUBSTEPS = 8


def _check_mesh(m):
    if m < MIN_MESH:
        raise ValueError(f"mesh needs at least {MIN_MESH} nodes per segment, got {m}")


def _triplets(spec, m):
    """Sparse triplets of M(lam) = M0 + lam * M1 as (rows, cols, v0, v1)."""
    _check_mesh(m)
    rows, cols, v0, v1 = [], [], [], []

    def put(r, cs, vs, ls=None):
        rows.extend([r] * len(cs))
        cols.extend(cs)
        v0.extend(vs)
        v1.extend([0.0] * len(cs) if ls is None else ls)

    hs = [L / (m - 1) for L in spec.lengths()]

    # interior rows, vectorised per segment
    j = np.arange(1, m - 1)
    for i in range(NSEG):
        a, b = spec.segment(i)
        x = np.linspace(a, b, m)[1:-1]
        c = spec.p[i] ** 2 / hs[i] ** 2
        diag = 2.0 * c + spec.q.value(i, x)
        off = np.full_like(diag, -c)
        zero = np.zeros_like(diag)
        base = i * m + j
        rows.extend(np.repeat(base, 3).tolist())
        cols.extend(np.stack([base - 1, base, base + 1], axis=1).ravel().tolist())
        v0.extend(np.stack([off, diag, off], axis=1).ravel().tolist())
        v1.extend(np.stack([zero, zero - 1.0, zero], axis=1).ravel().tolist())

    def d_start(i):
        s = i * m
        h = hs[i]
        return [s, s + 1, s + 2], [-1.5 / h, 2.0 / h, -0.5 / h]

    def d_end(i):
        e = i * m + m - 1
        h = hs[i]
        return [e - 2, e - 1, e], [0.5 / h, -2.0 / h, 1.5 / h]

    a1, a2 = spec.left_bc
    cs, ds = d_start(0)
    put(0, cs, [a2 * d + (a1 if k == 0 else 0.0) for k, d in enumerate(ds)])

    for i, blk in enumerate(spec.trans):
        end = i * m + m - 1
        start = (i + 1) * m
        ce, de = d_end(i)
        # value condition: u(h+) - a u(h-) - b u'(h-) = 0
        put(end, [start] + ce,
            [1.0] + [-blk.b * d - (blk.a if k == 2 else 0.0) for k, d in enumerate(de)])
        # derivative condition: u'(h+) - c u(h-) - d u'(h-) = 0
        cs, ds = d_start(i + 1)
        put(start, cs + ce,
            ds + [-blk.d * d - (blk.c if k == 2 else 0.0) for k, d in enumerate(de)])

    # lam (beta1' u - beta2' u') + (beta1 u - beta2 u') = 0 at x = 1
    b1, b2, b1p, b2p = spec.right_bc
    ce, de = d_end(NSEG - 1)
    put(NSEG * m - 1, ce,
        [-b2 * d + (b1 if k == 2 else 0.0) for k, d in enumerate(de)],
        [-b2p * d + (b1p if k == 2 else 0.0) for k, d in enumerate(de)])
    return (np.asarray(rows), np.asarray(cols),
            np.asarray(v0, dtype=float), np.asarray(v1, dtype=float))


def assemble(spec, lam, m):
    """M(lam) as a sparse (4m x 4m) matrix."""
    r, c, v0, v1 = _triplets(spec, m)
    n = NSEG * m
    return scipy.sparse.csr_matrix((v0 + lam * v1, (r, c)), shape=(n, n))


@lru_cache(maxsize=8)
def _band_parts(spec, m):
    r, c, v0, v1 = _triplets(spec, m)
    n = NSEG * m
    parts = []
    for v in (v0, v1):
        ab = np.zeros((2 * KL + KU + 1, n))
        np.add.at(ab, (KL + KU + r - c, c), v)
        ab.setflags(write=False)
        parts.append(ab)
    return tuple(parts)


def _banded(spec, lam, m):
    ab0, ab1 = _band_parts(spec, m)
    return ab0 + lam * ab1


def det_sign(spec, lam, m):
    """(sign, log|det|) of M(lam) from a banded LU with partial pivoting."""
    lu, piv, info = dgbtrf(_banded(spec, lam, m), KL, KU)
    if info < 0:
        raise ValueError(f"dgbtrf rejected argument {-info}")
    diag = lu[KL + KU]
    if np.any(diag == 0.0):
        return 0.0, -math.inf
    swaps = int(np.count_nonzero(piv != np.arange(len(piv))))
    sign = (-1.0) ** swaps * (-1.0) ** int(np.count_nonzero(diag < 0))
    return sign, float(np.sum(np.log(np.abs(diag))))


def _scan(spec, lo, hi, m):
    """Grid points and det signs from lo up to hi.

    The step is a fraction of the shooting scan step: without derivative
    information a sign scan cannot see two roots inside one step.
    """
    from .spectrum import scan_step

    lams = [lo]
    lam = lo
    while lam < hi:
        lam = min(lam + scan_step(spec, lam) / SUBSTEPS, hi)
        lams.append(lam)
    signs = [det_sign(spec, x, m)[0] for x in lams]
    return lams, signs


def count_sign_changes(spec, lo, hi, m):
    _, signs = _scan(spec, lo, hi, m)
    return sum(1 for s, t in zip(signs, signs[1:]) if s * t < 0)


def _bisect(spec, lo, hi, slo, m, tol):
    while hi - lo > tol * max(1.0, abs(lo)):
        mid = 0.5 * (lo + hi)
        s = det_sign(spec, mid, m)[0]
        if s == 0.0:
            return mid
        if s == slo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def oracle_eigenvalues(spec, count, m, lam_range=None, tol=1e-8):
    """The ``count`` smallest discrete eigenvalues in ``lam_range`` (default: auto window)."""
    from .spectrum import resolve_start, scan_ceiling

    if lam_range is None:
        lo = resolve_start(spec, None)
        hi = scan_ceiling(spec, lo, count)
    else:
        lo, hi = map(float, lam_range)
    lams, signs = _scan(spec, lo, hi, m)
    roots = []
    for a, b, sa, sb in zip(lams, lams[1:], signs, signs[1:]):
        if sa * sb < 0:
            roots.append(_bisect(spec, a, b, sa, m, tol))
            if len(roots) == count:
                return roots
    raise ScanExhausted(f"finite-difference scan found {len(roots)} of {count} eigenvalues",
                        found=roots, ceiling=hi, requested=count)


def smallest_singular_values(spec, lam, m, k=2):
    """The k smallest singular values of the dense M(lam); for small meshes only."""
    s = np.linalg.svd(assemble(spec, lam, m).toarray(), compute_uv=False)
    return s[::-1][:k]
