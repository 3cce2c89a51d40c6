"""Numerical integration utilities.

``adaptive_simpson`` is the refinement-guaranteed scalar integrator used
as an independent referee for the normal CDF. ``cell_integrals`` is a
vectorized fixed-node Gauss-Legendre integrator over many cells at once,
with panel doubling until the estimates stabilize; the quantizer uses it
because its cell counts can reach 2**20.
"""

from __future__ import annotations

import numpy as np

from .errors import NonConvergence

# 16-point Gauss-Legendre rule on [-1, 1].
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)

# Cells are processed in blocks to bound peak memory at large cell counts.
_CELL_BLOCK = 1 << 15


def adaptive_simpson(f, a: float, b: float, tol: float, max_depth: int = 60) -> float:
    """Integrate f over [a, b] with adaptive Simpson refinement.

    The local acceptance test is the classical |S2 - S1| <= 15*tol with
    Richardson extrapolation, halving the tolerance per split, so the
    total error is bounded by ``tol`` for integrands this package feeds
    it. Raises NonConvergence when a subinterval still fails at depth
    ``max_depth``.
    """
    if a == b:
        return 0.0

    def simpson(x0, x2, f0, f1, f2):
        return (x2 - x0) / 6.0 * (f0 + 4.0 * f1 + f2)

    def recurse(x0, x2, f0, f1, f2, whole, tol, depth):
        xm = 0.5 * (x0 + x2)
        xl = 0.5 * (x0 + xm)
        xr = 0.5 * (xm + x2)
        fl, fr = f(xl), f(xr)
        left = simpson(x0, xm, f0, fl, f1)
        right = simpson(xm, x2, f1, fr, f2)
        delta = left + right - whole
        if abs(delta) <= 15.0 * tol:
            return left + right + delta / 15.0
        if depth >= max_depth:
            raise NonConvergence(
                f"adaptive Simpson hit depth {max_depth} on [{x0}, {x2}]"
            )
        half = 0.5 * tol
        return recurse(x0, xm, f0, fl, f1, left, half, depth + 1) + recurse(
            xm, x2, f1, fr, f2, right, half, depth + 1
        )

    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = simpson(a, b, fa, fm, fb)
    return recurse(a, b, fa, fm, fb, whole, tol, 0)


def _gl_panels(f, lo: np.ndarray, hi: np.ndarray, panels: int) -> np.ndarray:
    """Gauss-Legendre integral of f over each [lo_j, hi_j], split into panels."""
    width = (hi - lo) / panels
    starts = lo[:, None] + width[:, None] * np.arange(panels)
    half = 0.5 * width[:, None]  # (cells, 1); all panels of a cell share it
    mid = starts + half
    x = mid[:, :, None] + half[:, :, None] * _GL_NODES  # (cells, panels, 16)
    vals = f(x.reshape(-1)).reshape(x.shape)
    per_panel = vals @ _GL_WEIGHTS  # (cells, panels)
    return (per_panel * half).sum(axis=1)


def cell_integrals(
    f, edges: np.ndarray, tol: float, max_doublings: int = 10
) -> np.ndarray:
    """Integral of f over each cell [edges[j], edges[j+1]], vectorized.

    Starts with one 16-node Gauss-Legendre panel per cell and doubles the
    panel count until the worst per-cell change is below ``tol`` (two
    consecutive agreeing levels). Raises NonConvergence if the doubling
    budget runs out.
    """
    lo = np.asarray(edges[:-1], dtype=np.float64)
    hi = np.asarray(edges[1:], dtype=np.float64)
    out = np.empty(lo.size)
    for start in range(0, lo.size, _CELL_BLOCK):
        sl = slice(start, min(start + _CELL_BLOCK, lo.size))
        out[sl] = _cell_block(f, lo[sl], hi[sl], tol, max_doublings)
    return out


def _cell_block(f, lo, hi, tol, max_doublings):
    prev = _gl_panels(f, lo, hi, 1)
    panels = 2
    for _ in range(max_doublings):
        cur = _gl_panels(f, lo, hi, panels)
        if np.max(np.abs(cur - prev)) <= tol:
            return cur
        prev = cur
        panels *= 2
    raise NonConvergence(
        f"cell integrals did not stabilize to {tol} within {max_doublings} doublings"
    )
