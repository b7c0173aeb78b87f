"""Selectable evaluation backend for the position-space kernels.

The pointwise kernels (piecewise potential, its antiderivative, the Q1 kernel
and its grid fill) exist twice: a vectorized numpy reference and numba-jitted
scalar loops. PSEUDOHERM_BACKEND=numba|numpy picks the active set at import
time; numba is the default and falls back to numpy when unavailable. Both
paths use the same arithmetic expressions so results agree bitwise.

Piecewise data comes in as three aligned arrays:
    breaks  -- strictly increasing breakpoints x_0 < ... < x_{K-1}
    vals    -- K+1 interval values, vals[i] on (x_{i-1}, x_i)
    vknots  -- V(x_i) with V the antiderivative anchored at V(0) = 0
At a breakpoint the potential takes the two-sided average; V is continuous
piecewise linear with slope vals[i+1] to the right of x_i.
"""

import os

import numpy as np

BACKEND = os.environ.get("PSEUDOHERM_BACKEND", "numba").lower()
if BACKEND not in ("numba", "numpy"):
    raise ValueError(f"PSEUDOHERM_BACKEND must be 'numba' or 'numpy', got {BACKEND!r}")

USING_NUMBA = False
if BACKEND == "numba":
    try:
        from numba import njit

        USING_NUMBA = True
    except ImportError:
        BACKEND = "numpy"


def potential_values_numpy(x: np.ndarray, breaks: np.ndarray, vals: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    left = np.searchsorted(breaks, x, side="left")
    right = np.searchsorted(breaks, x, side="right")
    out = vals[right]
    hit = left != right
    out = np.where(hit, 0.5 * (vals[left] + vals[np.minimum(left + 1, len(vals) - 1)]), out)
    return out


def antiderivative_values_numpy(
    x: np.ndarray, breaks: np.ndarray, vknots: np.ndarray, vals: np.ndarray
) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    idx = np.searchsorted(breaks, x, side="right") - 1
    anchored = np.maximum(idx, 0)
    return vknots[anchored] + vals[anchored + (idx >= 0)] * (x - breaks[anchored])


def q1_matrix_numpy(
    xs: np.ndarray, ys: np.ndarray, breaks: np.ndarray, vknots: np.ndarray, vals: np.ndarray
) -> np.ndarray:
    s2 = 0.5 * (xs[:, None] + ys[None, :])
    v = antiderivative_values_numpy(s2.ravel(), breaks, vknots, vals).reshape(s2.shape)
    sgn = np.sign(xs[:, None] - ys[None, :])
    return 0.5j * (v * sgn)


if USING_NUMBA:
    # the piecewise lookups are written out inline in each loop: a call to a
    # shared jitted helper costs more than the lookup itself at these sizes

    @njit(cache=True)
    def potential_values_numba(x, breaks, vals):
        k = breaks.shape[0]
        out = np.empty(x.shape[0])
        for n in range(x.shape[0]):
            xn = x[n]
            v = vals[k]
            for i in range(k):
                if xn == breaks[i]:
                    v = 0.5 * (vals[i] + vals[i + 1])
                    break
                if xn < breaks[i]:
                    v = vals[i]
                    break
            out[n] = v
        return out

    @njit(cache=True)
    def antiderivative_values_numba(x, breaks, vknots, vals):
        k = breaks.shape[0]
        out = np.empty(x.shape[0])
        for n in range(x.shape[0]):
            xn = x[n]
            if xn < breaks[0]:
                out[n] = vknots[0] + vals[0] * (xn - breaks[0])
            else:
                i = k - 1
                for j in range(1, k):
                    if xn < breaks[j]:
                        i = j - 1
                        break
                out[n] = vknots[i] + vals[i + 1] * (xn - breaks[i])
        return out

    @njit(cache=True)
    def q1_matrix_numba(xs, ys, breaks, vknots, vals):
        k = breaks.shape[0]
        out = np.empty((xs.shape[0], ys.shape[0]), dtype=np.complex128)
        for i in range(xs.shape[0]):
            for j in range(ys.shape[0]):
                t = xs[i] - ys[j]
                sgn = 0.0
                if t > 0.0:
                    sgn = 1.0
                elif t < 0.0:
                    sgn = -1.0
                x = 0.5 * (xs[i] + ys[j])
                if x < breaks[0]:
                    v = vknots[0] + vals[0] * (x - breaks[0])
                else:
                    m = k - 1
                    for n in range(1, k):
                        if x < breaks[n]:
                            m = n - 1
                            break
                    v = vknots[m] + vals[m + 1] * (x - breaks[m])
                out[i, j] = 0.5j * (v * sgn)
        return out

    potential_values = potential_values_numba
    antiderivative_values = antiderivative_values_numba
    q1_matrix = q1_matrix_numba
else:
    potential_values = potential_values_numpy
    antiderivative_values = antiderivative_values_numpy
    q1_matrix = q1_matrix_numpy


def warmup() -> None:
    """Force one compilation of every jitted kernel (no-op on the numpy path)."""
    breaks = np.array([-1.0, 0.0, 1.0])
    vals = np.array([0.0, 1.0, -1.0, 0.0])
    vknots = np.array([-1.0, 0.0, -1.0])
    xs = np.array([-0.5, 0.5])
    potential_values(xs, breaks, vals)
    antiderivative_values(xs, breaks, vknots, vals)
    q1_matrix(xs, xs, breaks, vknots, vals)
