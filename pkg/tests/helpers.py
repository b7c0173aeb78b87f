"""Shared builders for test instances."""

import numpy as np

from pseudoherm import Operator, SplitHamiltonian


def random_diagonalizable(dim, rng, cond_cap=100.0, spread=5.0):
    """S diag(real) S^-1 with cond(S) <= cond_cap and separated eigenvalues."""
    while True:
        s = np.eye(dim) + 0.3 * rng.standard_normal((dim, dim)) + 0.15j * rng.standard_normal(
            (dim, dim)
        )
        if np.linalg.cond(s) <= cond_cap:
            break
    while True:
        eigs = np.sort(rng.uniform(-spread, spread, dim))
        if dim == 1 or np.diff(eigs).min() > 0.1:
            break
    h = s @ np.diag(eigs) @ np.linalg.inv(s)
    return Operator(h), eigs


def toy_2x2(theta=np.pi / 6):
    """Non-Hermitian 2x2 with spectrum {0, 2 cos(theta)} and swap parity."""
    a = np.exp(1j * theta)
    h = np.array([[a, 1.0], [1.0, np.conj(a)]])
    p = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    return Operator(h), Operator(p)


def fixed_split(dim, seed, parity=True, h1_scale=0.5):
    """Deterministic parity-structured split with well-separated H0 spectrum.

    Eigenvalue spacing ~1 keeps the Sylvester denominators O(1), so slope
    measurements on the residual curve are not polluted by conditioning.
    """
    rng = np.random.default_rng(seed)
    eigs = np.arange(1.0, dim + 1.0) + rng.uniform(-0.1, 0.1, dim)
    signs = np.ones(dim)
    signs[1::2] = -1.0
    same = (signs[:, None] * signs[None, :]) > 0
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    h0 = ((a + a.conj().T) / 2) * same * 0.2 + np.diag(eigs)
    b = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    h1 = ((b - b.conj().T) / 2) * (~same) * h1_scale
    if not parity:
        # drop the parity structure but keep the solvability projection
        e, u = np.linalg.eigh(h0)
        h1t = u.conj().T @ h1 @ u
        np.fill_diagonal(h1t, 0.0)
        h1 = u @ h1t @ u.conj().T
        h1 = (h1 - h1.conj().T) / 2
    return SplitHamiltonian(Operator(h0), Operator(h1), 0.1)


def commuting_gauge(split, rng, scale=0.5):
    """Random Hermitian term commuting with H0 (diagonal in its eigenbasis)."""
    _, u = np.linalg.eigh(split.H0.mat)
    d = rng.uniform(-scale, scale, split.dim)
    g = (u * d) @ u.conj().T
    return Operator((g + g.conj().T) / 2)
