"""Shared test fixtures: random matrix generators and the 3x3 reference
instance whose minimizer and fixed point are known in closed form."""

import numpy as np

from sparsedm import SaddlePoint, symmetrize


def example2_h() -> np.ndarray:
    """3x3 instance with two known minimizers, both of objective value 2."""
    return np.array([[1.0, 0.0, 0.0], [0.0, 2.0, 2.0], [0.0, 2.0, 2.0]])


def example2_saddle() -> SaddlePoint:
    """Hand-checked fixed point of the iteration on example2_h at mu=1, N=1."""
    p = np.diag([1.0, 0.0, 0.0])
    b = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, -1.0], [0.0, -1.0, 1.0]])
    d = np.array([[0.0, 0.0, 0.0], [0.0, -1.0, -1.0], [0.0, -1.0, -1.0]])
    return SaddlePoint(P=p, Q=p.copy(), R=p.copy(), b=b, d=d)


def random_symmetric(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    return symmetrize(scale * rng.standard_normal((n, n)))


def random_feasible(rng: np.random.Generator, n: int, n_occ: int) -> np.ndarray:
    """Random matrix with orthonormal eigenvectors, eigenvalues in [0, 1]
    water-filled so that the trace equals n_occ."""
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    f = rng.random(n)
    lo, hi = -1.0, 1.0
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if np.clip(f + mid, 0.0, 1.0).sum() < n_occ:
            lo = mid
        else:
            hi = mid
    f = np.clip(f + 0.5 * (lo + hi), 0.0, 1.0)
    return symmetrize((q * f) @ q.T)


def gapped_hamiltonian(
    rng: np.random.Generator, n: int, n_occ: int, gap: float = 0.5
) -> np.ndarray:
    """Random symmetric matrix whose spectrum jumps by at least `gap`
    between the n_occ-th and (n_occ+1)-th eigenvalues."""
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    w = np.sort(2.0 * rng.standard_normal(n))
    need = gap - (w[n_occ] - w[n_occ - 1])
    if need > 0:
        w[n_occ:] += need
    return symmetrize((q * w) @ q.T)
