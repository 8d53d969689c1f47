"""Core calculus for real 4x4 matrices in 2x2 block form.

A matrix G is split into blocks [[K, N], [L, M]] and every block is expanded
over the identity and the Pauli matrices.  The second expansion coefficient is
stored as the real number x2im with the convention x2 = i*x2im, which makes
all sixteen matrix entries real:

    X = [[x0 + x3,   x1 + x2im],
         [x1 - x2im, x0 - x3 ]]

Products, the quadratic form, and the closed-form determinant below all work
directly on the (k, m, l, n) coefficients.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

__all__ = [
    "FourVector",
    "ParamSet",
    "ImaginaryResidueError",
    "block2",
    "block2_to_fourvector",
    "params_to_matrix",
    "matrix_to_params",
    "multiply_blockwise",
    "multiply_componentwise",
    "minkowski_form",
    "det_paper",
    "det_direct",
    "numerical_rank",
]


class ImaginaryResidueError(ArithmeticError):
    """A quantity that must come out real carried a non-negligible imaginary part."""


@dataclass(frozen=True)
class FourVector:
    """Block coefficients (a0, a1, a2im, a3); the encoded a2 equals i*a2im."""

    a0: float = 0.0
    a1: float = 0.0
    a2im: float = 0.0
    a3: float = 0.0

    @classmethod
    def from_array(cls, values: Iterable[float]) -> "FourVector":
        a0, a1, a2im, a3 = (float(v) for v in values)
        return cls(a0, a1, a2im, a3)

    def as_array(self) -> np.ndarray:
        return np.array([self.a0, self.a1, self.a2im, self.a3], dtype=float)

    def complex_vector(self) -> np.ndarray:
        '''Spatial part (a1, i*a2im, a3) as a complex 3-vector.'''
        return np.array([self.a1, 1j * self.a2im, self.a3], dtype=complex)


@dataclass(frozen=True)
class ParamSet:
    """The four block four-vectors of a matrix, in the order (k, m, l, n)."""

    k: FourVector
    m: FourVector
    l: FourVector
    n: FourVector

    @classmethod
    def from_arrays(cls, k, m, l, n) -> "ParamSet":
        return cls(FourVector.from_array(k), FourVector.from_array(m),
                   FourVector.from_array(l), FourVector.from_array(n))


def block2(x: FourVector) -> np.ndarray:
    '''2x2 block x0*I + x.sigma under the real encoding.'''
    return np.array([
        [x.a0 + x.a3, x.a1 + x.a2im],
        [x.a1 - x.a2im, x.a0 - x.a3],
    ])


def block2_to_fourvector(b: np.ndarray) -> FourVector:
    b = np.asarray(b, dtype=float)
    if b.shape != (2, 2):
        raise ValueError(f"expected a 2x2 block, got shape {b.shape}")
    return FourVector(
        (b[0, 0] + b[1, 1]) / 2.0,
        (b[0, 1] + b[1, 0]) / 2.0,
        (b[0, 1] - b[1, 0]) / 2.0,
        (b[0, 0] - b[1, 1]) / 2.0,
    )


def params_to_matrix(p: ParamSet) -> np.ndarray:
    g = np.empty((4, 4))
    g[0:2, 0:2] = block2(p.k)
    g[0:2, 2:4] = block2(p.n)
    g[2:4, 0:2] = block2(p.l)
    g[2:4, 2:4] = block2(p.m)
    return g


def matrix_to_params(g: np.ndarray) -> ParamSet:
    '''Inverse of params_to_matrix; exact for every real 4x4 matrix.'''
    g = np.asarray(g, dtype=float)
    if g.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {g.shape}")
    return ParamSet(
        k=block2_to_fourvector(g[0:2, 0:2]),
        m=block2_to_fourvector(g[2:4, 2:4]),
        l=block2_to_fourvector(g[2:4, 0:2]),
        n=block2_to_fourvector(g[0:2, 2:4]),
    )


def multiply_blockwise(p: ParamSet, q: ParamSet) -> ParamSet:
    """Product parameters of G_p @ G_q via the 2x2 block products."""
    kp, np_, lp, mp = block2(p.k), block2(p.n), block2(p.l), block2(p.m)
    kq, nq, lq, mq = block2(q.k), block2(q.n), block2(q.l), block2(q.m)
    return ParamSet(
        k=block2_to_fourvector(kp @ kq + np_ @ lq),
        m=block2_to_fourvector(lp @ nq + mp @ mq),
        l=block2_to_fourvector(lp @ kq + mp @ lq),
        n=block2_to_fourvector(kp @ nq + np_ @ mq),
    )


def _recombine(scalar: complex, vec: np.ndarray) -> FourVector:
    # vec components 0 and 2 are real, component 1 purely imaginary; the
    # mixed products below never leak across, so taking parts is exact
    return FourVector(scalar.real, vec[0].real, vec[1].imag, vec[2].real)


def multiply_componentwise(p: ParamSet, q: ParamSet) -> ParamSet:
    """Product parameters of G_p @ G_q from the componentwise law.

    p supplies the left (primed) factor.  The law couples the scalar parts,
    the complex dot products, and i times the cross products of the four
    complex 3-vectors of each factor.
    """
    k1, m1, l1, n1 = (p.k.complex_vector(), p.m.complex_vector(),
                      p.l.complex_vector(), p.n.complex_vector())
    k2, m2, l2, n2 = (q.k.complex_vector(), q.m.complex_vector(),
                      q.l.complex_vector(), q.n.complex_vector())
    k01, m01, l01, n01 = p.k.a0, p.m.a0, p.l.a0, p.n.a0
    k02, m02, l02, n02 = q.k.a0, q.m.a0, q.l.a0, q.n.a0

    k0 = k01 * k02 + k1 @ k2 + n01 * l02 + n1 @ l2
    m0 = m01 * m02 + m1 @ m2 + l01 * n02 + l1 @ n2
    n0 = k01 * n02 + k1 @ n2 + n01 * m02 + n1 @ m2
    l0 = l01 * k02 + l1 @ k2 + m01 * l02 + m1 @ l2

    kv = (k01 * k2 + k1 * k02 + 1j * np.cross(k1, k2)
          + n01 * l2 + n1 * l02 + 1j * np.cross(n1, l2))
    mv = (m01 * m2 + m1 * m02 + 1j * np.cross(m1, m2)
          + l01 * n2 + l1 * n02 + 1j * np.cross(l1, n2))
    nv = (k01 * n2 + k1 * n02 + 1j * np.cross(k1, n2)
          + n01 * m2 + n1 * m02 + 1j * np.cross(n1, m2))
    lv = (l01 * k2 + l1 * k02 + 1j * np.cross(l1, k2)
          + m01 * l2 + m1 * l02 + 1j * np.cross(m1, l2))

    return ParamSet(
        k=_recombine(k0, kv),
        m=_recombine(m0, mv),
        l=_recombine(l0, lv),
        n=_recombine(n0, nv),
    )


def minkowski_form(a: FourVector, b: FourVector) -> float:
    '''(ab) = a0*b0 - a.b under the encoding; real for real coefficients.'''
    return a.a0 * b.a0 - a.a1 * b.a1 + a.a2im * b.a2im - a.a3 * b.a3


def det_paper(p: ParamSet, imag_tol: float = 1e-10) -> float:
    """Closed-form determinant from the (k, m, l, n) coefficients.

    Raises ImaginaryResidueError if the complex evaluation leaves a relative
    imaginary residue above imag_tol; that signals inconsistent input rather
    than something to truncate away.
    """
    k, m, l, n = p.k, p.m, p.l, p.n
    kc, mc, lc, nc = (k.complex_vector(), m.complex_vector(),
                      l.complex_vector(), n.complex_vector())
    w1 = -k.a0 * nc + n.a0 * kc + 1j * np.cross(kc, nc)
    w2 = -m.a0 * lc + l.a0 * mc + 1j * np.cross(mc, lc)
    val = (minkowski_form(k, k) * minkowski_form(m, m)
           + minkowski_form(n, n) * minkowski_form(l, l)
           - 2.0 * minkowski_form(k, n) * minkowski_form(m, l)
           - 2.0 * complex(w1 @ w2))
    if abs(val.imag) > imag_tol * max(1.0, abs(val.real)):
        raise ImaginaryResidueError(
            f"determinant evaluation left imaginary residue {val.imag!r}")
    return val.real


def det_direct(g: np.ndarray) -> float:
    '''Determinant straight from the matrix entries, used to cross-check det_paper.'''
    g = np.asarray(g, dtype=float)
    if g.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {g.shape}")
    return float(np.linalg.det(g))


def numerical_rank(g: np.ndarray, tol: float = 1e-9) -> int:
    """Rank by Gaussian elimination with full pivoting.

    A pivot counts while its absolute value exceeds tol times the largest
    absolute entry of the input matrix.
    """
    if tol <= 0.0:
        raise ValueError(f"tol must be positive, got {tol}")
    a = np.array(g, dtype=float)
    if a.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {a.shape}")
    scale = np.max(np.abs(a)) if a.size else 0.0
    if scale == 0.0:
        return 0
    threshold = tol * scale
    rank = 0
    rows, cols = a.shape
    while rank < min(rows, cols):
        sub = np.abs(a[rank:, rank:])
        i, j = np.unravel_index(np.argmax(sub), sub.shape)
        if sub[i, j] <= threshold:
            break
        a[[rank, rank + i], :] = a[[rank + i, rank], :]
        a[:, [rank, rank + j]] = a[:, [rank + j, rank]]
        pivot = a[rank, rank]
        below = a[rank + 1:, rank] / pivot
        a[rank + 1:, rank:] -= np.outer(below, a[rank, rank:])
        rank += 1
    return rank
