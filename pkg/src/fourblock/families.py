"""Catalog of multiplicatively closed families of degenerate 4x4 matrices.

Each ansatz family fixes some of the four block four-vectors as scalar
combinations of the free ones; holding the scalars fixed, the family is a
linear subspace of matrix space that is closed under matrix multiplication.
The sixteen R3 families instead zero one row and one column.

The grid encoding used below writes every 2x2 block position as a list of
terms (symbol, c0, c1), meaning the block receives c0*x0*I + c1*(x.sigma)
from the free four-vector x named by the symbol.  Plain proportional blocks
have c0 == c1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

import numpy as np

from .core import (
    FourVector,
    ParamSet,
    matrix_to_params,
    minkowski_form,
    numerical_rank,
    params_to_matrix,
)

__all__ = [
    "FamilyParams",
    "FamilyDescriptor",
    "ClosureReport",
    "RankReport",
    "FAMILY_IDS",
    "catalog",
    "descriptor",
    "construct",
    "membership_residual",
    "closure_check",
    "claimed_rank_check",
    "random_scalars",
    "random_member",
]

_MIN_SCALAR = 1e-12
_GENERIC_DET = 1e-6


@dataclass
class FamilyParams:
    """Free parameters of one family member.

    Ansatz families take `scalars` (named coefficients) and `blocks` (named
    free four-vectors).  R3 families take a full `matrix` whose designated
    row and column get zeroed.
    """

    scalars: Mapping[str, float] = field(default_factory=dict)
    blocks: Mapping[str, FourVector] = field(default_factory=dict)
    matrix: Optional[np.ndarray] = None


@dataclass(frozen=True)
class FamilyDescriptor:
    id: str
    block_formula: str
    free_scalars: tuple[str, ...]
    nonzero_scalars: frozenset[str]
    free_blocks: tuple[str, ...]
    claimed_rank: str
    closure: str
    paper_anchor: str
    rank_note: Optional[str] = None

    def as_dict(self) -> dict:
        return {
            "id": self.id,
            "block_formula": self.block_formula,
            "free_scalars": [
                {"name": s, "domain": "nonzero" if s in self.nonzero_scalars else "real"}
                for s in self.free_scalars
            ],
            "claimed_rank": self.claimed_rank,
            "closure": self.closure,
            "paper_anchor": self.paper_anchor,
        }


@dataclass(frozen=True)
class ClosureReport:
    family: str
    samples: int
    max_product_residual: float
    product_param_drift: float
    verdict: str


@dataclass(frozen=True)
class RankReport:
    family: str
    samples: int
    claimed: int
    measured: tuple[int, ...]
    verdict: str
    special_case: Optional[str] = None


_TL, _TR, _BL, _BR = (0, 0), (0, 1), (1, 0), (1, 1)


@dataclass(frozen=True)
class _Structure:
    scalars: tuple[str, ...]
    nonzero: frozenset[str]
    blocks: tuple[str, ...]
    grid: Callable[..., dict]
    # name of the scalar fitted by golden-section (enters through an inverse)
    inverse_scalar: Optional[str] = None


def _s(name, c):
    return (name, c, c)


_STRUCTURES: dict[str, _Structure] = {
    "K1": _Structure((), frozenset(), ("k",), lambda: {_TL: [_s("k", 1)]}),
    "K2": _Structure((), frozenset(), ("k",), lambda: {
        _TL: [_s("k", 1)], _BR: [_s("k", 1)]}),
    "K3": _Structure(("D",), frozenset(), ("k",), lambda D: {
        _TL: [_s("k", 1)], _BL: [_s("k", D)]}),
    "K4": _Structure(("A",), frozenset(), ("k",), lambda A: {
        _TL: [_s("k", 1)], _TR: [_s("k", A)]}),
    "K5": _Structure(("A", "D"), frozenset(), ("k",), lambda A, D: {
        _TL: [_s("k", 1)], _TR: [_s("k", A)],
        _BL: [_s("k", D)], _BR: [_s("k", A * D)]}),
    "K5P": _Structure(("A",), frozenset({"A"}), ("k",), lambda A: {
        _TL: [_s("k", 1)], _TR: [_s("k", A)],
        _BL: [_s("k", -1 / A)], _BR: [_s("k", -1)]},
        inverse_scalar="A"),
    "K6": _Structure(("A", "t"), frozenset({"A"}), ("k",), lambda A, t: {
        _TL: [_s("k", 1)], _TR: [_s("k", A)],
        _BL: [("k", t, -1 / A)], _BR: [("k", A * t, -1)]},
        inverse_scalar="A"),
    "K7": _Structure(("A", "alpha"), frozenset({"A"}), ("k",), lambda A, alpha: {
        _TL: [_s("k", 1)], _TR: [("k", alpha, A)],
        _BL: [_s("k", -1 / A)], _BR: [("k", -alpha / A, -1)]},
        inverse_scalar="A"),
    "M1": _Structure((), frozenset(), ("m",), lambda: {_BR: [_s("m", 1)]}),
    "M2": _Structure((), frozenset(), ("m",), lambda: {
        _TL: [_s("m", 1)], _BR: [_s("m", 1)]}),
    "M3": _Structure(("D",), frozenset(), ("m",), lambda D: {
        _BL: [_s("m", D)], _BR: [_s("m", 1)]}),
    "M4": _Structure(("A",), frozenset(), ("m",), lambda A: {
        _TR: [_s("m", A)], _BR: [_s("m", 1)]}),
    "M5": _Structure(("A", "t"), frozenset({"A"}), ("m",), lambda A, t: {
        _TL: [("m", A * t, -1)], _TR: [_s("m", A)],
        _BL: [("m", t, -1 / A)], _BR: [_s("m", 1)]},
        inverse_scalar="A"),
    "M6": _Structure(("A", "alpha"), frozenset({"A"}), ("m",), lambda A, alpha: {
        _TL: [("m", -alpha / A, -1)], _TR: [("m", alpha, A)],
        _BL: [_s("m", -1 / A)], _BR: [_s("m", 1)]},
        inverse_scalar="A"),
    "M7": _Structure(("A", "D"), frozenset({"A", "D"}), ("m",), lambda A, D: {
        _TL: [_s("m", A * D)], _TR: [_s("m", A)],
        _BL: [_s("m", D)], _BR: [_s("m", 1)]}),
    "N1": _Structure(("A",), frozenset(), ("n",), lambda A: {
        _TL: [_s("n", A)], _TR: [_s("n", 1)]}),
    "N2": _Structure(("A",), frozenset(), ("n",), lambda A: {
        _TL: [_s("n", A)], _TR: [_s("n", 1)],
        _BL: [_s("n", A * A)], _BR: [_s("n", A)]}),
    "N3": _Structure(("A", "alpha"), frozenset(), ("n",), lambda A, alpha: {
        _TL: [("n", alpha, A)], _TR: [_s("n", 1)],
        _BL: [("n", -alpha * A, -A * A)], _BR: [_s("n", -A)]}),
    "N4": _Structure(("A", "beta"), frozenset(), ("n",), lambda A, beta: {
        _TL: [_s("n", A)], _TR: [_s("n", 1)],
        _BL: [("n", beta * A, -A * A)], _BR: [("n", beta, -A)]}),
    "L1": _Structure(("A",), frozenset(), ("l",), lambda A: {
        _TL: [_s("l", A)], _BL: [_s("l", 1)]}),
    "L2": _Structure(("A",), frozenset(), ("l",), lambda A: {
        _TL: [_s("l", A)], _TR: [_s("l", A * A)],
        _BL: [_s("l", 1)], _BR: [_s("l", A)]}),
    "L3": _Structure(("A", "alpha"), frozenset(), ("l",), lambda A, alpha: {
        _TL: [("l", alpha, A)], _TR: [("l", -alpha * A, -A * A)],
        _BL: [_s("l", 1)], _BR: [_s("l", -A)]}),
    "L4": _Structure(("A", "beta"), frozenset(), ("l",), lambda A, beta: {
        _TL: [_s("l", A)], _TR: [("l", beta * A, -A * A)],
        _BL: [_s("l", 1)], _BR: [("l", beta, -A)]}),
    "KM1": _Structure((), frozenset(), ("k", "m"), lambda: {
        _TL: [_s("k", 1)], _BR: [_s("m", 1)]}),
    "KM2": _Structure(("D",), frozenset(), ("k", "m"), lambda D: {
        _TL: [_s("k", 1)], _BL: [_s("m", D), _s("k", -D)], _BR: [_s("m", 1)]}),
    "KM3": _Structure(("B",), frozenset({"B"}), ("k", "m"), lambda B: {
        _TL: [_s("k", 1)], _TR: [_s("m", B)],
        _BL: [_s("k", 1 / B)], _BR: [_s("m", 1)]},
        inverse_scalar="B"),
    "KM4": _Structure(("A",), frozenset(), ("k", "m"), lambda A: {
        _TL: [_s("k", 1)], _TR: [_s("k", A), _s("m", -A)], _BR: [_s("m", 1)]}),
    "KM5": _Structure(("A", "C"), frozenset(), ("k", "m"), lambda A, C: {
        _TL: [_s("k", 1)], _TR: [_s("k", A), _s("m", -A)],
        _BL: [_s("k", C), _s("m", -C)], _BR: [_s("m", 1)]}),
    "LN1": _Structure(("A",), frozenset({"A"}), ("l", "n"), lambda A: {
        _TL: [_s("l", A)], _TR: [_s("n", 1)],
        _BL: [_s("l", 1)], _BR: [_s("n", 1 / A)]},
        inverse_scalar="A"),
    "LN2": _Structure(("B",), frozenset({"B"}), ("l", "n"), lambda B: {
        _TL: [_s("n", B)], _TR: [_s("n", 1)],
        _BL: [_s("l", 1)], _BR: [_s("l", 1 / B)]},
        inverse_scalar="B"),
    "KL1": _Structure(("A",), frozenset(), ("k", "l"), lambda A: {
        _TL: [_s("k", 1)], _TR: [_s("k", A)],
        _BL: [_s("l", 1)], _BR: [_s("l", A)]}),
    "KL2": _Structure((), frozenset(), ("k", "l"), lambda: {
        _TL: [_s("k", 1)], _TR: [_s("l", 1)],
        _BL: [_s("l", 1)], _BR: [_s("k", 1), _s("l", 1)]}),
    "NM1": _Structure(("A",), frozenset(), ("n", "m"), lambda A: {
        _TL: [_s("n", A)], _TR: [_s("n", 1)],
        _BL: [_s("m", A)], _BR: [_s("m", 1)]}),
    "NM2": _Structure((), frozenset(), ("n", "m"), lambda: {
        _TL: [_s("m", 1), _s("n", 1)], _TR: [_s("n", 1)],
        _BL: [_s("n", 1)], _BR: [_s("m", 1)]}),
    "KN1": _Structure(("A",), frozenset(), ("k", "n"), lambda A: {
        _TL: [_s("k", 1)], _TR: [_s("n", 1)],
        _BL: [_s("k", A)], _BR: [_s("n", A)]}),
    "KN2": _Structure((), frozenset(), ("k", "n"), lambda: {
        _TL: [_s("k", 1)], _TR: [_s("n", 1)], _BR: [_s("k", 1)]}),
    "ML1": _Structure(("A",), frozenset(), ("m", "l"), lambda A: {
        _TL: [_s("l", A)], _TR: [_s("m", A)],
        _BL: [_s("l", 1)], _BR: [_s("m", 1)]}),
    "ML2": _Structure((), frozenset(), ("m", "l"), lambda: {
        _TL: [_s("m", 1)], _BL: [_s("l", 1)], _BR: [_s("m", 1)]}),
    "KMN1": _Structure((), frozenset(), ("k", "m", "n"), lambda: {
        _TL: [_s("k", 1)], _TR: [_s("n", 1)], _BR: [_s("m", 1)]}),
    "KMN2": _Structure((), frozenset(), ("k", "m", "n"), lambda: {
        _TL: [_s("k", 1)], _TR: [_s("n", 1)],
        _BL: [_s("k", -1), _s("m", 1), _s("n", 1)], _BR: [_s("m", 1)]}),
    "KML1": _Structure((), frozenset(), ("k", "m", "l"), lambda: {
        _TL: [_s("k", 1)], _BL: [_s("l", 1)], _BR: [_s("m", 1)]}),
    "KML2": _Structure((), frozenset(), ("k", "m", "l"), lambda: {
        _TL: [_s("k", 1)], _TR: [_s("k", 1), _s("m", -1), _s("l", 1)],
        _BL: [_s("l", 1)], _BR: [_s("m", 1)]}),
    "NLK1": _Structure(("A",), frozenset({"A"}), ("k", "n", "l"), lambda A: {
        _TL: [_s("k", 1)], _TR: [_s("n", 1)], _BL: [_s("l", 1)],
        _BR: [_s("k", 1), _s("n", A), _s("l", -1 / A)]},
        inverse_scalar="A"),
    "NLM1": _Structure(("A",), frozenset({"A"}), ("m", "n", "l"), lambda A: {
        _TL: [_s("m", 1), _s("l", A), _s("n", -1 / A)],
        _TR: [_s("n", 1)], _BL: [_s("l", 1)], _BR: [_s("m", 1)]},
        inverse_scalar="A"),
}

_R3_IDS = tuple(f"R3_{i}{j}" for i in range(4) for j in range(4))

FAMILY_IDS = tuple(_STRUCTURES) + _R3_IDS

_FORMULAS = {
    "K1": "[[K, 0], [0, 0]]",
    "K2": "[[K, 0], [0, K]]",
    "K3": "[[K, 0], [D*K, 0]]",
    "K4": "[[K, A*K], [0, 0]]",
    "K5": "[[K, A*K], [D*K, A*D*K]]",
    "K5P": "[[K, A*K], [-(1/A)*K, -K]]",
    "K6": "[[K, A*K], [t*k0*I - (1/A)*k.sigma, A*t*k0*I - k.sigma]]",
    "K7": "[[K, alpha*k0*I + A*k.sigma], [-(1/A)*K, -(alpha/A)*k0*I - k.sigma]]",
    "M1": "[[0, 0], [0, M]]",
    "M2": "[[M, 0], [0, M]]",
    "M3": "[[0, 0], [D*M, M]]",
    "M4": "[[0, A*M], [0, M]]",
    "M5": "[[A*t*m0*I - m.sigma, A*M], [t*m0*I - (1/A)*m.sigma, M]]",
    "M6": "[[-(alpha/A)*m0*I - m.sigma, alpha*m0*I + A*m.sigma], [-(1/A)*M, M]]",
    "M7": "[[A*D*M, A*M], [D*M, M]]",
    "N1": "[[A*N, N], [0, 0]]",
    "N2": "[[A*N, N], [A^2*N, A*N]]",
    "N3": "[[alpha*n0*I + A*n.sigma, N], [-A*(alpha*n0*I + A*n.sigma), -A*N]]",
    "N4": "[[A*N, N], [A*(beta*n0*I - A*n.sigma), beta*n0*I - A*n.sigma]]",
    "L1": "[[A*L, 0], [L, 0]]",
    "L2": "[[A*L, A^2*L], [L, A*L]]",
    "L3": "[[alpha*l0*I + A*l.sigma, -A*(alpha*l0*I + A*l.sigma)], [L, -A*L]]",
    "L4": "[[A*L, A*(beta*l0*I - A*l.sigma)], [L, beta*l0*I - A*l.sigma]]",
    "KM1": "[[K, 0], [0, M]]",
    "KM2": "[[K, 0], [D*(M - K), M]]",
    "KM3": "[[K, B*M], [(1/B)*K, M]]",
    "KM4": "[[K, A*(K - M)], [0, M]]",
    "KM5": "[[K, A*(K - M)], [C*(K - M), M]]",
    "LN1": "[[A*L, N], [L, (1/A)*N]]",
    "LN2": "[[B*N, N], [L, (1/B)*L]]",
    "KL1": "[[K, A*K], [L, A*L]]",
    "KL2": "[[K, L], [L, K + L]]",
    "NM1": "[[A*N, N], [A*M, M]]",
    "NM2": "[[M + N, N], [N, M]]",
    "KN1": "[[K, N], [A*K, A*N]]",
    "KN2": "[[K, N], [0, K]]",
    "ML1": "[[A*L, A*M], [L, M]]",
    "ML2": "[[M, 0], [L, M]]",
    "KMN1": "[[K, N], [0, M]]",
    "KMN2": "[[K, N], [-K + M + N, M]]",
    "KML1": "[[K, 0], [L, M]]",
    "KML2": "[[K, K - M + L], [L, M]]",
    "NLK1": "[[K, N], [L, K + A*N - (1/A)*L]]",
    "NLM1": "[[M + A*L - (1/A)*N, N], [L, M]]",
}

_ANCHORS = {
    "K1": "(B3.3x)", "K2": "(B3.4c)", "K3": "(B3.5c)", "K4": "(B3.6c)",
    "K5": "(B3.12a)", "K5P": "(B3.12c)", "K6": "(B3.13a)", "K7": "(B3.14c)",
    "M1": "(B4.4)", "M2": "(B4.7)", "M3": "(B4.8cx)", "M4": "(B4.9c)",
    "M5": "(B4.14b)", "M6": "(B4.14c)", "M7": "(B4.15b)",
    "N1": "(B5.7)", "N2": "(B5.8)", "N3": "(B5.10)", "N4": "(B5.11)",
    "L1": "(B6.6)", "L2": "(B6.7)", "L3": "(B6.8)", "L4": "(B6.9)",
    "KM1": "(B7.8b)", "KM2": "(B7.14d)", "KM3": "(B7.15c)",
    "KM4": "(B7.17c)", "KM5": "(B7.23b)",
    "LN1": "(B8.10c)", "LN2": "(B8.12c)",
    "KL1": "(B9.9a)", "KL2": "(B9.10a)",
    "NM1": "(B10.2)", "NM2": "(B10.3)",
    "KN1": "(B11.7b)", "KN2": "(B11.8a)",
    "ML1": "(B12.2)", "ML2": "(B12.3)",
    "KMN1": "(B13.5)", "KMN2": "(B13.6a)",
    "KML1": "(B13.7a)", "KML2": "(B13.7b)",
    "NLK1": "(B14.3b)", "NLM1": "(B14.5)",
}

_RANK4 = {"K2", "M2", "KM1", "KM2", "KM4", "KM5", "KL2", "NM2", "KN2",
          "ML2", "KMN1", "KMN2", "KML1", "KML2", "NLK1", "NLM1"}

_RANK_NOTES = {
    "K5": "source display (B3.12a) states rank 4; generic members measure rank 2",
    "KMN1": "source text near (B13.5) states rank 2; generic members measure rank 4",
    "KMN2": "source text near (B13.6a) states rank 2; generic members measure rank 4",
}

_CLOSURE = {"K2": "group", "M2": "group", "KM5": "group", "K5P": "null-product"}


def _descriptors() -> dict[str, FamilyDescriptor]:
    out = {}
    for fid, st in _STRUCTURES.items():
        out[fid] = FamilyDescriptor(
            id=fid,
            block_formula=_FORMULAS[fid],
            free_scalars=st.scalars,
            nonzero_scalars=st.nonzero,
            free_blocks=st.blocks,
            claimed_rank=f"generic {4 if fid in _RANK4 else 2}",
            closure=_CLOSURE.get(fid, "semigroup"),
            paper_anchor=_ANCHORS[fid],
            rank_note=_RANK_NOTES.get(fid),
        )
    for fid in _R3_IDS:
        i, j = int(fid[3]), int(fid[4])
        out[fid] = FamilyDescriptor(
            id=fid,
            block_formula=f"all G with row {i} = 0 and column {j} = 0",
            free_scalars=(),
            nonzero_scalars=frozenset(),
            free_blocks=(),
            claimed_rank="generic 3",
            closure="semigroup",
            paper_anchor=f"section 14 variant ({i}{j})",
        )
    return out


_DESCRIPTORS = _descriptors()


def catalog() -> list[FamilyDescriptor]:
    '''All 60 family descriptors, ansatz families first, then R3_00..R3_33.'''
    return [_DESCRIPTORS[fid] for fid in FAMILY_IDS]


def descriptor(fid: str) -> FamilyDescriptor:
    try:
        return _DESCRIPTORS[fid]
    except KeyError:
        raise ValueError(f"unknown family id {fid!r}") from None


def _r3_indices(fid: str) -> tuple[int, int]:
    return int(fid[3]), int(fid[4])


def _mixed_block(x: np.ndarray, c0: float, c1: float) -> np.ndarray:
    # c0*x0*I + c1*(x.sigma) under the real encoding
    return np.array([
        [c0 * x[0] + c1 * x[3], c1 * (x[1] + x[2])],
        [c1 * (x[1] - x[2]), c0 * x[0] - c1 * x[3]],
    ])


def _assemble(grid: dict, vectors: Mapping[str, np.ndarray]) -> np.ndarray:
    g = np.zeros((4, 4))
    for (r, c), terms in grid.items():
        b = np.zeros((2, 2))
        for sym, c0, c1 in terms:
            b += _mixed_block(vectors[sym], c0, c1)
        g[2 * r:2 * r + 2, 2 * c:2 * c + 2] = b
    return g


def _check_scalars(fid: str, st: _Structure, scalars: Mapping[str, float]) -> dict:
    given = dict(scalars)
    if set(given) != set(st.scalars):
        raise ValueError(
            f"family {fid} takes scalars {list(st.scalars)}, got {sorted(given)}")
    for name in st.nonzero:
        if abs(given[name]) < _MIN_SCALAR:
            raise ValueError(f"family {fid} needs {name} != 0, got {given[name]!r}")
    return {n: float(given[n]) for n in st.scalars}


def construct(fid: str, params: FamilyParams) -> ParamSet:
    """Build a family member; errors on wrong arity or out-of-domain scalars."""
    descriptor(fid)
    if fid.startswith("R3_"):
        if params.matrix is None:
            raise ValueError(f"family {fid} takes a full 4x4 matrix")
        if params.scalars or params.blocks:
            raise ValueError(f"family {fid} takes no scalars or blocks")
        g = np.array(params.matrix, dtype=float)
        if g.shape != (4, 4):
            raise ValueError(f"expected a 4x4 matrix, got shape {g.shape}")
        i, j = _r3_indices(fid)
        g[i, :] = 0.0
        g[:, j] = 0.0
        return matrix_to_params(g)
    st = _STRUCTURES[fid]
    if params.matrix is not None:
        raise ValueError(f"family {fid} takes scalars and blocks, not a matrix")
    scalars = _check_scalars(fid, st, params.scalars)
    if set(params.blocks) != set(st.blocks):
        raise ValueError(
            f"family {fid} takes free blocks {list(st.blocks)}, got {sorted(params.blocks)}")
    vectors = {sym: params.blocks[sym].as_array() for sym in st.blocks}
    return matrix_to_params(_assemble(st.grid(**scalars), vectors))


def _design_matrix(st: _Structure, scalars: Mapping[str, float]) -> np.ndarray:
    """16 x (4 * nblocks) design whose columns span the family at fixed scalars."""
    grid = st.grid(**scalars)
    design = np.zeros((16, 4 * len(st.blocks)))
    first_col = {sym: 4 * i for i, sym in enumerate(st.blocks)}
    for (r, c), terms in grid.items():
        base = 8 * r + 2 * c
        i00, i01, i10, i11 = base, base + 1, base + 4, base + 5
        for sym, c0, c1 in terms:
            j = first_col[sym]
            design[i00, j] += c0
            design[i11, j] += c0
            design[i01, j + 1] += c1
            design[i10, j + 1] += c1
            design[i01, j + 2] += c1
            design[i10, j + 2] -= c1
            design[i00, j + 3] += c1
            design[i11, j + 3] -= c1
    return design


def _projection(st: _Structure, scalars: Mapping[str, float], g: np.ndarray):
    """Distance from g to the family's linear span at fixed scalars."""
    design = _design_matrix(st, scalars)
    gvec = g.ravel()
    gram = design.T @ design
    rhs = design.T @ gvec
    try:
        coef = np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError:
        coef, *_ = np.linalg.lstsq(design, gvec, rcond=None)
    defect = float(np.linalg.norm(design @ coef - gvec))
    return defect / max(1.0, float(np.linalg.norm(gvec))), coef


def _residual_at(fid: str, g: np.ndarray, scalars: Mapping[str, float]) -> float:
    if fid.startswith("R3_"):
        return _r3_residual(fid, g)[0]
    st = _STRUCTURES[fid]
    for name in st.nonzero:
        if abs(scalars[name]) < _MIN_SCALAR:
            return math.inf
    return _projection(st, scalars, g)[0]


def _r3_residual(fid: str, g: np.ndarray):
    i, j = _r3_indices(fid)
    proj = np.array(g, dtype=float)
    proj[i, :] = 0.0
    proj[:, j] = 0.0
    defect = float(np.linalg.norm(g - proj))
    return defect / max(1.0, float(np.linalg.norm(g))), proj


def _ratio(num: np.ndarray, den: np.ndarray):
    weight = float(den @ den)
    if weight < 1e-18:
        return 0.0, False
    return float(num @ den) / weight, True


def _seed_scalars(fid: str, p: ParamSet):
    """Per-family linear sub-fit for the scalars.

    Returns (candidate scalar dicts, identifiable).  The first candidate is
    the primary estimate; extra candidates come from redundant relations.
    """
    K, M, L, N = (p.k.as_array(), p.m.as_array(), p.l.as_array(), p.n.as_array())

    def scalar_ratio(num, den):
        if abs(den) < 1e-12:
            return 0.0, False
        return num / den, True

    if fid in ("K3",):
        v, ok = _ratio(L, K)
        return [{"D": v}], ok
    if fid in ("K4",):
        v, ok = _ratio(N, K)
        return [{"A": v}], ok
    if fid == "K5":
        a, oka = _ratio(N, K)
        d, okd = _ratio(L, K)
        return [{"A": a, "D": d}], oka and okd
    if fid == "K5P":
        a1, ok1 = _ratio(N, K)
        a2, ok2 = _ratio(-K, L)
        cands = [{"A": a1}] if ok1 else []
        if ok2:
            cands.append({"A": a2})
        return cands or [{"A": 1.0}], ok1 or ok2
    if fid == "K6":
        a, oka = _ratio(N, K)
        t, okt = scalar_ratio(L[0], K[0])
        return [{"A": a or 1.0, "t": t}], oka and okt
    if fid == "K7":
        a, oka = _ratio(N[1:], K[1:])
        if not oka:
            a, oka = _ratio(-K, L)
        al, okal = scalar_ratio(N[0], K[0])
        return [{"A": a or 1.0, "alpha": al}], oka and okal
    if fid == "M3":
        v, ok = _ratio(L, M)
        return [{"D": v}], ok
    if fid == "M4":
        v, ok = _ratio(N, M)
        return [{"A": v}], ok
    if fid == "M5":
        a, oka = _ratio(N, M)
        t, okt = scalar_ratio(L[0], M[0])
        return [{"A": a or 1.0, "t": t}], oka and okt
    if fid == "M6":
        a, oka = _ratio(N[1:], M[1:])
        if not oka:
            a, oka = _ratio(-M, L)
        al, okal = scalar_ratio(N[0], M[0])
        return [{"A": a or 1.0, "alpha": al}], oka and okal
    if fid == "M7":
        a, oka = _ratio(N, M)
        d, okd = _ratio(L, M)
        return [{"A": a or 1.0, "D": d or 1.0}], oka and okd
    if fid in ("N1", "N2"):
        v, ok = _ratio(K, N)
        return [{"A": v}], ok
    if fid == "N3":
        a, oka = _ratio(K[1:], N[1:])
        al, okal = scalar_ratio(K[0], N[0])
        return [{"A": a, "alpha": al}], oka and okal
    if fid == "N4":
        a, oka = _ratio(K, N)
        be, okb = scalar_ratio(M[0], N[0])
        return [{"A": a, "beta": be}], oka and okb
    if fid in ("L1", "L2"):
        v, ok = _ratio(K, L)
        return [{"A": v}], ok
    if fid == "L3":
        a, oka = _ratio(K[1:], L[1:])
        al, okal = scalar_ratio(K[0], L[0])
        return [{"A": a, "alpha": al}], oka and okal
    if fid == "L4":
        a, oka = _ratio(K, L)
        be, okb = scalar_ratio(M[0], L[0])
        return [{"A": a, "beta": be}], oka and okb
    if fid == "KM2":
        v, ok = _ratio(L, M - K)
        return [{"D": v}], ok
    if fid == "KM3":
        b1, ok1 = _ratio(N, M)
        b2, ok2 = _ratio(K, L)
        cands = [{"B": b1}] if ok1 else []
        if ok2:
            cands.append({"B": b2})
        return cands or [{"B": 1.0}], ok1 or ok2
    if fid == "KM4":
        v, ok = _ratio(N, K - M)
        return [{"A": v}], ok
    if fid == "KM5":
        a, oka = _ratio(N, K - M)
        c, okc = _ratio(L, K - M)
        return [{"A": a, "C": c}], oka and okc
    if fid == "LN1":
        a1, ok1 = _ratio(K, L)
        a2, ok2 = _ratio(N, M)
        cands = [{"A": a1}] if ok1 else []
        if ok2:
            cands.append({"A": a2})
        return cands or [{"A": 1.0}], ok1 or ok2
    if fid == "LN2":
        b1, ok1 = _ratio(K, N)
        b2, ok2 = _ratio(L, M)
        cands = [{"B": b1}] if ok1 else []
        if ok2:
            cands.append({"B": b2})
        return cands or [{"B": 1.0}], ok1 or ok2
    if fid == "KL1":
        v, ok = _ratio(np.concatenate([N, M]), np.concatenate([K, L]))
        return [{"A": v}], ok
    if fid == "NM1":
        v, ok = _ratio(np.concatenate([K, L]), np.concatenate([N, M]))
        return [{"A": v}], ok
    if fid == "KN1":
        v, ok = _ratio(np.concatenate([L, M]), np.concatenate([K, N]))
        return [{"A": v}], ok
    if fid == "ML1":
        v, ok = _ratio(np.concatenate([K, N]), np.concatenate([L, M]))
        return [{"A": v}], ok
    if fid == "NLK1":
        # M-position block is K + A*N - (1/A)*L; solve the two-term fit
        r = M - K
        a, inv, ok = _two_term_fit(r, N, L)
        cands = [{"A": a}] if ok and abs(a) > _MIN_SCALAR else []
        if ok and abs(inv) > _MIN_SCALAR:
            cands.append({"A": -1.0 / inv})
        return cands or [{"A": 1.0}], bool(cands)
    if fid == "NLM1":
        r = K - M
        a, inv, ok = _two_term_fit(r, L, N)
        cands = [{"A": a}] if ok and abs(a) > _MIN_SCALAR else []
        if ok and abs(inv) > _MIN_SCALAR:
            cands.append({"A": -1.0 / inv})
        return cands or [{"A": 1.0}], bool(cands)
    return [{}], True


def _two_term_fit(target: np.ndarray, u: np.ndarray, v: np.ndarray):
    basis = np.stack([u, v], axis=1)
    if np.linalg.norm(basis) < 1e-12:
        return 1.0, 0.0, False
    coef, *_ = np.linalg.lstsq(basis, target, rcond=None)
    return float(coef[0]), float(coef[1]), True


def _golden_refine(objective, x0: float, evals: int = 14):
    """Coarse scan plus golden-section around the best cell; tracks the best seen."""
    span = 1.0 + abs(x0)
    lo, hi = x0 - span, x0 + span
    grid = np.linspace(lo, hi, 7)
    seen = [(objective(x), x) for x in grid]
    seen.append((objective(x0), x0))
    seen.sort(key=lambda p: p[0])
    center = seen[0][1]
    step = (hi - lo) / 6.0
    a, b = center - step, center + step
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - phi * (b - a)
    d = a + phi * (b - a)
    fc, fd = objective(c), objective(d)
    best = min(seen[0], (fc, c), (fd, d))
    for _ in range(evals):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = objective(c)
            best = min(best, (fc, c))
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = objective(d)
            best = min(best, (fd, d))
    return best[1], best[0]


def membership_residual(fid: str, g: np.ndarray, tol: float = 1e-9):
    """Best-fit distance from g to the family, over free scalars and blocks.

    Returns (residual, fitted FamilyParams or None).  residual is the
    Frobenius defect of the best reconstruction divided by max(1, ||g||_F).
    fitted is None when some scalar is unidentifiable from g (the residual is
    still the best value found).
    """
    if tol <= 0.0:
        raise ValueError(f"tol must be positive, got {tol}")
    descriptor(fid)
    g = np.asarray(g, dtype=float)
    if g.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {g.shape}")
    if fid.startswith("R3_"):
        residual, proj = _r3_residual(fid, g)
        return residual, FamilyParams(matrix=proj)
    st = _STRUCTURES[fid]
    p = matrix_to_params(g)
    candidates, identifiable = _seed_scalars(fid, p)

    best = (math.inf, None)
    for cand in candidates:
        r = _residual_at(fid, g, cand)
        if r < best[0]:
            best = (r, dict(cand))
    scalars = best[1] if best[1] is not None else dict(candidates[0])

    if st.inverse_scalar is not None and best[0] > 1e-12:
        name = st.inverse_scalar

        def objective(x: float) -> float:
            trial = dict(scalars)
            trial[name] = x
            return _residual_at(fid, g, trial)

        x, r = _golden_refine(objective, scalars[name])
        if r < best[0]:
            scalars = dict(scalars)
            scalars[name] = x
            best = (r, scalars)

    residual = best[0]
    if not math.isfinite(residual):
        residual = _residual_at(fid, g, {n: 1.0 for n in st.scalars})
        scalars = {n: 1.0 for n in st.scalars}
        identifiable = False
    _, coef = _projection(st, scalars, g)
    blocks = {
        sym: FourVector.from_array(coef[4 * i:4 * i + 4])
        for i, sym in enumerate(st.blocks)
    }
    if not identifiable:
        return residual, None
    return residual, FamilyParams(scalars=scalars, blocks=blocks)


def random_scalars(fid: str, rng: np.random.Generator) -> dict:
    '''Scalar draw in [-2,2]; nonzero-domain scalars stay at least 0.25 from 0.'''
    st = _STRUCTURES[fid]
    out = {}
    for name in st.scalars:
        value = float(rng.uniform(-2.0, 2.0))
        while name in st.nonzero and abs(value) < 0.25:
            value = float(rng.uniform(-2.0, 2.0))
        out[name] = value
    return out


def _generic_fourvector(rng: np.random.Generator) -> FourVector:
    while True:
        x = FourVector.from_array(rng.uniform(-2.0, 2.0, 4))
        if abs(minkowski_form(x, x)) >= _GENERIC_DET:
            return x


def random_member(fid: str, rng: np.random.Generator,
                  scalars: Optional[Mapping[str, float]] = None,
                  generic: bool = True) -> tuple[FamilyParams, ParamSet]:
    """Draw a random member; generic draws reject near-singular free blocks."""
    desc = descriptor(fid)
    if fid.startswith("R3_"):
        i, j = _r3_indices(fid)
        while True:
            g = rng.uniform(-2.0, 2.0, (4, 4))
            params = FamilyParams(matrix=g)
            member = construct(fid, params)
            if not generic:
                return params, member
            minor = np.delete(np.delete(params_to_matrix(member), i, axis=0), j, axis=1)
            if abs(np.linalg.det(minor)) >= _GENERIC_DET:
                return params, member
    st = _STRUCTURES[fid]
    draw = dict(scalars) if scalars is not None else random_scalars(fid, rng)
    if generic:
        blocks = {sym: _generic_fourvector(rng) for sym in st.blocks}
    else:
        blocks = {sym: FourVector.from_array(rng.uniform(-2.0, 2.0, 4))
                  for sym in st.blocks}
    params = FamilyParams(scalars=draw, blocks=blocks)
    member = construct(fid, params)
    if generic and descriptor(fid).claimed_rank == "generic 4":
        # full-rank families also reject draws with a near-zero determinant
        while abs(np.linalg.det(params_to_matrix(member))) < _GENERIC_DET:
            blocks = {sym: _generic_fourvector(rng) for sym in st.blocks}
            params = FamilyParams(scalars=draw, blocks=blocks)
            member = construct(fid, params)
    return params, member


def closure_check(fid: str, scalars: Optional[Mapping[str, float]] = None,
                  samples: int = 100, tol: float = 1e-9,
                  seed: int = 0) -> ClosureReport:
    """Multiply random member pairs (same fixed scalars) and measure how far
    the products fall from the family."""
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    descriptor(fid)
    rng = np.random.default_rng(seed)
    is_r3 = fid.startswith("R3_")
    if not is_r3:
        st = _STRUCTURES[fid]
        fixed = (_check_scalars(fid, st, scalars) if scalars is not None
                 else random_scalars(fid, rng))
    else:
        fixed = {}
        if scalars:
            raise ValueError(f"family {fid} takes no scalars")
    max_residual = 0.0
    max_drift = 0.0
    drift_known = True
    for _ in range(samples):
        _, p = random_member(fid, rng, scalars=fixed or None, generic=False)
        _, q = random_member(fid, rng, scalars=fixed or None, generic=False)
        product = params_to_matrix(p) @ params_to_matrix(q)
        max_residual = max(max_residual, _residual_at(fid, product, fixed))
        if fixed:
            _, refit = membership_residual(fid, product, tol)
            if refit is None:
                drift_known = False
            else:
                drift = max(abs(refit.scalars[name] - fixed[name]) for name in fixed)
                max_drift = max(max_drift, drift)
    if not drift_known:
        max_drift = math.nan
    verdict = "pass" if max_residual <= tol else "fail"
    return ClosureReport(family=fid, samples=samples,
                         max_product_residual=max_residual,
                         product_param_drift=max_drift, verdict=verdict)


def claimed_rank_check(fid: str, samples: int = 20, tol: float = 1e-9,
                       seed: int = 0) -> RankReport:
    """Numerical rank of random generic members against the catalog claim."""
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    desc = descriptor(fid)
    claimed = int(desc.claimed_rank.split()[-1])
    rng = np.random.default_rng(seed)
    measured = []
    for _ in range(samples):
        _, member = random_member(fid, rng, generic=True)
        measured.append(numerical_rank(params_to_matrix(member), tol))
    ok = all(r == claimed for r in measured)
    special = None
    if fid == "K1":
        # a K block with vanishing determinant drops the rank to 1
        k1, k2im, k3 = rng.uniform(1.0, 2.0), rng.uniform(0.0, 0.5), rng.uniform(1.0, 2.0)
        k0 = math.sqrt(k1 * k1 - k2im * k2im + k3 * k3)
        null_k = FourVector(k0, k1, k2im, k3)
        member = construct(fid, FamilyParams(blocks={"k": null_k}))
        r = numerical_rank(params_to_matrix(member), tol)
        ok = ok and r == 1
        special = f"det K = 0 member has rank {r}"
    return RankReport(family=fid, samples=samples, claimed=claimed,
                      measured=tuple(sorted(set(measured))),
                      verdict="pass" if ok else "fail", special_case=special)
