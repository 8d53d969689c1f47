"""Classify an arbitrary real 4x4 matrix against the family catalog."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import det_direct, numerical_rank
from .families import FAMILY_IDS, FamilyParams, membership_residual

__all__ = ["FamilyMatch", "ClassificationReport", "classify", "report_to_dict"]


@dataclass(frozen=True)
class FamilyMatch:
    family: str
    residual: float
    fitted: Optional[FamilyParams]


@dataclass(frozen=True)
class ClassificationReport:
    rank: int
    det: float
    tol: float
    matches: tuple[FamilyMatch, ...]


def classify(g: np.ndarray, tol: float = 1e-9,
             rank_tol: Optional[float] = None) -> ClassificationReport:
    """Report rank, determinant, and every family with residual <= tol.

    Matches are sorted by ascending residual; ties keep catalog order.  The
    catalog entries overlap, so one matrix routinely matches several families.
    """
    if tol <= 0.0:
        raise ValueError(f"tol must be positive, got {tol}")
    g = np.asarray(g, dtype=float)
    if g.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {g.shape}")
    matches = []
    for index, fid in enumerate(FAMILY_IDS):
        residual, fitted = membership_residual(fid, g, tol)
        if residual <= tol:
            matches.append((residual, index, FamilyMatch(fid, residual, fitted)))
    matches.sort(key=lambda item: (item[0], item[1]))
    return ClassificationReport(
        rank=numerical_rank(g, rank_tol if rank_tol is not None else tol),
        det=det_direct(g),
        tol=tol,
        matches=tuple(m for _, _, m in matches),
    )


def report_to_dict(report: ClassificationReport) -> dict:
    '''JSON-ready form: fitted carries the scalar map, or null when unidentifiable.'''
    return {
        "rank": report.rank,
        "det": report.det,
        "tol": report.tol,
        "matches": [
            {
                "family": m.family,
                "residual": m.residual,
                "fitted": dict(m.fitted.scalars) if m.fitted is not None else None,
            }
            for m in report.matches
        ],
    }
