"""Catalog classification of arbitrary 4x4 matrices."""
import numpy as np
import pytest

from fourblock.classifier import classify, report_to_dict
from fourblock.core import FourVector, params_to_matrix
from fourblock.families import FAMILY_IDS, FamilyParams, construct, random_member


def family_names(report):
    return [m.family for m in report.matches]


def test_identity_matrix():
    report = classify(np.eye(4))
    assert report.rank == 4
    assert report.det == pytest.approx(1.0, rel=1e-12)
    names = family_names(report)
    assert {"K2", "M2", "KM1", "KMN1", "KML1"} <= set(names)
    residuals = [m.residual for m in report.matches]
    assert residuals == sorted(residuals)
    assert all(r <= 1e-9 for r in residuals)


def test_matches_break_ties_in_catalog_order():
    report = classify(np.eye(4))
    positions = {fid: i for i, fid in enumerate(FAMILY_IDS)}
    matches = report.matches
    for a, b in zip(matches, matches[1:]):
        if a.residual == b.residual:
            assert positions[a.family] < positions[b.family]


def test_r3_member_classifies_to_its_variant():
    g = np.random.default_rng(1).uniform(-2.0, 2.0, (4, 4))
    member = construct("R3_00", FamilyParams(matrix=g))
    report = classify(params_to_matrix(member))
    assert report.rank == 3
    assert "R3_00" in family_names(report)


def test_fitted_scalars_come_back():
    params = FamilyParams(scalars={"B": 1.5},
                          blocks={"l": FourVector(0.7, -0.2, 0.4, 1.1),
                                  "n": FourVector(1.3, 0.6, -0.9, 0.1)})
    g = params_to_matrix(construct("LN2", params))
    report = classify(g)
    match = next(m for m in report.matches if m.family == "LN2")
    assert match.fitted is not None
    assert match.fitted.scalars["B"] == pytest.approx(1.5, abs=1e-9)


def test_k1_member_overlaps_nested_families():
    rng = np.random.default_rng(7)
    _, member = random_member("K1", rng)
    names = set(family_names(classify(params_to_matrix(member))))
    assert {"K1", "KM1", "KMN1", "KML1"} <= names


def test_generic_matrix_matches_nothing():
    g = np.array([
        [1.7, 0.3, -0.8, 2.2],
        [0.1, -1.9, 1.3, 0.4],
        [-0.6, 2.8, 0.9, -1.1],
        [1.2, -0.5, 0.7, 3.4],
    ])
    report = classify(g)
    assert report.matches == ()


def test_tightening_tolerance_shrinks_matches():
    rng = np.random.default_rng(13)
    _, member = random_member("KN1", rng)
    g = params_to_matrix(member) + 1e-7 * np.ones((4, 4))
    loose = set(family_names(classify(g, tol=1e-4)))
    tight = set(family_names(classify(g, tol=1e-9)))
    assert tight <= loose
    assert "KN1" in loose


def test_classify_is_deterministic():
    g = np.random.default_rng(21).uniform(-2.0, 2.0, (4, 4))
    a = classify(g)
    b = classify(g)
    assert a == b


def test_classify_input_validation():
    with pytest.raises(ValueError, match="tol"):
        classify(np.eye(4), tol=0.0)
    with pytest.raises(ValueError, match="4x4"):
        classify(np.eye(3))


def test_report_serialization():
    doc = report_to_dict(classify(np.eye(4)))
    assert set(doc) == {"rank", "det", "tol", "matches"}
    assert doc["rank"] == 4
    assert isinstance(doc["matches"], list)
    first = doc["matches"][0]
    assert set(first) == {"family", "residual", "fitted"}
    assert isinstance(first["family"], str)
