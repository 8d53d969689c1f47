"""Ansatz constraint systems: soundness of the catalog and rejection of
off-catalog coefficients."""
import dataclasses

import numpy as np
import pytest

from fourblock.core import FourVector
from fourblock.verifier import (
    VARIANT_TAGS,
    ansatz_residual,
    build_member,
    families_of_variant,
    family_coefficients,
    solution_distance,
    summary_table,
    variant,
    verify_all,
    verify_constraint_system,
    verify_solution_table,
)


def test_variant_registry():
    assert len(VARIANT_TAGS) == 14
    assert families_of_variant("Ik") == (
        "K1", "K2", "K3", "K4", "K5", "K5P", "K6", "K7")
    assert families_of_variant("In") == ("N1", "N2", "N3", "N4")
    assert families_of_variant("IIln") == ("LN1", "LN2")
    # every ansatz family belongs to exactly one variant
    seen = [fid for tag in VARIANT_TAGS for fid in families_of_variant(tag)]
    assert len(seen) == 44
    assert len(set(seen)) == 44


def test_variant_partitions_parameters():
    v = variant("IIkm")
    assert set(v.independent) | set(v.dependent) == {"k", "m", "l", "n"}
    assert set(v.independent) == {"k", "m"}
    with pytest.raises(ValueError, match="unknown ansatz variant"):
        variant("IIxy")


def test_k3_coefficients_satisfy_system():
    tag, coeffs = family_coefficients("K3", {"D": 1.5})
    assert tag == "Ik"
    assert coeffs == {"A": 0.0, "alpha": 0.0, "B": 0.0, "beta": 0.0,
                      "D": 1.5, "t": 1.5}
    assert verify_constraint_system(tag, coeffs, trials=50, seed=3)


def test_k5_coefficients_satisfy_system():
    tag, coeffs = family_coefficients("K5", {"A": 1.0, "D": 1.0})
    assert coeffs["B"] == 1.0 and coeffs["beta"] == 1.0
    assert verify_constraint_system(tag, coeffs, trials=50, seed=3)


def test_m1_all_zero_coefficients_satisfy_system():
    tag, coeffs = family_coefficients("M1", {})
    assert tag == "Im"
    assert set(coeffs.values()) == {0.0}
    assert verify_constraint_system(tag, coeffs, trials=50, seed=3)


def test_kmn2_coefficients_satisfy_system():
    tag, coeffs = family_coefficients("KMN2", {})
    assert (tag, coeffs) == ("IIIkmn", {"A": -1.0, "B": 1.0, "C": 1.0,
                                        "alpha": -1.0, "beta": 1.0, "s": 1.0})
    assert verify_constraint_system(tag, coeffs, trials=50, seed=3)


def test_non_solutions_fail():
    zero = {"A": 0.0, "alpha": 0.0, "B": 0.0, "beta": 0.0, "D": 0.0, "t": 0.0}
    assert not verify_constraint_system("Ik", {**zero, "A": 1.0}, trials=20, seed=3)
    assert not verify_constraint_system("Ik", {**zero, "B": 2.0, "beta": 4.0},
                                        trials=20, seed=3)


def test_residual_pinpoints_broken_relation():
    # A=1 with alpha=0 breaks the n relation (starting with the n0 line)
    # while the m and l relations keep holding
    coeffs = {"A": 1.0, "alpha": 0.0, "B": 0.0, "beta": 0.0, "D": 0.0, "t": 0.0}
    rng = np.random.default_rng(8)
    draw = lambda: FourVector.from_array(rng.uniform(-2.0, 2.0, 4))
    p = build_member("Ik", coeffs, {"k": draw()})
    q = build_member("Ik", coeffs, {"k": draw()})
    res = ansatz_residual("Ik", coeffs, p, q)
    assert res.shape == (12,)
    assert abs(res[0]) > 1e-6  # n0 component
    assert np.max(np.abs(res[4:])) <= 1e-12


def test_coefficient_name_mismatch():
    with pytest.raises(ValueError, match="coefficient"):
        verify_constraint_system("Ik", {"A": 1.0}, trials=5)
    with pytest.raises(ValueError, match="scalars"):
        family_coefficients("K3", {"Q": 1.0})


def test_solution_table_for_one_variant():
    checks = verify_solution_table("In", samples=50, tol=1e-9, seed=42)
    assert [c.family for c in checks] == ["N1", "N2", "N3", "N4"]
    assert all(c.verdict == "pass" for c in checks)
    assert all(c.max_residual <= 1e-9 for c in checks)
    assert all(c.variant == "In" for c in checks)


def test_solution_table_is_deterministic():
    a = verify_solution_table("IIln", samples=30, seed=7)
    b = verify_solution_table("IIln", samples=30, seed=7)
    assert a == b


def test_verify_all_covers_catalog():
    checks = verify_all(samples=10, seed=5)
    assert len(checks) == 60
    assert sum(1 for c in checks if c.variant == "R3") == 16
    assert all(c.verdict == "pass" for c in checks)


def test_solution_distance_separates_catalog_from_noise():
    tag, coeffs = family_coefficients("K3", {"D": 1.5})
    assert solution_distance(tag, coeffs) < 1e-6
    noise = {"A": 1.0, "alpha": 0.3, "B": -0.7, "beta": 0.9, "D": 0.4, "t": -1.2}
    assert solution_distance("Ik", noise) > 1e-2


def test_summary_table_layout():
    checks = verify_solution_table("IIln", samples=10, seed=1)
    text = summary_table(checks)
    lines = text.splitlines()
    assert lines[0].split() == ["variant", "family", "samples",
                                "max", "residual", "verdict"]
    assert len(lines) == 2 + len(checks)
    assert "LN1" in text and "pass" in text


def test_reports_are_frozen():
    check = verify_solution_table("IIln", samples=5, seed=1)[0]
    with pytest.raises(dataclasses.FrozenInstanceError):
        check.verdict = "fail"
