"""Sample-level verification of the ansatz solution tables.

Each ansatz variant expresses some of the four block four-vectors linearly in
the remaining independent ones (separate coefficients for the scalar and the
spatial parts).  A coefficient assignment is a solution when the same linear
relations survive multiplication: members built with those coefficients
always multiply to another member.  The residual components are polynomials
of low degree in the free inputs, so checking random real points certifies
the identity up to measure zero (polynomial identity testing); off-table
coefficients fail loudly on generic input.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from .core import FourVector, ParamSet, multiply_blockwise, params_to_matrix
from .families import FAMILY_IDS, descriptor, random_member, random_scalars

__all__ = [
    "AnsatzVariant",
    "FamilyCheck",
    "VARIANT_TAGS",
    "variant",
    "families_of_variant",
    "family_coefficients",
    "build_member",
    "ansatz_residual",
    "verify_constraint_system",
    "verify_solution_table",
    "verify_all",
    "solution_distance",
    "summary_table",
]


@dataclass(frozen=True)
class AnsatzVariant:
    tag: str
    independent: tuple[str, ...]
    # rows: (dependent vector, ((vector coeff, source), ...), ((scalar coeff, source), ...))
    rows: tuple[tuple[str, tuple[tuple[str, str], ...], tuple[tuple[str, str], ...]], ...]

    @property
    def dependent(self) -> tuple[str, ...]:
        return tuple(r[0] for r in self.rows)

    @property
    def coefficient_names(self) -> tuple[str, ...]:
        names = []
        for _, vec_terms, scal_terms in self.rows:
            names.extend(c for c, _ in vec_terms)
            names.extend(c for c, _ in scal_terms)
        return tuple(names)


def _one(dep: str, vec: str, scal: str, src: str):
    return (dep, ((vec, src),), ((scal, src),))


def _two(dep: str, pairs: Sequence[tuple[str, str]], spairs: Sequence[tuple[str, str]]):
    return (dep, tuple(pairs), tuple(spairs))


_VARIANTS: dict[str, AnsatzVariant] = {}


def _register(tag: str, independent: tuple[str, ...], rows) -> None:
    _VARIANTS[tag] = AnsatzVariant(tag, independent, tuple(rows))


_register("Ik", ("k",), [
    _one("n", "A", "alpha", "k"),
    _one("m", "B", "beta", "k"),
    _one("l", "D", "t", "k"),
])
_register("Im", ("m",), [
    _one("n", "A", "alpha", "m"),
    _one("k", "B", "beta", "m"),
    _one("l", "D", "t", "m"),
])
_register("In", ("n",), [
    _one("k", "A", "alpha", "n"),
    _one("m", "B", "beta", "n"),
    _one("l", "D", "t", "n"),
])
_register("Il", ("l",), [
    _one("k", "A", "alpha", "l"),
    _one("m", "B", "beta", "l"),
    _one("n", "D", "t", "l"),
])
_register("IIkm", ("k", "m"), [
    _two("n", [("A", "k"), ("B", "m")], [("alpha", "k"), ("beta", "m")]),
    _two("l", [("C", "k"), ("D", "m")], [("s", "k"), ("t", "m")]),
])
_register("IIln", ("l", "n"), [
    _two("k", [("A", "l"), ("B", "n")], [("alpha", "l"), ("beta", "n")]),
    _two("m", [("D", "l"), ("C", "n")], [("t", "l"), ("s", "n")]),
])
_register("IIkl", ("k", "l"), [
    _two("n", [("A", "k"), ("B", "l")], [("alpha", "k"), ("beta", "l")]),
    _two("m", [("C", "k"), ("D", "l")], [("s", "k"), ("t", "l")]),
])
_register("IInm", ("n", "m"), [
    _two("l", [("A", "m"), ("B", "n")], [("alpha", "m"), ("beta", "n")]),
    _two("k", [("C", "m"), ("D", "n")], [("s", "m"), ("t", "n")]),
])
_register("IIkn", ("k", "n"), [
    _two("l", [("A", "k"), ("B", "n")], [("alpha", "k"), ("beta", "n")]),
    _two("m", [("C", "k"), ("D", "n")], [("s", "k"), ("t", "n")]),
])
_register("IIml", ("m", "l"), [
    _two("n", [("A", "m"), ("B", "l")], [("alpha", "m"), ("beta", "l")]),
    _two("k", [("C", "m"), ("D", "l")], [("s", "m"), ("t", "l")]),
])
_register("IIIkmn", ("k", "m", "n"), [
    _two("l", [("A", "k"), ("B", "m"), ("C", "n")],
         [("alpha", "k"), ("beta", "m"), ("s", "n")]),
])
_register("IIIkml", ("k", "m", "l"), [
    _two("n", [("A", "k"), ("B", "m"), ("C", "l")],
         [("alpha", "k"), ("beta", "m"), ("s", "l")]),
])
_register("IIInlk", ("n", "l", "k"), [
    _two("m", [("A", "n"), ("B", "l"), ("C", "k")],
         [("alpha", "n"), ("beta", "l"), ("s", "k")]),
])
_register("IIInlm", ("n", "l", "m"), [
    _two("k", [("A", "n"), ("B", "l"), ("C", "m")],
         [("alpha", "n"), ("beta", "l"), ("s", "m")]),
])

VARIANT_TAGS = tuple(_VARIANTS)

_VARIANT_FAMILIES = {
    "Ik": ("K1", "K2", "K3", "K4", "K5", "K5P", "K6", "K7"),
    "Im": ("M1", "M2", "M3", "M4", "M5", "M6", "M7"),
    "In": ("N1", "N2", "N3", "N4"),
    "Il": ("L1", "L2", "L3", "L4"),
    "IIkm": ("KM1", "KM2", "KM3", "KM4", "KM5"),
    "IIln": ("LN1", "LN2"),
    "IIkl": ("KL1", "KL2"),
    "IInm": ("NM1", "NM2"),
    "IIkn": ("KN1", "KN2"),
    "IIml": ("ML1", "ML2"),
    "IIIkmn": ("KMN1", "KMN2"),
    "IIIkml": ("KML1", "KML2"),
    "IIInlk": ("NLK1",),
    "IIInlm": ("NLM1",),
}


@dataclass(frozen=True)
class FamilyCheck:
    variant: str
    family: str
    samples: int
    max_residual: float
    verdict: str


def variant(tag: str) -> AnsatzVariant:
    try:
        return _VARIANTS[tag]
    except KeyError:
        raise ValueError(
            f"unknown ansatz variant {tag!r}; valid tags: {', '.join(VARIANT_TAGS)}"
        ) from None


def families_of_variant(tag: str) -> tuple[str, ...]:
    variant(tag)
    return _VARIANT_FAMILIES[tag]


def _check_coeffs(v: AnsatzVariant, coeffs: Mapping[str, float]) -> dict:
    expected = set(v.coefficient_names)
    if set(coeffs) != expected:
        raise ValueError(
            f"variant {v.tag} takes coefficients {sorted(expected)}, got {sorted(coeffs)}")
    return {name: float(coeffs[name]) for name in v.coefficient_names}


def build_member(tag: str, coeffs: Mapping[str, float],
                 independent: Mapping[str, FourVector]) -> ParamSet:
    """Assemble a ParamSet whose dependent four-vectors follow the ansatz."""
    v = variant(tag)
    c = _check_coeffs(v, coeffs)
    if set(independent) != set(v.independent):
        raise ValueError(
            f"variant {v.tag} takes independent vectors {list(v.independent)}, "
            f"got {sorted(independent)}")
    vectors = {name: independent[name].as_array() for name in v.independent}
    for dep, vec_terms, scal_terms in v.rows:
        value = np.zeros(4)
        for cname, src in vec_terms:
            value[1:] += c[cname] * vectors[src][1:]
        for cname, src in scal_terms:
            value[0] += c[cname] * vectors[src][0]
        vectors[dep] = value
    return ParamSet.from_arrays(vectors["k"], vectors["m"], vectors["l"], vectors["n"])


def ansatz_residual(tag: str, coeffs: Mapping[str, float],
                    p: ParamSet, q: ParamSet) -> np.ndarray:
    """Defect of the product of p and q against the ansatz relations.

    For each dependent four-vector the four entries are (scalar part, then
    the three vector components) of product value minus ansatz prediction.
    """
    v = variant(tag)
    c = _check_coeffs(v, coeffs)
    product = multiply_blockwise(p, q)
    vectors = {
        "k": product.k.as_array(), "m": product.m.as_array(),
        "l": product.l.as_array(), "n": product.n.as_array(),
    }
    out = np.empty(4 * len(v.rows))
    pos = 0
    for dep, vec_terms, scal_terms in v.rows:
        predicted = np.zeros(4)
        for cname, src in vec_terms:
            predicted[1:] += c[cname] * vectors[src][1:]
        for cname, src in scal_terms:
            predicted[0] += c[cname] * vectors[src][0]
        diff = vectors[dep] - predicted
        out[pos] = diff[0]
        out[pos + 1:pos + 4] = diff[1:]
        pos += 4
    return out


def _random_independent(v: AnsatzVariant, rng: np.random.Generator) -> dict:
    return {name: FourVector.from_array(rng.uniform(-2.0, 2.0, 4))
            for name in v.independent}


def verify_constraint_system(tag: str, coeffs: Mapping[str, float],
                             trials: int = 100, seed: int = 0,
                             tol: float = 1e-10) -> bool:
    """True iff the residual vanishes on `trials` random member pairs."""
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    v = variant(tag)
    c = _check_coeffs(v, coeffs)
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        p = build_member(tag, c, _random_independent(v, rng))
        q = build_member(tag, c, _random_independent(v, rng))
        if np.max(np.abs(ansatz_residual(tag, c, p, q))) > tol:
            return False
    return True


def family_coefficients(fid: str, scalars: Mapping[str, float]) -> tuple[str, dict]:
    """Map a catalog family with concrete scalars to its variant coefficients."""
    expected = set(descriptor(fid).free_scalars)
    if set(scalars) != expected:
        raise ValueError(
            f"family {fid} takes scalars {sorted(expected)}, got {sorted(scalars)}")
    A = scalars.get("A")
    B = scalars.get("B")
    C = scalars.get("C")
    D = scalars.get("D")
    alpha = scalars.get("alpha")
    beta = scalars.get("beta")
    t = scalars.get("t")
    z6 = {"A": 0.0, "alpha": 0.0, "B": 0.0, "beta": 0.0, "D": 0.0, "t": 0.0}
    z8 = {"A": 0.0, "B": 0.0, "C": 0.0, "D": 0.0,
          "alpha": 0.0, "beta": 0.0, "s": 0.0, "t": 0.0}

    def six(**kw):
        out = dict(z6)
        out.update(kw)
        return out

    def eight(**kw):
        out = dict(z8)
        out.update(kw)
        return out

    table = {
        "K1": lambda: ("Ik", six()),
        "K2": lambda: ("Ik", six(B=1.0, beta=1.0)),
        "K3": lambda: ("Ik", six(D=D, t=D)),
        "K4": lambda: ("Ik", six(A=A, alpha=A)),
        "K5": lambda: ("Ik", six(A=A, alpha=A, B=A * D, beta=A * D, D=D, t=D)),
        "K5P": lambda: ("Ik", six(A=A, alpha=A, B=-1.0, beta=-1.0, D=-1.0 / A, t=-1.0 / A)),
        "K6": lambda: ("Ik", six(A=A, alpha=A, B=-1.0, beta=A * t, D=-1.0 / A, t=t)),
        "K7": lambda: ("Ik", six(A=A, alpha=alpha, B=-1.0, beta=-alpha / A,
                                 D=-1.0 / A, t=-1.0 / A)),
        "M1": lambda: ("Im", six()),
        "M2": lambda: ("Im", six(B=1.0, beta=1.0)),
        "M3": lambda: ("Im", six(D=D, t=D)),
        "M4": lambda: ("Im", six(A=A, alpha=A)),
        "M5": lambda: ("Im", six(A=A, alpha=A, B=-1.0, beta=A * t, D=-1.0 / A, t=t)),
        "M6": lambda: ("Im", six(A=A, alpha=alpha, B=-1.0, beta=-alpha / A,
                                 D=-1.0 / A, t=-1.0 / A)),
        "M7": lambda: ("Im", six(A=A, alpha=A, B=A * D, beta=A * D, D=D, t=D)),
        "N1": lambda: ("In", six(A=A, alpha=A)),
        "N2": lambda: ("In", six(A=A, alpha=A, B=A, beta=A, D=A * A, t=A * A)),
        "N3": lambda: ("In", six(A=A, alpha=alpha, B=-A, beta=-A,
                                 D=-A * A, t=-alpha * A)),
        "N4": lambda: ("In", six(A=A, alpha=A, B=-A, beta=beta,
                                 D=-A * A, t=A * beta)),
        "L1": lambda: ("Il", six(A=A, alpha=A)),
        "L2": lambda: ("Il", six(A=A, alpha=A, B=A, beta=A, D=A * A, t=A * A)),
        "L3": lambda: ("Il", six(A=A, alpha=alpha, B=-A, beta=-A,
                                 D=-A * A, t=-alpha * A)),
        "L4": lambda: ("Il", six(A=A, alpha=A, B=-A, beta=beta,
                                 D=-A * A, t=A * beta)),
        "KM1": lambda: ("IIkm", eight()),
        "KM2": lambda: ("IIkm", eight(C=-D, D=D, s=-D, t=D)),
        "KM3": lambda: ("IIkm", eight(B=B, beta=B, C=1.0 / B, s=1.0 / B)),
        "KM4": lambda: ("IIkm", eight(A=A, B=-A, alpha=A, beta=-A)),
        "KM5": lambda: ("IIkm", eight(A=A, B=-A, alpha=A, beta=-A,
                                      C=C, D=-C, s=C, t=-C)),
        "LN1": lambda: ("IIln", eight(A=A, alpha=A, C=1.0 / A, s=1.0 / A)),
        "LN2": lambda: ("IIln", eight(B=B, beta=B, D=1.0 / B, t=1.0 / B)),
        "KL1": lambda: ("IIkl", eight(A=A, alpha=A, D=A, t=A)),
        "KL2": lambda: ("IIkl", eight(B=1.0, beta=1.0, C=1.0, s=1.0, D=1.0, t=1.0)),
        "NM1": lambda: ("IInm", eight(A=A, alpha=A, D=A, t=A)),
        "NM2": lambda: ("IInm", eight(B=1.0, beta=1.0, C=1.0, s=1.0, D=1.0, t=1.0)),
        "KN1": lambda: ("IIkn", eight(A=A, alpha=A, D=A, t=A)),
        "KN2": lambda: ("IIkn", eight(C=1.0, s=1.0)),
        "ML1": lambda: ("IIml", eight(A=A, alpha=A, D=A, t=A)),
        "ML2": lambda: ("IIml", eight(C=1.0, s=1.0)),
        "KMN1": lambda: ("IIIkmn", {"A": 0.0, "B": 0.0, "C": 0.0,
                                    "alpha": 0.0, "beta": 0.0, "s": 0.0}),
        "KMN2": lambda: ("IIIkmn", {"A": -1.0, "B": 1.0, "C": 1.0,
                                    "alpha": -1.0, "beta": 1.0, "s": 1.0}),
        "KML1": lambda: ("IIIkml", {"A": 0.0, "B": 0.0, "C": 0.0,
                                    "alpha": 0.0, "beta": 0.0, "s": 0.0}),
        "KML2": lambda: ("IIIkml", {"A": 1.0, "B": -1.0, "C": 1.0,
                                    "alpha": 1.0, "beta": -1.0, "s": 1.0}),
        "NLK1": lambda: ("IIInlk", {"A": A, "B": -1.0 / A, "C": 1.0,
                                    "alpha": A, "beta": -1.0 / A, "s": 1.0}),
        "NLM1": lambda: ("IIInlm", {"A": -1.0 / A, "B": A, "C": 1.0,
                                    "alpha": -1.0 / A, "beta": A, "s": 1.0}),
    }
    try:
        builder = table[fid]
    except KeyError:
        raise ValueError(f"family {fid!r} has no ansatz-variant coefficients") from None
    return builder()


def verify_solution_table(tag: str, samples: int = 100, tol: float = 1e-9,
                          seed: int = 0) -> list[FamilyCheck]:
    """Check every catalog family of this variant on random member pairs."""
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    v = variant(tag)
    rng = np.random.default_rng(seed)
    checks = []
    for fid in _VARIANT_FAMILIES[tag]:
        worst = 0.0
        for _ in range(samples):
            scalars = random_scalars(fid, rng)
            _, coeffs = family_coefficients(fid, scalars)
            p = build_member(tag, coeffs, _random_independent(v, rng))
            q = build_member(tag, coeffs, _random_independent(v, rng))
            worst = max(worst, float(np.max(np.abs(ansatz_residual(tag, coeffs, p, q)))))
        checks.append(FamilyCheck(
            variant=tag, family=fid, samples=samples, max_residual=worst,
            verdict="pass" if worst <= tol else "fail"))
    return checks


def _verify_r3(fid: str, samples: int, tol: float, seed: int) -> FamilyCheck:
    # closure-style check: products must keep row i and column j at zero
    i, j = int(fid[3]), int(fid[4])
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        _, p = random_member(fid, rng, generic=False)
        _, q = random_member(fid, rng, generic=False)
        product = params_to_matrix(p) @ params_to_matrix(q)
        worst = max(worst, float(np.max(np.abs(product[i, :]))),
                    float(np.max(np.abs(product[:, j]))))
    return FamilyCheck(variant="R3", family=fid, samples=samples,
                       max_residual=worst, verdict="pass" if worst <= tol else "fail")


def verify_all(samples: int = 100, tol: float = 1e-9, seed: int = 0) -> list[FamilyCheck]:
    """One check row per catalog family: 44 ansatz rows plus 16 R3 rows."""
    checks = []
    for tag in VARIANT_TAGS:
        checks.extend(verify_solution_table(tag, samples, tol, seed))
    for fid in FAMILY_IDS:
        if fid.startswith("R3_"):
            checks.append(_verify_r3(fid, samples, tol, seed))
    return checks


def solution_distance(tag: str, coeffs: Mapping[str, float]) -> float:
    """Euclidean distance from a coefficient vector to the nearest catalog
    solution of this variant, minimized over each family's free scalars."""
    v = variant(tag)
    c = _check_coeffs(v, coeffs)
    names = v.coefficient_names
    target = np.array([c[name] for name in names])

    def distance_at(fid: str, scalars: dict) -> float:
        try:
            _, sol = family_coefficients(fid, scalars)
        except ZeroDivisionError:
            return math.inf
        vec = np.array([sol[name] for name in names])
        if not np.all(np.isfinite(vec)):
            return math.inf
        return float(np.linalg.norm(vec - target))

    best = math.inf
    for fid in _VARIANT_FAMILIES[tag]:
        desc = descriptor(fid)
        free = desc.free_scalars
        if not free:
            best = min(best, distance_at(fid, {}))
            continue
        # coarse grid, then a coordinate golden-section pass per scalar
        grid = [float(x) for x in np.linspace(-3.0, 3.0, 13)]
        current = {name: 1.0 for name in free}
        for name in free:
            values = [(distance_at(fid, {**current, name: x}), x) for x in grid]
            current[name] = min(values)[1]
        for name in free:
            lo = current[name] - 0.6
            hi = current[name] + 0.6
            phi = (math.sqrt(5.0) - 1.0) / 2.0
            a, b = lo, hi
            x1 = b - phi * (b - a)
            x2 = a + phi * (b - a)
            f1 = distance_at(fid, {**current, name: x1})
            f2 = distance_at(fid, {**current, name: x2})
            for _ in range(30):
                if f1 < f2:
                    b, x2, f2 = x2, x1, f1
                    x1 = b - phi * (b - a)
                    f1 = distance_at(fid, {**current, name: x1})
                else:
                    a, x1, f1 = x1, x2, f2
                    x2 = a + phi * (b - a)
                    f2 = distance_at(fid, {**current, name: x2})
            current[name] = x1 if f1 < f2 else x2
        best = min(best, distance_at(fid, current))
    return best


def summary_table(checks: Sequence[FamilyCheck]) -> str:
    header = f"{'variant':<9}{'family':<8}{'samples':>8}{'max residual':>16}  verdict"
    lines = [header, "-" * len(header)]
    for chk in checks:
        lines.append(
            f"{chk.variant:<9}{chk.family:<8}{chk.samples:>8}"
            f"{chk.max_residual:>16.3e}  {chk.verdict}")
    return "\n".join(lines)
