"""Mechanical checkers for the permanence/attractivity/chaos criteria.

Each checker tests its hypotheses on the transformation-class invariants
(interaction = B A, growth = B lam) plus invertibility of B, so verdicts
are identical across every system in a QMT class.  Inapplicability is a
verdict with a full hypothesis trace, never an error: the point of these
functions is diagnosis.

Strict inequalities are checked as ``value < -tol`` and non-strict ones
as ``value <= bound + tol`` with a shared documented tolerance; any
tested quantity within 10*tol of its boundary is flagged as a boundary
warning on the verdict.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import permutations

import numpy as np

from .errors import SearchBudgetExceeded, WrongDimension
from .systems import (
    DEFAULT_SIGN_TOL,
    MINUS,
    PLUS,
    QPSystem,
    pattern_string,
    sign_pattern,
)
from .transform import class_invariants, det_tolerance

#: Growth-rate thresholds above which the scalar factor map certifies
#: chaos (single source of truth; the scalar-map scans are compared
#: against these).
DIAMOND_RHO_THRESHOLD = 3.13
MAROTTO_RHO_THRESHOLD = 2.89

#: Largest dimension accepted by the hierarchical-ordering search.
HIERARCHICAL_SEARCH_MAX_N = 10

# 2x2 interaction patterns appearing in the theorem hypotheses.
COOPERATIVE_PATTERN = np.array([[MINUS, PLUS], [PLUS, MINUS]], dtype=np.int8)
COMPETITIVE_PATTERN = np.array([[MINUS, MINUS], [MINUS, MINUS]], dtype=np.int8)
PREDATOR_PREY_PATTERN = np.array([[MINUS, MINUS], [PLUS, MINUS]], dtype=np.int8)


class Conclusion(str, Enum):
    NOT_PERMANENT = "NotPermanent"
    PERMANENT = "Permanent"
    GLOBALLY_ATTRACTIVE = "GloballyAttractive"
    GLOBAL_ATTRACTOR_EXISTS = "GlobalAttractorExists"
    DISSIPATIVE = "Dissipative"
    CHAOTIC_DIAMOND = "ChaoticDiamond"
    CHAOTIC_MAROTTO = "ChaoticMarotto"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class HypothesisCheck:
    label: str
    passed: bool
    witness: dict

    def to_dict(self) -> dict:
        return {"hypothesis": self.label, "pass": self.passed,
                "witness": self.witness}


@dataclass(frozen=True)
class TheoremVerdict:
    """Outcome of one theorem check.

    ``applicable`` is true iff every hypothesis in the trace passed, and
    the conclusion is Inconclusive exactly when the verdict is not
    applicable.
    """

    theorem_id: str
    applicable: bool
    conclusion: Conclusion
    hypotheses: tuple[HypothesisCheck, ...]
    boundary_warnings: tuple[str, ...] = ()
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        assert self.applicable == all(h.passed for h in self.hypotheses)
        assert (self.conclusion != Conclusion.INCONCLUSIVE) == self.applicable

    def to_dict(self) -> dict:
        return {
            "theorem": self.theorem_id,
            "applicable": self.applicable,
            "conclusion": self.conclusion.value,
            "hypotheses": [h.to_dict() for h in self.hypotheses],
            "boundary_warnings": list(self.boundary_warnings),
            "notes": list(self.notes),
        }


@dataclass(frozen=True)
class HierarchicalOrderWitness:
    """An index rearrangement sigma with P[sigma][:, sigma] having a
    nonnegative upper triangle and strictly positive diagonal."""

    permutation: tuple[int, ...]

    def apply(self, P) -> np.ndarray:
        idx = np.asarray(self.permutation)
        return np.asarray(P, dtype=float)[np.ix_(idx, idx)]


def perp(v) -> np.ndarray:
    """Quarter-turn of a 2-vector: (v1, v2) -> (v2, -v1)."""
    v = np.asarray(v, dtype=float)
    if v.shape != (2,):
        raise WrongDimension(f"perp is defined for 2-vectors, got shape {v.shape}")
    return np.array([v[1], -v[0]])


# ---------------------------------------------------------------------------
# hypothesis-check helpers
# ---------------------------------------------------------------------------

def _j(value):
    """JSON-friendly copy of a witness value."""
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value


def _near(value, boundary, tol):
    return abs(value - boundary) <= 10.0 * tol


def _check_pattern(label, M, template, tol, warnings):
    M = np.asarray(M, dtype=float)
    pat = sign_pattern(M, tol)
    passed = bool(np.array_equal(pat, np.asarray(template, dtype=np.int8)))
    for value in np.atleast_1d(M).ravel():
        if _near(value, 0.0, tol):
            warnings.append(
                f"{label}: entry {value:.6g} within 10*tol of the sign boundary"
            )
    return HypothesisCheck(label, passed, {
        "values": _j(M),
        "pattern": pattern_string(pat),
        "required": pattern_string(template),
    })


def _check_le(label, value, bound, tol, warnings):
    value, bound = float(value), float(bound)
    passed = value <= bound + tol
    if _near(value, bound, tol):
        warnings.append(f"{label}: value {value:.6g} within 10*tol of bound {bound:g}")
    return HypothesisCheck(label, passed, {"value": value, "bound": bound})


def _check_lt(label, value, bound, tol, warnings):
    value, bound = float(value), float(bound)
    passed = value - bound < -tol
    if _near(value, bound, tol):
        warnings.append(f"{label}: value {value:.6g} within 10*tol of bound {bound:g}")
    return HypothesisCheck(label, passed, {"value": value, "bound": bound})


def _check_gt(label, value, bound, tol, warnings):
    value, bound = float(value), float(bound)
    passed = value - bound > tol
    if _near(value, bound, tol):
        warnings.append(f"{label}: value {value:.6g} within 10*tol of bound {bound:g}")
    return HypothesisCheck(label, passed, {"value": value, "bound": bound})


def _check_dimension(sys, warnings):
    return HypothesisCheck("n == 2", sys.n == 2, {"n": sys.n})


def _check_b_invertible(sys, warnings):
    det = float(np.linalg.det(sys.B))
    tol_det = det_tolerance(sys.B)
    if _near(abs(det), tol_det, tol_det):
        warnings.append(
            f"B invertibility: |det B| = {abs(det):.3e} close to the "
            f"singularity tolerance {tol_det:.3e}"
        )
    return HypothesisCheck("B invertible", abs(det) >= tol_det,
                           {"det_B": det, "tolerance": tol_det})


def _verdict(theorem_id, conclusion_if_applicable, checks, warnings, notes=()):
    applicable = all(c.passed for c in checks)
    return TheoremVerdict(
        theorem_id=theorem_id,
        applicable=applicable,
        conclusion=conclusion_if_applicable if applicable else Conclusion.INCONCLUSIVE,
        hypotheses=tuple(checks),
        boundary_warnings=tuple(warnings),
        notes=tuple(notes),
    )


# ---------------------------------------------------------------------------
# theorem checkers
# ---------------------------------------------------------------------------

def check_theorem1(sys: QPSystem, tol=DEFAULT_SIGN_TOL) -> TheoremVerdict:
    """Cooperative interaction invariant in dimension 2: not permanent."""
    warnings, checks = [], []
    checks.append(_check_dimension(sys, warnings))
    if not checks[-1].passed:
        return _verdict("T1", Conclusion.NOT_PERMANENT, checks, warnings)
    checks.append(_check_b_invertible(sys, warnings))
    inv = class_invariants(sys)
    checks.append(_check_pattern(
        "interaction invariant has cooperative pattern [-+ / +-]",
        inv.interaction, COOPERATIVE_PATTERN, tol, warnings))
    return _verdict("T1", Conclusion.NOT_PERMANENT, checks, warnings)


def _competitive_checks(sys, tol, warnings):
    """Shared hypotheses of the competitive permanence criterion."""
    checks = [_check_dimension(sys, warnings)]
    if not checks[-1].passed:
        return checks, None
    checks.append(_check_b_invertible(sys, warnings))
    inv = class_invariants(sys)
    checks.append(_check_pattern(
        "interaction invariant has competitive pattern [-- / --]",
        inv.interaction, COMPETITIVE_PATTERN, tol, warnings))
    checks.append(_check_pattern(
        "growth invariant has positive pattern (+, +)",
        inv.growth, np.array([PLUS, PLUS], dtype=np.int8), tol, warnings))
    cross = inv.interaction.T @ perp(inv.growth)
    checks.append(_check_pattern(
        "interaction^T . perp(growth) has pattern (-, +)",
        cross, np.array([MINUS, PLUS], dtype=np.int8), tol, warnings))
    return checks, inv


def check_theorem2(sys: QPSystem, tol=DEFAULT_SIGN_TOL) -> TheoremVerdict:
    """Competitive pattern + positive growth + cross condition: permanent."""
    warnings = []
    checks, _ = _competitive_checks(sys, tol, warnings)
    return _verdict("T2", Conclusion.PERMANENT, checks, warnings)


def check_theorem3(sys: QPSystem, tol=DEFAULT_SIGN_TOL) -> TheoremVerdict:
    """Permanence hypotheses plus growth components <= 1: the unique
    interior fixed point is globally asymptotically stable."""
    warnings = []
    checks, inv = _competitive_checks(sys, tol, warnings)
    if inv is not None:
        for i in range(2):
            checks.append(_check_le(
                f"growth invariant component {i + 1} <= 1",
                inv.growth[i], 1.0, tol, warnings))
    return _verdict("T3", Conclusion.GLOBALLY_ATTRACTIVE, checks, warnings)


def check_theorem4(sys: QPSystem, tol=DEFAULT_SIGN_TOL) -> TheoremVerdict:
    """Predator-prey pattern conditions: globally attractive fixed point."""
    warnings, notes, checks = [], [], []
    checks.append(_check_dimension(sys, warnings))
    if not checks[-1].passed:
        return _verdict("T4", Conclusion.GLOBALLY_ATTRACTIVE, checks, warnings)
    checks.append(_check_b_invertible(sys, warnings))
    inv = class_invariants(sys)
    G, L = inv.interaction, inv.growth
    checks.append(_check_pattern(
        "interaction invariant has predator-prey pattern [-- / +-]",
        G, PREDATOR_PREY_PATTERN, tol, warnings))
    checks.append(_check_pattern(
        "growth invariant has pattern (+, -)",
        L, np.array([PLUS, MINUS], dtype=np.int8), tol, warnings))
    checks.append(_check_le("growth component 1 <= 1", L[0], 1.0, tol, warnings))
    if abs(G[0, 0]) > tol:
        ratio = G[1, 0] / G[0, 0]
        lower, upper = L[0] * ratio, ratio + 1.0
        checks.append(_check_gt(
            "growth component 2 > growth1 * G21/G11",
            L[1], lower, tol, warnings))
        checks.append(_check_le(
            "growth component 2 <= G21/G11 + 1",
            L[1], upper, tol, warnings))
        if lower >= upper:
            notes.append(
                "the two-sided bound on growth component 2 is an empty "
                "interval for these parameters; hypotheses unsatisfiable"
            )
    else:
        checks.append(HypothesisCheck(
            "growth component 2 bounds (needs G11 != 0)", False,
            {"G11": float(G[0, 0]), "reason": "G11 within tolerance of zero"}))
    checks.append(_check_gt(
        "G11*G22 + G12*G21 > 0",
        G[0, 0] * G[1, 1] + G[0, 1] * G[1, 0], 0.0, tol, warnings))
    return _verdict("T4", Conclusion.GLOBALLY_ATTRACTIVE, checks, warnings, notes)


def check_theorem5(sys: QPSystem, tol=DEFAULT_SIGN_TOL) -> TheoremVerdict:
    """Hierarchically ordered negated interaction invariant: a global
    attractor exists, in any dimension."""
    warnings, checks = [], []
    checks.append(_check_b_invertible(sys, warnings))
    inv = class_invariants(sys)
    witness = is_hierarchically_ordered(-inv.interaction, tol)
    checks.append(HypothesisCheck(
        "-(interaction invariant) is hierarchically ordered",
        witness is not None,
        {"permutation": list(witness.permutation) if witness else None},
    ))
    notes = ("holds for any growth invariant; only the interaction "
             "invariant and invertibility of B enter",)
    return _verdict("T5", Conclusion.GLOBAL_ATTRACTOR_EXISTS, checks,
                    warnings, notes)


def check_theorem6(sys: QPSystem, tol=DEFAULT_SIGN_TOL) -> TheoremVerdict:
    """Theorem-5 hypotheses plus entrywise nonnegative B^-1: dissipative."""
    warnings, checks = [], []
    checks.append(_check_b_invertible(sys, warnings))
    inv = class_invariants(sys)
    witness = is_hierarchically_ordered(-inv.interaction, tol)
    checks.append(HypothesisCheck(
        "-(interaction invariant) is hierarchically ordered",
        witness is not None,
        {"permutation": list(witness.permutation) if witness else None},
    ))
    if checks[0].passed:
        B_inv = np.linalg.solve(sys.B, np.eye(sys.n))
        min_entry = float(np.min(B_inv))
        if _near(min_entry, 0.0, tol):
            warnings.append(
                f"B^-1 nonnegativity: smallest entry {min_entry:.6g} "
                f"within 10*tol of zero"
            )
        checks.append(HypothesisCheck(
            "B^-1 is entrywise nonnegative", min_entry >= -tol,
            {"B_inv": _j(B_inv), "min_entry": min_entry}))
    return _verdict("T6", Conclusion.DISSIPATIVE, checks, warnings)


def check_theorem7(sys: QPSystem, tol=DEFAULT_SIGN_TOL) -> TheoremVerdict:
    """Uniform positive growth invariant with dominated interaction:
    chaotic once the growth rate clears the factor-map thresholds."""
    warnings, notes, checks = [], [], []
    checks.append(_check_b_invertible(sys, warnings))
    inv = class_invariants(sys)
    G, L = inv.interaction, inv.growth
    ones = np.ones(sys.n)

    det = float(np.linalg.det(G))
    tol_det = det_tolerance(G)
    checks.append(HypothesisCheck(
        "interaction invariant invertible", abs(det) >= tol_det,
        {"det": det, "tolerance": tol_det}))
    if checks[-1].passed:
        g_inv_u = np.linalg.solve(G, ones)
        for value in g_inv_u:
            if _near(value, 0.0, tol):
                warnings.append(
                    f"interaction^-1 . ones: entry {value:.6g} within "
                    f"10*tol of zero"
                )
        checks.append(HypothesisCheck(
            "interaction^-1 . ones is entrywise negative",
            bool(np.all(g_inv_u < -tol)),
            {"value": _j(g_inv_u)}))

    rho = float(np.mean(L))
    max_dev = float(np.max(np.abs(L - rho)))
    uniform = max_dev <= tol and rho > tol
    checks.append(HypothesisCheck(
        "growth invariant is rho * ones with rho > 0", uniform,
        {"rho": rho, "max_deviation": max_dev}))

    hypotheses_hold = all(c.passed for c in checks)
    diamond = rho >= DIAMOND_RHO_THRESHOLD - tol
    marotto = rho >= MAROTTO_RHO_THRESHOLD - tol
    if _near(rho, DIAMOND_RHO_THRESHOLD, tol) or _near(rho, MAROTTO_RHO_THRESHOLD, tol):
        warnings.append(f"rho = {rho:.6g} within 10*tol of a chaos threshold")
    checks.append(HypothesisCheck(
        f"rho >= {MAROTTO_RHO_THRESHOLD} (snap-back chaos threshold)",
        uniform and marotto,
        {"rho": rho,
         "marotto_threshold": MAROTTO_RHO_THRESHOLD,
         "diamond_threshold": DIAMOND_RHO_THRESHOLD,
         "diamond_reached": uniform and diamond}))
    if hypotheses_hold and not marotto:
        notes.append("structural hypotheses hold but rho is below both "
                     "chaos thresholds; no conclusion")

    conclusion = (Conclusion.CHAOTIC_DIAMOND if diamond
                  else Conclusion.CHAOTIC_MAROTTO)
    return _verdict("T7", conclusion, checks, warnings, notes)


def check_all_theorems(sys: QPSystem, tol=DEFAULT_SIGN_TOL) -> list[TheoremVerdict]:
    """Run the full battery T1..T7 in order."""
    return [
        check_theorem1(sys, tol),
        check_theorem2(sys, tol),
        check_theorem3(sys, tol),
        check_theorem4(sys, tol),
        check_theorem5(sys, tol),
        check_theorem6(sys, tol),
        check_theorem7(sys, tol),
    ]


# ---------------------------------------------------------------------------
# hierarchical ordering
# ---------------------------------------------------------------------------

def _ordered_under(P, order, tol) -> bool:
    """Direct check of the definition for a candidate rearrangement."""
    P = np.asarray(P, dtype=float)
    idx = np.asarray(order)
    Q = P[np.ix_(idx, idx)]
    n = Q.shape[0]
    if np.any(np.diag(Q) <= tol):
        return False
    for i in range(n):
        if np.any(Q[i, i + 1:] < -tol):
            return False
    return True


def is_hierarchically_ordered(P, tol=DEFAULT_SIGN_TOL):
    """Search for a rearrangement making P upper-nonnegative with a
    strictly positive diagonal; return a witness or None.

    Uses greedy elimination: repeatedly place any remaining index whose
    row is nonnegative against all other remaining indices and whose
    diagonal entry is positive.  Removing a valid index only deletes
    constraints on the rest, so if any ordering exists one is found; the
    search is exact.  Ties are broken toward the row with the fewest
    negative entries.  Refuses n > 10.
    """
    P = np.asarray(P, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise WrongDimension(f"expected a square matrix, got shape {P.shape}")
    n = P.shape[0]
    if n > HIERARCHICAL_SEARCH_MAX_N:
        raise SearchBudgetExceeded(
            f"hierarchical-ordering search accepts n <= "
            f"{HIERARCHICAL_SEARCH_MAX_N}, got n = {n}"
        )
    remaining = list(range(n))
    order: list[int] = []
    while remaining:
        candidates = [
            r for r in remaining
            if P[r, r] > tol
            and all(P[r, c] >= -tol for c in remaining if c != r)
        ]
        if not candidates:
            return None
        pick = min(candidates,
                   key=lambda r: int(np.sum(P[r, remaining] < -tol)))
        order.append(pick)
        remaining.remove(pick)
    assert _ordered_under(P, order, tol)
    return HierarchicalOrderWitness(tuple(order))


def hierarchically_ordered_bruteforce(P, tol=DEFAULT_SIGN_TOL):
    """Exhaustive n! reference search (oracle for tests; n <= ~8)."""
    P = np.asarray(P, dtype=float)
    n = P.shape[0]
    for order in permutations(range(n)):
        if _ordered_under(P, order, tol):
            return HierarchicalOrderWitness(tuple(order))
    return None
