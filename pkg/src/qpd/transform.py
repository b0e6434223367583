"""Quasimonomial transformations and the canonical Lotka-Volterra form.

A quasimonomial transformation (QMT) is the change of variables

    x_i = prod_j y_j ** C[i,j],      det C != 0,

which maps a QP system (A, B, lam) to the QP system

    A' = C^-1 A,   B' = B C,   lam' = C^-1 lam.

Every QMT is a topological conjugacy, so two systems related by one share
all their dynamics.  The products ``B A`` and ``B lam`` are unchanged by
any QMT; they are the interaction matrix and growth vector of the unique
LV system in the class, reached with C = B^-1 whenever B is invertible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, OverflowGuard, SingularB, SingularMatrix
from .systems import EXP_ARG_LIMIT, LVSystem, QPSystem, as_state, _frozen

#: Relative determinant floor: a matrix is treated as singular when
#: |det| < SINGULARITY_RTOL * max(1, max abs row sum).
SINGULARITY_RTOL = 1e-10

#: Acceptance bound on ||C @ C_inv - I||_inf for a computed inverse.
INVERSE_RESIDUAL_LIMIT = 1e-9


def det_tolerance(M) -> float:
    """Determinant magnitude below which M is rejected as singular."""
    M = np.asarray(M, dtype=float)
    row_norm = float(np.max(np.sum(np.abs(M), axis=1))) if M.size else 0.0
    return SINGULARITY_RTOL * max(1.0, row_norm)


def _invert(M, error=SingularMatrix, what="matrix"):
    """Dense inverse with a determinant guard and a residual check."""
    M = np.asarray(M, dtype=float)
    det = float(np.linalg.det(M))
    if abs(det) < det_tolerance(M):
        raise error(f"{what} is singular within tolerance (|det| = {abs(det):.3e})")
    inv = np.linalg.solve(M, np.eye(M.shape[0]))
    residual = float(np.max(np.abs(M @ inv - np.eye(M.shape[0]))))
    if residual > INVERSE_RESIDUAL_LIMIT:
        raise error(
            f"{what} is too ill-conditioned to invert reliably "
            f"(inverse residual {residual:.3e})"
        )
    return inv


@dataclass(frozen=True)
class QMTMatrix:
    """An invertible transformation matrix with its precomputed inverse.

    The inverse is stored explicitly because state mapping is applied
    repeatedly and the matrices here are small and dense.
    """

    C: np.ndarray
    C_inv: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "C", _frozen(self.C))
        object.__setattr__(self, "C_inv", _frozen(self.C_inv))

    @classmethod
    def from_matrix(cls, C) -> "QMTMatrix":
        """Validate invertibility and precompute the inverse."""
        C = np.asarray(C, dtype=float)
        if C.ndim != 2 or C.shape[0] != C.shape[1]:
            raise DimensionMismatch(f"C must be square, got shape {C.shape}")
        return cls(C, _invert(C, what="transformation matrix"))

    @classmethod
    def identity(cls, n: int) -> "QMTMatrix":
        return cls(np.eye(n), np.eye(n))

    @property
    def n(self) -> int:
        return self.C.shape[0]

    def inverse(self) -> "QMTMatrix":
        return QMTMatrix(self.C_inv, self.C)

    def condition(self) -> float:
        """Infinity-norm condition estimate ||C|| * ||C^-1||."""
        norm = lambda M: float(np.max(np.sum(np.abs(M), axis=1)))
        return norm(self.C) * norm(self.C_inv)


@dataclass(frozen=True)
class ClassInvariants:
    """The QMT invariants of a system: interaction = B A, growth = B lam.

    Identical for every system in a transformation class, and equal to
    the matrices of its canonical LV representative.
    """

    interaction: np.ndarray
    growth: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "interaction", _frozen(self.interaction))
        object.__setattr__(self, "growth", _frozen(self.growth))


def class_invariants(sys: QPSystem) -> ClassInvariants:
    """Compute the transformation-class invariants (B A, B lam)."""
    return ClassInvariants(sys.B @ sys.A, sys.B @ sys.lam)


def apply_qmt(sys: QPSystem, qmt: QMTMatrix) -> QPSystem:
    """Transform a system by a QMT: A' = C^-1 A, B' = B C, lam' = C^-1 lam."""
    if qmt.n != sys.n:
        raise DimensionMismatch(
            f"transformation is {qmt.n}x{qmt.n} but system has dimension {sys.n}"
        )
    return QPSystem(
        qmt.C_inv @ sys.A,
        sys.B @ qmt.C,
        qmt.C_inv @ sys.lam,
        name=sys.name,
    )


def canonical_lv(sys: QPSystem) -> tuple[LVSystem, QMTMatrix]:
    """Reduce a QP system to its canonical LV representative.

    Returns the LV system whose matrices are the class invariants together
    with the transformation C = B^-1 that produces it.  Raises SingularB
    when B is singular within tolerance: no canonical form exists then.
    """
    B_inv = _invert(sys.B, error=SingularB, what="exponent matrix B")
    qmt = QMTMatrix(B_inv, sys.B)
    inv = class_invariants(sys)
    return LVSystem(inv.interaction, inv.growth, name=sys.name), qmt


def map_state(qmt: QMTMatrix, y) -> np.ndarray:
    """Map a state through the monomial change of variables.

    x_i = prod_j y_j ** C[i,j], evaluated as exp(C @ log y).  Strictly
    positive in, strictly positive out; guarded like the one-step map.
    """
    y = as_state(y, qmt.n)
    if np.array_equal(qmt.C, np.eye(qmt.n)):
        return y  # exact: the exp/log round trip would wobble by an ulp
    w = qmt.C @ np.log(y)
    if np.any(np.abs(w) > EXP_ARG_LIMIT):
        raise OverflowGuard("state-mapping exponent exceeds guard bound")
    return np.exp(w)
