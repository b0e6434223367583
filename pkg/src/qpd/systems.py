"""Core data types for quasipolynomial (QP) and Lotka-Volterra (LV) maps.

A QP system iterates, on the open positive orthant,

    x_i(t+1) = x_i(t) * exp(lam_i + sum_j A[i,j] * prod_k x_k(t)**B[j,k])

with square real matrices A, B and a real vector lam.  The products
``prod_k x_k**B[j,k]`` are the quasimonomials of the map.  LV systems are
the special case B = identity, where the quasimonomials are the state
components themselves.

This module owns validation, one-step evaluation, sign-pattern
extraction, and the system-definition JSON schema used by fixtures and
the command line.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    NonFinite,
    NonPositiveState,
    OverflowGuard,
    SchemaError,
)

#: Default tolerance for classifying a value as zero in sign patterns and
#: in strict/non-strict inequality checks.  Fixed and documented so that
#: classification verdicts are reproducible.
DEFAULT_SIGN_TOL = 1e-9

#: Guard bound on exponent arguments: a step whose exponent exceeds this in
#: absolute value is rejected (near the double-precision exp limit) rather
#: than silently producing inf or a collapsed zero.
EXP_ARG_LIMIT = 700.0

#: Sign-pattern symbols.
PLUS = 1
MINUS = -1
ZERO = 0

_SYMBOLS = {PLUS: "+", MINUS: "-", ZERO: "0"}


def _frozen(a, dtype=float):
    """Copy to a C-contiguous read-only float array."""
    out = np.array(a, dtype=dtype, order="C")
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class QPSystem:
    """A quasipolynomial discrete-time system (A, B, lam).

    Immutable after construction; all fields are validated and stored as
    read-only arrays, so instances are safe to share across threads.
    """

    A: np.ndarray
    B: np.ndarray
    lam: np.ndarray
    name: str | None = None

    def __post_init__(self):
        A = _frozen(self.A)
        B = _frozen(self.B)
        lam = _frozen(self.lam)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise DimensionMismatch(f"A must be square, got shape {A.shape}")
        n = A.shape[0]
        if B.shape != (n, n):
            raise DimensionMismatch(f"B must be {n}x{n}, got shape {B.shape}")
        if lam.shape != (n,):
            raise DimensionMismatch(
                f"lam must have length {n}, got shape {lam.shape}"
            )
        for label, arr in (("A", A), ("B", B), ("lam", lam)):
            if not np.all(np.isfinite(arr)):
                raise NonFinite(f"{label} contains NaN or infinite entries")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "lam", lam)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    def to_dict(self) -> dict:
        """System-definition document (the JSON schema used by the CLI)."""
        return {
            "name": self.name or "",
            "n": self.n,
            "A": self.A.tolist(),
            "B": self.B.tolist(),
            "lambda": self.lam.tolist(),
        }


@dataclass(frozen=True)
class LVSystem:
    """A Lotka-Volterra system: interaction matrix A and growth vector lam.

    Semantically a QPSystem whose exponent matrix is the identity.
    """

    A: np.ndarray
    lam: np.ndarray
    name: str | None = None

    def __post_init__(self):
        qp = QPSystem(self.A, np.eye(len(np.atleast_1d(self.lam))), self.lam)
        object.__setattr__(self, "A", qp.A)
        object.__setattr__(self, "lam", qp.lam)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    def as_qp(self) -> QPSystem:
        return QPSystem(self.A, np.eye(self.n), self.lam, name=self.name)


def validate_system(A, B, lam, name=None) -> QPSystem:
    """Build a validated QPSystem from raw matrices and a vector.

    Raises DimensionMismatch when the shapes disagree and NonFinite when
    any entry is NaN or infinite.
    """
    return QPSystem(A, B, lam, name=name)


def as_state(x, n=None) -> np.ndarray:
    """Validate a strictly positive state vector and return it as float64."""
    out = np.asarray(x, dtype=float)
    if out.ndim != 1:
        raise DimensionMismatch(f"state must be a vector, got shape {out.shape}")
    if n is not None and out.shape != (n,):
        raise DimensionMismatch(f"state must have length {n}, got {out.shape[0]}")
    if not np.all(np.isfinite(out)):
        raise NonFinite("state contains NaN or infinite entries")
    if np.any(out <= 0.0):
        raise NonPositiveState(f"state must be strictly positive, got {out}")
    return out


def quasimonomials(sys: QPSystem, x) -> np.ndarray:
    """The quasimonomial vector q with q_j = prod_k x_k**B[j,k].

    Computed as exp(B @ log x), valid for arbitrary real exponents on a
    strictly positive state.  Raises OverflowGuard when a quasimonomial
    would overflow double precision.
    """
    x = as_state(x, sys.n)
    w = sys.B @ np.log(x)
    if np.any(w > EXP_ARG_LIMIT):
        raise OverflowGuard("quasimonomial exponent exceeds guard bound")
    return np.exp(w)


def step(sys: QPSystem, x) -> np.ndarray:
    """One iteration of the QP map; strictly positive in, strictly positive out.

    Raises OverflowGuard when the exponent argument exceeds the guard
    bound in absolute value, or when the result would leave the
    representable positive range.
    """
    x = as_state(x, sys.n)
    q = quasimonomials(sys, x)
    arg = sys.lam + sys.A @ q
    if np.any(np.abs(arg) > EXP_ARG_LIMIT):
        raise OverflowGuard("step exponent exceeds guard bound")
    out = x * np.exp(arg)
    if not np.all(np.isfinite(out)) or np.any(out <= 0.0):
        raise OverflowGuard("step left the representable positive orthant")
    return out


def sign_pattern(M, tol=DEFAULT_SIGN_TOL) -> np.ndarray:
    """Sign pattern of a real array: entries in {MINUS, ZERO, PLUS}.

    Entry (i, j) is ZERO iff |M[i,j]| <= tol, else the sign of M[i,j].
    """
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    M = np.asarray(M, dtype=float)
    pat = np.sign(M).astype(np.int8)
    pat[np.abs(M) <= tol] = ZERO
    return pat


def pattern_string(pattern) -> str:
    """Render a sign pattern with the symbols '+', '-', '0'."""
    pattern = np.atleast_2d(pattern)
    return "[" + "; ".join(
        " ".join(_SYMBOLS[int(v)] for v in row) for row in pattern
    ) + "]"


def is_lotka_volterra(sys: QPSystem, tol=DEFAULT_SIGN_TOL) -> bool:
    """True iff the exponent matrix is the identity within tolerance."""
    return bool(np.max(np.abs(sys.B - np.eye(sys.n))) <= tol)


# ---------------------------------------------------------------------------
# System-definition JSON schema:
#   {"name": "...", "n": 2, "A": [[...],[...]], "B": [[...],[...]],
#    "lambda": [...]}
# ---------------------------------------------------------------------------

def system_from_dict(doc: dict) -> QPSystem:
    """Parse a system-definition document, validating the schema strictly."""
    if not isinstance(doc, dict):
        raise SchemaError("system definition must be a JSON object")
    for key in ("n", "A", "B", "lambda"):
        if key not in doc:
            raise SchemaError(f"missing required key {key!r}")
    name = doc.get("name")
    if name is not None and not isinstance(name, str):
        raise SchemaError("'name' must be a string")
    n = doc["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise SchemaError("'n' must be a positive integer")

    def matrix(key):
        raw = doc[key]
        if (
            not isinstance(raw, list)
            or len(raw) != n
            or any(not isinstance(row, list) or len(row) != n for row in raw)
        ):
            raise SchemaError(f"{key!r} must be an {n}x{n} nested array")
        if any(isinstance(v, bool) or not isinstance(v, (int, float))
               for row in raw for v in row):
            raise SchemaError(f"{key!r} entries must be numbers")
        return np.array(raw, dtype=float)

    raw_lam = doc["lambda"]
    if not isinstance(raw_lam, list) or len(raw_lam) != n or any(
        isinstance(v, bool) or not isinstance(v, (int, float)) for v in raw_lam
    ):
        raise SchemaError(f"'lambda' must be a numeric array of length {n}")

    try:
        return QPSystem(matrix("A"), matrix("B"),
                        np.array(raw_lam, dtype=float), name=name or None)
    except (DimensionMismatch, NonFinite) as exc:
        raise SchemaError(str(exc)) from exc


def load_system(path) -> QPSystem:
    """Load a system-definition JSON file.

    Raises ParseError (with line/column) on malformed JSON and SchemaError
    on a well-formed document that does not match the schema.
    """
    import json

    from .errors import ParseError

    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}",
            line=exc.lineno,
            column=exc.colno,
        ) from exc
    return system_from_dict(doc)
