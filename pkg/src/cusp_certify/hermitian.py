"""Small dense complex matrices, the signature (n, 1) form and PU(Q) membership.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  A
:class:`GroupElement` wraps a validated member of U(Q) together with its
projective normal form, which is what the word-ball enumeration hashes.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

MAX_DIM = 16
FORM_IMAG_TOL = 1e-10
DEFAULT_MEMBERSHIP_TOL = 1e-8


class InvalidInput(ValueError):
    """Raised for malformed or out-of-domain numerical input."""


class MembershipError(InvalidInput):
    """A matrix failed the U(Q) membership test."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


def as_matrix(data) -> np.ndarray:
    try:
        m = np.array(data, dtype=np.complex128)
    except (TypeError, ValueError) as exc:
        raise InvalidInput(f"not a numeric matrix: {exc}") from exc
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidInput(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] < 2:
        raise InvalidInput("matrix dimension must be at least 2")
    if not np.all(np.isfinite(m)):
        raise InvalidInput("matrix has non-finite entries")
    return m


def standard_form(n: int) -> np.ndarray:
    """Return J0, the anti-diagonal-corner form of signature (n, 1) on C^{n+1}."""
    if n < 1:
        raise InvalidInput("n must be >= 1")
    j = np.zeros((n + 1, n + 1), dtype=np.complex128)
    j[0, n] = 1.0
    j[n, 0] = 1.0
    for k in range(1, n):
        j[k, k] = 1.0
    return j


@dataclass(frozen=True)
class HermitianForm:
    matrix: np.ndarray
    signature: tuple[int, int]

    @classmethod
    def standard(cls, n: int) -> "HermitianForm":
        return cls(standard_form(n), (n, 1))

    @classmethod
    def from_matrix(cls, data, tol: float = 1e-12) -> "HermitianForm":
        j = as_matrix(data)
        if np.linalg.norm(j - j.conj().T) > tol * max(1.0, np.linalg.norm(j)):
            raise InvalidInput("form matrix is not Hermitian")
        ev = np.linalg.eigvalsh(j)
        scale = max(1.0, float(np.max(np.abs(ev))))
        p = int(np.sum(ev > tol * scale))
        q = int(np.sum(ev < -tol * scale))
        return cls(j, (p, q))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def form_value(form: HermitianForm | np.ndarray, z) -> float:
    """Evaluate Q(z) = z* J z, checking that the imaginary part vanishes."""
    j = form.matrix if isinstance(form, HermitianForm) else np.asarray(form)
    z = np.asarray(z, dtype=np.complex128)
    if z.shape != (j.shape[0],):
        raise InvalidInput(f"vector of length {z.shape} does not match form of dim {j.shape[0]}")
    norm2 = float(np.vdot(z, z).real)
    if norm2 == 0.0:
        raise InvalidInput("zero vector has no projective class")
    q = np.vdot(z, j @ z)
    if abs(q.imag) > FORM_IMAG_TOL * norm2:
        raise InvalidInput(f"form value has imaginary part {q.imag:.3e}; form is not Hermitian")
    return float(q.real)


def form_inverse(form: np.ndarray, m: np.ndarray) -> np.ndarray:
    """J M* J, which is M^{-1} for M in U(Q) when J is an involution."""
    return form @ m.conj().T @ form


def membership_residual(form: HermitianForm | np.ndarray, m) -> float:
    """Frobenius norm of (J M* J) M - I; zero exactly for members of U(Q)."""
    j = form.matrix if isinstance(form, HermitianForm) else np.asarray(form)
    m = np.asarray(m, dtype=np.complex128)
    if m.shape != j.shape:
        raise InvalidInput(f"dimension mismatch: matrix {m.shape} vs form {j.shape}")
    r = form_inverse(j, m) @ m - np.eye(j.shape[0])
    return float(np.linalg.norm(r))


def _pivot_index(m: np.ndarray, rel_tie: float = 1e-9) -> int:
    # first row-major entry whose modulus is within rel_tie of the maximum
    mods = np.abs(m).ravel()
    top = mods.max()
    return int(np.flatnonzero(mods >= top * (1.0 - rel_tie))[0])


def projective_normalize(m) -> np.ndarray:
    """Canonical representative of the projective class of ``m``.

    The matrix is divided by its largest-modulus entry (ties go to the lowest
    row-major index), so that entry becomes exactly ``1``.
    """
    m = np.asarray(m, dtype=np.complex128)
    if not np.any(m):
        raise InvalidInput("zero matrix has no projective class")
    k = _pivot_index(m)
    pivot = m.flat[k]
    if pivot == 1.0:
        out = m.copy()
    else:
        out = m / pivot
        out.flat[k] = 1.0
    out.setflags(write=False)
    return out


def eigenvalues(m) -> np.ndarray:
    """Eigenvalues with multiplicity, sorted by (modulus, argument)."""
    m = np.asarray(m, dtype=np.complex128)
    if m.shape[0] > MAX_DIM:
        raise InvalidInput(f"dimension {m.shape[0]} exceeds the cap of {MAX_DIM}")
    ev = np.linalg.eigvals(m)
    # round the sort keys so ordering is stable under last-bit noise
    keys = sorted(range(len(ev)), key=lambda i: (round(abs(ev[i]), 12), round(float(np.angle(ev[i])), 12)))
    return ev[keys]


@dataclass(frozen=True)
class GroupElement:
    """A validated member of U(Q), remembered up to its projective class.

    ``matrix`` is kept as a genuine U(Q) representative (so entries such as
    the bottom-left ``c`` have their geometric meaning); ``normal_form`` is
    the scale-free key used for deduplication.
    """

    matrix: np.ndarray
    residual: float
    normal_form: np.ndarray = field(repr=False)
    word: tuple[int, ...] | None = None

    @classmethod
    def from_matrix(
        cls,
        data,
        form: HermitianForm | None = None,
        tol: float = DEFAULT_MEMBERSHIP_TOL,
        word: Sequence[int] | None = None,
    ) -> "GroupElement":
        m = as_matrix(data)
        if form is None:
            form = HermitianForm.standard(m.shape[0] - 1)
        res = membership_residual(form, m)
        if not res <= tol:
            raise MembershipError(f"matrix is not in U(Q): residual {res:.3e} > {tol:.1e}", res)
        return cls._trusted(m, res, word)

    @classmethod
    def _trusted(cls, m: np.ndarray, residual: float, word=None) -> "GroupElement":
        m = np.array(m, dtype=np.complex128)
        m.setflags(write=False)
        return cls(m, residual, projective_normalize(m), None if word is None else tuple(word))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def n(self) -> int:
        return self.matrix.shape[0] - 1

    def inverse(self) -> "GroupElement":
        j = standard_form(self.n)
        inv = form_inverse(j, self.matrix)
        return GroupElement._trusted(inv, membership_residual(j, inv))

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        prod = self.matrix @ other.matrix
        return GroupElement._trusted(prod, membership_residual(standard_form(self.n), prod))

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))


def matrix_to_json(m) -> list:
    m = np.asarray(m, dtype=np.complex128)
    return [[[float(x.real), float(x.imag)] for x in row] for row in m]


def matrix_from_json(rows) -> np.ndarray:
    try:
        data = [[complex(float(e[0]), float(e[1])) for e in row] for row in rows]
    except (TypeError, IndexError, ValueError) as exc:
        raise InvalidInput(f"malformed matrix JSON: {exc}") from exc
    if not data or any(len(r) != len(data) for r in data):
        raise InvalidInput("matrix JSON must be a non-empty square array of rows")
    return as_matrix(data)
