"""Classification of PU(n,1) isometries, translation lengths, Heisenberg
translations and cusp-stabilizer tests."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .hermitian import (
    GroupElement,
    InvalidInput,
    eigenvalues,
    form_inverse,
    membership_residual,
    standard_form,
)

EPS = np.finfo(float).eps
DEFAULT_TOL = 1e-9
RANK_TOL = 1e-8

Kind = Literal["elliptic", "parabolic", "hyperbolic"]


class IndeterminateClassification(ArithmeticError):
    def __init__(self, message: str, candidates: tuple[str, str], margin: float):
        super().__init__(message)
        self.candidates = candidates
        self.margin = margin


class NotHyperbolic(InvalidInput):
    pass


class NotApplicable(InvalidInput):
    pass


@dataclass(frozen=True)
class IsometryClass:
    kind: Kind
    r: float = 1.0
    theta: float = 0.0
    margin: float = 0.0

    def to_json(self) -> dict:
        out = {"kind": self.kind, "r": float(self.r), "theta": float(self.theta), "margin": float(self.margin)}
        if self.kind == "hyperbolic":
            out["length"] = length_from_r(self.r)
        return out


def _matrix(m) -> np.ndarray:
    return m.matrix if isinstance(m, GroupElement) else np.asarray(m, dtype=np.complex128)


def _clusters(ev: np.ndarray, radius: float) -> list[list[int]]:
    # single-linkage grouping of eigenvalues closer than ``radius``
    parent = list(range(len(ev)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(ev)):
        for j in range(i + 1, len(ev)):
            if abs(ev[i] - ev[j]) <= radius:
                parent[find(j)] = find(i)
    groups: dict[int, list[int]] = {}
    for i in range(len(ev)):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values(), key=lambda g: g[0])


def unit_determinant(m) -> np.ndarray:
    """Rescale so |det| = 1; the projective class is unchanged."""
    mat = _matrix(m)
    d = abs(np.linalg.det(mat))
    if d == 0:
        raise InvalidInput("singular matrix")
    return mat / d ** (1.0 / mat.shape[0])


def classify(m, tol: float = DEFAULT_TOL) -> IsometryClass:
    """Classify an isometry as elliptic, parabolic or hyperbolic.

    Hyperbolicity is read off the eigenvalue modulus ratio, which does not see
    the projective scalar.  Defective eigenvalues of parabolic elements are
    replaced by their cluster means (accurate to rounding even when the
    individual eigenvalues are not) before the ratio is taken.
    """
    mat = unit_determinant(m)
    d = mat.shape[0]
    ev = eigenvalues(mat)
    norm = float(np.linalg.norm(mat))
    kappa = norm * float(np.linalg.norm(np.linalg.inv(mat)))
    radius = max(1e-7, 10.0 * (EPS * kappa) ** (1.0 / d))
    groups = _clusters(ev, radius)
    means = [complex(np.mean(ev[g])) for g in groups]
    mods = [abs(mu) for mu in means]
    rho = max(mods) / min(mods)
    hyp_margin = abs(rho - 1.0 - tol)
    if hyp_margin < 10 * EPS:
        raise IndeterminateClassification(
            f"modulus ratio {rho!r} is at the hyperbolicity threshold", ("hyperbolic", "elliptic"), hyp_margin)
    if rho > 1.0 + tol:
        top = means[int(np.argmax(mods))]
        theta = math.atan2(top.imag, top.real)
        if theta <= -math.pi:
            theta += 2 * math.pi
        return IsometryClass("hyperbolic", math.sqrt(rho), theta, float(hyp_margin))

    thr = RANK_TOL * norm
    eye = np.eye(d)
    diagonalizable = True
    gap = math.inf
    for g, mu in zip(groups, means):
        k = len(g)
        sv = np.sort(np.linalg.svd(mat - mu * eye, compute_uv=False))
        decisive = sv[k - 1]
        gap = min(gap, abs(decisive - thr) / max(norm, 1.0))
        if decisive > thr:
            diagonalizable = False
    if gap < 10 * EPS:
        raise IndeterminateClassification(
            "diagonalizability test is at its threshold", ("elliptic", "parabolic"), gap)
    return IsometryClass("elliptic" if diagonalizable else "parabolic", 1.0, 0.0, float(gap))


def length_from_r(r: float) -> float:
    """Translation length of a hyperbolic element with non-unit eigenvalue moduli r, 1/r."""
    if r < 1:
        raise InvalidInput("r must be >= 1")
    # (r + 1/r)^2 / 4 written as 1 + ((r - 1/r)/2)^2 to keep accuracy near r = 1
    return 2.0 * math.acosh(1.0 + (0.5 * (r - 1.0 / r)) ** 2)


def translation_length(m, tol: float = DEFAULT_TOL) -> float:
    cls = classify(m, tol)
    if cls.kind != "hyperbolic":
        raise NotHyperbolic(f"element is {cls.kind}, not hyperbolic")
    return length_from_r(cls.r)


@dataclass(frozen=True)
class HeisenbergElement:
    """Heisenberg translation (tau, t) based at q_inf, or (sigma, s) at q_0."""

    tau: tuple[complex, ...]
    t: float
    cusp: Literal["infinity", "zero"] = "infinity"

    def __post_init__(self):
        object.__setattr__(self, "tau", tuple(complex(x) for x in self.tau))
        object.__setattr__(self, "t", float(self.t))
        if self.cusp not in ("infinity", "zero"):
            raise InvalidInput(f"unknown cusp {self.cusp!r}")

    @classmethod
    def vertical(cls, t: float, n: int = 2, cusp: Literal["infinity", "zero"] = "infinity") -> "HeisenbergElement":
        return cls((0j,) * (n - 1), t, cusp)

    @property
    def n(self) -> int:
        return len(self.tau) + 1


def heisenberg_to_matrix(h: HeisenbergElement) -> GroupElement:
    n = h.n
    tau = np.array(h.tau, dtype=np.complex128)
    corner = -(float(np.vdot(tau, tau).real) + 1j * h.t) / 2.0
    m = np.eye(n + 1, dtype=np.complex128)
    if h.cusp == "infinity":
        m[0, 1:n] = -tau.conj()
        m[0, n] = corner
        m[1:n, n] = tau
    else:
        m[1:n, 0] = tau
        m[n, 0] = corner
        m[n, 1:n] = -tau.conj()
    return GroupElement.from_matrix(m, tol=1e-12)


def heisenberg_compose(h1: HeisenbergElement, h2: HeisenbergElement) -> HeisenbergElement:
    """Group law matching the matrix product heisenberg_to_matrix(h1) @ heisenberg_to_matrix(h2)."""
    if h1.cusp != h2.cusp:
        raise InvalidInput("cannot compose translations based at different cusps")
    if h1.n != h2.n:
        raise InvalidInput("dimension mismatch")
    a = np.array(h1.tau, dtype=np.complex128)
    b = np.array(h2.tau, dtype=np.complex128)
    return HeisenbergElement(tuple(a + b), h1.t + h2.t + 2.0 * np.vdot(a, b).imag, h1.cusp)


def heisenberg_inverse(h: HeisenbergElement) -> HeisenbergElement:
    return HeisenbergElement(tuple(-x for x in h.tau), -h.t, h.cusp)


def heisenberg_act(h: HeisenbergElement, p):
    """Coordinate action of a translation at q_inf, derived from its matrix.

    (zeta, v, u) -> (zeta + tau, v - t - 2 Im sum(conj(tau_i) zeta_i), u).
    """
    from .siegel import SiegelPoint

    if h.cusp != "infinity":
        raise InvalidInput("closed-form action is only provided for translations at q_inf")
    tau = np.array(h.tau, dtype=np.complex128)
    z = p.zeta_array
    return SiegelPoint(tuple(z + tau), p.v - h.t - 2.0 * np.vdot(tau, z).imag, p.u)


def fixes_infinity(m, tol: float = DEFAULT_TOL) -> bool:
    """Whether the element fixes q_inf, i.e. its bottom-left entry vanishes."""
    nf = m.normal_form if isinstance(m, GroupElement) else _matrix(m)
    n = nf.shape[0] - 1
    return abs(nf[n, 0]) <= tol * float(np.linalg.norm(nf))


def swap_form(c: complex, a=None, n: int | None = None) -> GroupElement:
    """The element [[0, 0, 1/conj(c)], [0, A, 0], [c, 0, 0]] exchanging q_0 and q_inf."""
    c = complex(c)
    if c == 0:
        raise InvalidInput("c must be nonzero")
    if a is None:
        if n is None:
            n = 2
        a = np.eye(n - 1, dtype=np.complex128)
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    k = a.shape[0]
    if n is not None and k != n - 1:
        raise InvalidInput("A has the wrong size")
    n = k + 1
    if k and np.linalg.norm(a.conj().T @ a - np.eye(k)) > 1e-10:
        raise InvalidInput("A is not unitary")
    m = np.zeros((n + 1, n + 1), dtype=np.complex128)
    m[0, n] = 1.0 / c.conjugate()
    m[n, 0] = c
    m[1:n, 1:n] = a
    return GroupElement.from_matrix(m, tol=1e-10)


def dilation(a: complex, rotation=None, n: int = 2) -> GroupElement:
    """diag(a, A, 1/conj(a)): fixes both q_0 and q_inf."""
    a = complex(a)
    if a == 0:
        raise InvalidInput("a must be nonzero")
    rot = np.eye(n - 1, dtype=np.complex128) if rotation is None else np.asarray(rotation, dtype=np.complex128)
    m = np.zeros((n + 1, n + 1), dtype=np.complex128)
    m[0, 0] = a
    m[n, n] = 1.0 / a.conjugate()
    m[1:n, 1:n] = rot
    return GroupElement.from_matrix(m, tol=1e-10)


def bottom_left(m) -> complex:
    mat = _matrix(m)
    return complex(mat[mat.shape[0] - 1, 0])


@dataclass(frozen=True)
class TraceCheck:
    trace: complex
    predicted: float
    residual: float


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """[a, b] = a b a^{-1} b^{-1} for members of U(Q), inverses via the form."""
    j = standard_form(a.shape[0] - 1)
    return a @ b @ form_inverse(j, a) @ form_inverse(j, b)


def commutator_trace_check(t: float, m) -> TraceCheck:
    """Compare tr[g_inf(0, t), M] with n + 1 + |t c / 2|^2."""
    mat = _matrix(m)
    n = mat.shape[0] - 1
    g = heisenberg_to_matrix(HeisenbergElement.vertical(t, n)).matrix
    tr = complex(np.trace(commutator(g, mat)))
    c = mat[n, 0]
    predicted = n + 1 + abs(t * c / 2.0) ** 2
    return TraceCheck(tr, predicted, abs(tr - predicted))


def u_product_bound(m) -> float:
    """The bound |2/c|^2 on u(z) u(Mz) for elements not fixing q_inf."""
    if fixes_infinity(m):
        raise NotApplicable("element fixes q_inf (c = 0); the bound does not apply")
    return abs(2.0 / bottom_left(m)) ** 2


def vertical_translation_length(m, tol: float = 1e-8) -> float | None:
    """If ``m`` is projectively a vertical translation g_inf(0, t), return t, else None."""
    mat = _matrix(m)
    d = mat.shape[0]
    if abs(mat[0, 0]) < 0.5:
        return None
    x = mat / mat[0, 0]
    target = np.eye(d, dtype=np.complex128)
    target[0, d - 1] = x[0, d - 1]
    scale = max(1.0, float(np.linalg.norm(x)))
    if np.linalg.norm(x - target) > tol * scale:
        return None
    corner = x[0, d - 1]
    if abs(corner.real) > tol * scale:
        return None
    t = -2.0 * corner.imag
    return t if abs(t) > tol * scale else None


def random_unitary(k: int, rng: np.random.Generator) -> np.ndarray:
    if k == 0:
        return np.zeros((0, 0), dtype=np.complex128)
    z = rng.normal(size=(k, k)) + 1j * rng.normal(size=(k, k))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_member(n: int, rng: np.random.Generator, scale: float = 1.0, factors: int = 3) -> GroupElement:
    """A random product of Heisenberg translations, dilations, rotations and swaps."""
    j = standard_form(n)
    m = np.eye(n + 1, dtype=np.complex128)
    for _ in range(factors):
        tau = scale * (rng.normal(size=n - 1) + 1j * rng.normal(size=n - 1)) / 2
        h = heisenberg_to_matrix(HeisenbergElement(tuple(tau), scale * rng.normal(),
                                                   "infinity" if rng.random() < 0.5 else "zero")).matrix
        a = math.exp(scale * 0.5 * rng.normal()) * np.exp(1j * rng.uniform(-math.pi, math.pi))
        d = dilation(a, random_unitary(n - 1, rng), n).matrix
        m = m @ h @ d
        if rng.random() < 0.5:
            m = m @ swap_form(np.exp(1j * rng.uniform(-math.pi, math.pi)) * math.exp(0.3 * rng.normal()),
                              random_unitary(n - 1, rng), n).matrix
    return GroupElement._trusted(m, membership_residual(j, m))


def conjugate(g: GroupElement, m: GroupElement) -> GroupElement:
    j = standard_form(m.n)
    out = g.matrix @ m.matrix @ form_inverse(j, g.matrix)
    return GroupElement._trusted(out, membership_residual(j, out))


def word_product(elements: Sequence[GroupElement]) -> GroupElement:
    out = elements[0].matrix
    for e in elements[1:]:
        out = out @ e.matrix
    return GroupElement._trusted(out, membership_residual(standard_form(out.shape[0] - 1), out))
