"""Siegel-domain coordinates, the Bergman distance, horoballs and the
numerical displacement oracle."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import kernels
from .hermitian import GroupElement, InvalidInput
from .optimize import coordinate_descent, multistart

ACOSH_CLAMP_TOL = 1e-12
UNEMBED_TOL = 1e-12


class PointAtInfinity(InvalidInput):
    """The projective point is q_inf, which has no finite Siegel coordinates."""


class OutsideDomain(InvalidInput):
    """The projective point lies outside the closed Siegel domain."""


@dataclass(frozen=True)
class SiegelPoint:
    """Horospherical coordinates (zeta, v, u) with zeta in C^{n-1}."""

    zeta: tuple[complex, ...]
    v: float
    u: float

    def __post_init__(self):
        object.__setattr__(self, "zeta", tuple(complex(z) for z in self.zeta))
        object.__setattr__(self, "v", float(self.v))
        object.__setattr__(self, "u", float(self.u))

    @property
    def n(self) -> int:
        return len(self.zeta) + 1

    @property
    def zeta_array(self) -> np.ndarray:
        return np.array(self.zeta, dtype=np.complex128)

    def to_json(self) -> dict:
        return {"zeta": [[z.real, z.imag] for z in self.zeta], "v": self.v, "u": self.u}

    @classmethod
    def from_json(cls, doc: dict) -> "SiegelPoint":
        try:
            zeta = [complex(float(a), float(b)) for a, b in doc["zeta"]]
            return cls(tuple(zeta), float(doc["v"]), float(doc["u"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInput(f"malformed SiegelPoint JSON: {exc}") from exc

    def pack(self) -> np.ndarray:
        """(Re zeta, Im zeta, v, log u): the layout the kernels expect."""
        z = self.zeta_array
        return np.concatenate([z.real, z.imag, [self.v, math.log(self.u)]])

    @classmethod
    def unpack(cls, x) -> "SiegelPoint":
        x = np.asarray(x, dtype=float)
        k = (x.size - 2) // 2
        zeta = x[:k] + 1j * x[k:2 * k]
        return cls(tuple(zeta), x[-2], math.exp(x[-1]))


def embed(p: SiegelPoint) -> np.ndarray:
    """Lift (zeta, v, u) to the paraboloid [(-|zeta|^2 - u + iv)/2, zeta, 1]."""
    if p.u < 0:
        raise OutsideDomain(f"height u={p.u} is negative")
    z = p.zeta_array
    nz2 = float(np.vdot(z, z).real)
    return np.concatenate([[0.5 * complex(-nz2 - p.u, p.v)], z, [1.0]]).astype(np.complex128)


def unembed(z) -> SiegelPoint:
    z = np.asarray(z, dtype=np.complex128)
    scale = float(np.max(np.abs(z)))
    if scale == 0.0:
        raise InvalidInput("zero vector")
    if abs(z[-1]) <= UNEMBED_TOL * scale:
        raise PointAtInfinity("last coordinate vanishes: the point is q_inf")
    w = z / z[-1]
    zeta = w[1:-1]
    nz2 = float(np.vdot(zeta, zeta).real)
    u = -2.0 * w[0].real - nz2
    tol = UNEMBED_TOL * (1.0 + 2.0 * abs(w[0].real) + nz2)
    if u <= -tol:
        raise OutsideDomain(f"point is outside the Siegel domain (u={u:.3e})")
    return SiegelPoint(tuple(zeta), 2.0 * w[0].imag, max(u, 0.0))


def _acosh_clamped(arg: float) -> float:
    if arg < 1.0 - ACOSH_CLAMP_TOL:
        raise ArithmeticError(f"acosh argument {arg!r} below 1; inconsistent input")
    return math.acosh(max(arg, 1.0))


def distance(p1: SiegelPoint, p2: SiegelPoint) -> float:
    """Bergman distance between two interior points in horospherical coordinates."""
    if p1.u <= 0 or p2.u <= 0:
        raise InvalidInput("distance needs positive heights")
    if p1.n != p2.n:
        raise InvalidInput("points live in different dimensions")
    z1, z2 = p1.zeta_array, p2.zeta_array
    dz = z1 - z2
    # <z1, z2> = sum z1_i conj(z2_i); this is the convention compatible with embed()
    inner = np.vdot(z2, z1)
    w = float(np.vdot(dz, dz).real) + p1.u + p2.u + 1j * (p1.v - p2.v) + 2j * inner.imag
    arg = abs(w) ** 2 / (4.0 * p1.u * p2.u)
    return 2.0 * _acosh_clamped(arg)


def distance_lower_bound(u1: float, u2: float) -> float:
    """Height-only lower bound for the distance; exact when zeta and v agree."""
    if u1 <= 0 or u2 <= 0:
        raise InvalidInput("heights must be positive")
    return 2.0 * _acosh_clamped((u1 + u2) ** 2 / (4.0 * u1 * u2))


def act(m: GroupElement | np.ndarray, p: SiegelPoint) -> SiegelPoint:
    mat = m.matrix if isinstance(m, GroupElement) else np.asarray(m, dtype=np.complex128)
    try:
        return unembed(mat @ embed(p))
    except PointAtInfinity as exc:
        raise PointAtInfinity("image of the point is q_inf") from exc


def swap_height(p: SiegelPoint) -> float:
    """Height of the image of ``p`` under the standard swap of q_0 and q_inf (c = 1)."""
    z = p.zeta_array
    nz2 = float(np.vdot(z, z).real)
    return 4.0 * p.u / abs(complex(nz2 + p.u, -p.v)) ** 2


@dataclass(frozen=True)
class Horoball:
    cusp: Literal["infinity", "zero"]
    height: float

    def __post_init__(self):
        if self.cusp not in ("infinity", "zero"):
            raise InvalidInput(f"unknown cusp {self.cusp!r}")
        if not self.height > 0:
            raise InvalidInput("horoball height must be positive")


def horoball_contains(b: Horoball, p: SiegelPoint) -> bool:
    if b.cusp == "infinity":
        return p.u > b.height
    return swap_height(p) > b.height


def horoballs_disjoint(u0: float, u_inf: float) -> bool:
    """Whether B_0(u0) and B_inf(u_inf) are disjoint: exactly when u0 * u_inf >= 4."""
    if u0 <= 0 or u_inf <= 0:
        raise InvalidInput("horoball heights must be positive")
    return u0 * u_inf >= 4.0


@dataclass(frozen=True)
class SamplerResult:
    sup: float
    witness: SiegelPoint
    evals: int


def swap_height_sup(u_inf: float, n: int = 2, starts: int = 16, seed: int = 0) -> SamplerResult:
    """Numerically maximize the q_0-horoball height coordinate over B_inf(u_inf).

    Heights are parametrized as ``u = u_inf + exp(s)`` so every sample stays
    strictly inside B_inf(u_inf).
    """
    if u_inf <= 0:
        raise InvalidInput("height must be positive")
    k = n - 1
    rng = np.random.default_rng(seed)
    lo = np.array([-2.0] * (2 * k) + [-4.0, -3.0])
    hi = np.array([2.0] * (2 * k) + [4.0, 3.0])
    x0s = lo + (hi - lo) * rng.random((starts, 2 * k + 2))

    def point(x) -> SiegelPoint:
        return SiegelPoint(tuple(x[:k] + 1j * x[k:2 * k]), x[-2], u_inf + math.exp(x[-1]))

    def neg(x) -> float:
        if x[-1] > 700:
            return 0.0
        return -swap_height(point(x))

    res = multistart(lambda x0: coordinate_descent(neg, x0, h0=2.0, xtol=1e-9, ftol=1e-15,
                                                   max_sweeps=400), x0s)
    return SamplerResult(-res.fun, point(res.x), res.evals)


def horoballs_intersect_witness(u0: float, u_inf: float, n: int = 2, seed: int = 0,
                                sample: SamplerResult | None = None) -> SiegelPoint | None:
    """A point lying in both B_0(u0) and B_inf(u_inf), found by sampling, or None.

    The sampled maximizer tends to the boundary of B_inf, so it is pushed to a
    height slightly inside before both memberships are tested.
    """
    r = sample if sample is not None else swap_height_sup(u_inf, n=n, seed=seed)
    p = r.witness
    for lift in (0.0, 1e-9, 1e-6, 1e-3):
        q = SiegelPoint(p.zeta, p.v, max(p.u, u_inf * (1.0 + lift)))
        if horoball_contains(Horoball("zero", u0), q) and horoball_contains(Horoball("infinity", u_inf), q):
            return q
    return None


@dataclass(frozen=True)
class OracleBudget:
    starts: int = 64
    max_sweeps: int = 200
    xtol: float = 1e-6
    seed: int = 0


@dataclass(frozen=True)
class OracleResult:
    value: float
    converged: bool
    point: SiegelPoint
    evals: int
    backend: str


def oracle_starts(n: int, budget: OracleBudget) -> np.ndarray:
    k = n - 1
    lo = np.array([-4.0] * (2 * k) + [-8.0, -3.0])
    hi = np.array([4.0] * (2 * k) + [8.0, 3.0])
    rng = np.random.default_rng(budget.seed)
    # starts for a smaller budget are a prefix of those for a larger one
    return lo + (hi - lo) * rng.random((budget.starts, 2 * k + 2))


def min_displacement_oracle(m: GroupElement | np.ndarray, budget: OracleBudget = OracleBudget(),
                            threads: int = 1) -> OracleResult:
    """Numerical upper approximation of inf_z d(z, Mz).

    A test oracle only: multi-start coordinate descent with golden-section line
    searches, independent of the eigenvalue route to the translation length.
    """
    mat = m.matrix if isinstance(m, GroupElement) else np.asarray(m, dtype=np.complex128)
    n = mat.shape[0] - 1
    if n < 1:
        raise InvalidInput("need n >= 1")
    starts = oracle_starts(n, budget)

    def run(x0):
        return kernels.descend(mat, x0, 1.0, budget.xtol, 1e-12, budget.max_sweeps)

    res = multistart(run, starts, threads=threads)
    return OracleResult(res.fun, res.converged, SiegelPoint.unpack(res.x), res.evals, kernels.BACKEND)

