"""Oracle cross-check suites behind ``cusp-certify verify``.

Each suite draws fixtures from a seeded generator, compares a closed-form
route against an independent one and reports every check.  The first failing
fixture is kept as a counterexample so it can be written out and replayed.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .hermitian import GroupElement, form_inverse, matrix_to_json, standard_form
from .isometry import (
    HeisenbergElement, commutator_trace_check, conjugate, dilation, heisenberg_compose, heisenberg_to_matrix,
    random_member, random_unitary, translation_length,
)
from .siegel import (
    SiegelPoint, act, distance, distance_lower_bound, embed, horoballs_disjoint, horoballs_intersect_witness,
    min_displacement_oracle, swap_height_sup, unembed, OracleBudget,
)

DEFAULT_SEED = 0
LENGTH_RATIOS = (1.2, 1.5, 2.0, 3.0, 5.0)


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class SuiteResult:
    suite: str
    seed: int
    checks: list = field(default_factory=list)
    counterexample: dict | None = None
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, detail: str = "", fixture: dict | None = None) -> None:
        passed = bool(passed)
        self.checks.append(Check(name, passed, detail))
        if not passed and self.counterexample is None:
            self.counterexample = {"suite": self.suite, "seed": self.seed, "check": name, "detail": detail,
                                   "fixture": fixture or {}}

    def table(self) -> str:
        width = max([len(c.name) for c in self.checks] + [5])
        rows = [f"{'check':<{width}}  result  detail"]
        rows += [f"{c.name:<{width}}  {'PASS' if c.passed else 'FAIL':<6}  {c.detail}" for c in self.checks]
        rows.append(f"suite {self.suite}: {'PASS' if self.passed else 'FAIL'} "
                    f"({sum(c.passed for c in self.checks)}/{len(self.checks)}, seed {self.seed}, "
                    f"{self.elapsed:.2f}s)")
        return "\n".join(rows)

    def to_json(self) -> dict:
        return {"suite": self.suite, "seed": self.seed, "passed": self.passed,
                "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in self.checks],
                "counterexample": self.counterexample}


def _random_point(rng: np.random.Generator, n: int, spread: float = 2.0) -> SiegelPoint:
    zeta = spread * (rng.normal(size=n - 1) + 1j * rng.normal(size=n - 1)) / 2
    return SiegelPoint(tuple(zeta), spread * rng.normal(), math.exp(rng.uniform(-1.5, 1.5)))


def length_fixtures(seed: int = DEFAULT_SEED) -> list[tuple[str, GroupElement, float]]:
    """20 hyperbolic fixtures: each ratio, diagonal and conjugated, for n = 2 and 3."""
    rng = np.random.default_rng(seed)
    out = []
    for n in (2, 3):
        for r in LENGTH_RATIOS:
            phase = np.exp(1j * rng.uniform(-math.pi, math.pi))
            d = dilation(r * phase, random_unitary(n - 1, rng), n)
            out.append((f"diag n={n} r={r}", d, r))
            g = random_member(n, rng, scale=0.6)
            out.append((f"conj n={n} r={r}", conjugate(g, d), r))
    return out


def suite_length(seed: int = DEFAULT_SEED, tol: float = 1e-4, threads: int = 1,
                 budget: OracleBudget = OracleBudget()) -> SuiteResult:
    res = SuiteResult("length", seed)
    for name, m, r in length_fixtures(seed):
        ell = translation_length(m)
        orc = min_displacement_oracle(m, budget, threads=threads)
        err = abs(ell - orc.value)
        res.add(name, err <= tol and orc.converged,
                f"length={ell:.10f} oracle={orc.value:.10f} err={err:.2e}",
                {"matrix": matrix_to_json(m.matrix), "r": r, "length": ell, "oracle": orc.value})
    return res


def trace_fixtures(seed: int = DEFAULT_SEED, count: int = 100) -> list[tuple[float, GroupElement]]:
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        n = 2 + (i % 2)
        t = float(rng.uniform(-4.0, 4.0))
        out.append((t, random_member(n, rng, scale=0.6)))
    return out


def suite_trace(seed: int = DEFAULT_SEED, tol: float = 1e-8, count: int = 100) -> SuiteResult:
    res = SuiteResult("trace", seed)
    worst = 0.0
    bad = None
    for i, (t, m) in enumerate(trace_fixtures(seed, count)):
        chk = commutator_trace_check(t, m)
        worst = max(worst, chk.residual)
        if chk.residual > tol and bad is None:
            bad = (i, t, m, chk)
    fixture = None
    if bad is not None:
        i, t, m, chk = bad
        fixture = {"index": i, "t": t, "matrix": matrix_to_json(m.matrix), "trace": [chk.trace.real, chk.trace.imag],
                   "predicted": chk.predicted}
    res.add(f"{count} commutator traces", bad is None, f"max residual {worst:.2e} (tol {tol:g})", fixture)
    return res


def suite_metric(seed: int = DEFAULT_SEED, pairs: int = 10_000, inv_tol: float = 1e-8,
                 exact_tol: float = 1e-12) -> SuiteResult:
    res = SuiteResult("metric", seed)
    rng = np.random.default_rng(seed)
    worst = {"invariance": 0.0, "symmetry": 0.0, "roundtrip": 0.0, "dominance": 0.0}
    bad: dict[str, dict] = {}
    groups = max(1, pairs // 100)
    for gi in range(groups):
        n = 2 + (gi % 2)
        g = random_member(n, rng, scale=0.5, factors=2)
        for _ in range(pairs // groups):
            p, q = _random_point(rng, n), _random_point(rng, n)
            d = distance(p, q)
            e = abs(distance(act(g, p), act(g, q)) - d) / max(1.0, d)
            s = abs(distance(q, p) - d)
            pr = unembed(embed(p))
            rt = max(max([abs(a - b) for a, b in zip(pr.zeta, p.zeta)], default=0.0),
                     abs(pr.v - p.v), abs(pr.u - p.u)) / max(1.0, abs(p.v), p.u)
            dom = distance_lower_bound(p.u, q.u) - d
            for key, val, lim in (("invariance", e, inv_tol), ("symmetry", s, exact_tol),
                                  ("roundtrip", rt, exact_tol), ("dominance", dom, exact_tol)):
                worst[key] = max(worst[key], val)
                if val > lim and key not in bad:
                    bad[key] = {"p": p.to_json(), "q": q.to_json(), "g": matrix_to_json(g.matrix), "value": val}
    res.add(f"isometry invariance ({pairs} pairs)", "invariance" not in bad,
            f"max rel err {worst['invariance']:.2e}", bad.get("invariance"))
    res.add("symmetry", "symmetry" not in bad, f"max err {worst['symmetry']:.2e}", bad.get("symmetry"))
    res.add("embed/unembed round trip", "roundtrip" not in bad, f"max err {worst['roundtrip']:.2e}",
            bad.get("roundtrip"))
    res.add("height lower bound dominance", "dominance" not in bad, f"max excess {worst['dominance']:.2e}",
            bad.get("dominance"))
    d = distance(SiegelPoint((0j,), 0.0, 1.0), SiegelPoint((0j,), 0.0, 4.0))
    ref = 2.0 * math.acosh(25.0 / 16.0)
    res.add("d((0,0,1),(0,0,4)) = 2 acosh(25/16)", abs(d - ref) <= 1e-10, f"err {abs(d - ref):.2e}")
    ell = translation_length(dilation(2.0))
    res.add("matches length of diag(2,1,1/2)", abs(d - ell) <= 1e-4, f"err {abs(d - ell):.2e}")
    return res


def _heis_random(rng: np.random.Generator, n: int, cusp: str) -> HeisenbergElement:
    tau = rng.normal(size=n - 1) + 1j * rng.normal(size=n - 1)
    return HeisenbergElement(tuple(tau), 2.0 * rng.normal(), cusp)


def suite_heisenberg(seed: int = DEFAULT_SEED, pairs: int = 1000, tol: float = 1e-12) -> SuiteResult:
    res = SuiteResult("heisenberg", seed)
    rng = np.random.default_rng(seed)
    worst = 0.0
    bad = None
    for i in range(pairs):
        n = 2 + (i % 2)
        cusp = "infinity" if i % 4 < 2 else "zero"
        h1, h2 = _heis_random(rng, n, cusp), _heis_random(rng, n, cusp)
        prod = heisenberg_to_matrix(h1).matrix @ heisenberg_to_matrix(h2).matrix
        law = heisenberg_to_matrix(heisenberg_compose(h1, h2)).matrix
        err = float(np.max(np.abs(prod - law))) / max(1.0, float(np.max(np.abs(prod))))
        worst = max(worst, err)
        if err > tol and bad is None:
            bad = {"h1": {"tau": [[z.real, z.imag] for z in h1.tau], "t": h1.t, "cusp": cusp},
                   "h2": {"tau": [[z.real, z.imag] for z in h2.tau], "t": h2.t, "cusp": cusp}, "err": err}
    res.add(f"composition law vs matrix product ({pairs} pairs)", bad is None, f"max rel err {worst:.2e}", bad)
    commute_ok = True
    for i in range(200):
        n = 2 + (i % 2)
        a = heisenberg_to_matrix(HeisenbergElement.vertical(float(rng.normal()), n)).matrix
        b = heisenberg_to_matrix(HeisenbergElement.vertical(float(rng.normal()), n)).matrix
        if not np.array_equal(a @ b, b @ a):
            commute_ok = False
            break
    res.add("vertical translations commute exactly", commute_ok)
    j2 = standard_form(2)
    g = heisenberg_to_matrix(_heis_random(rng, 2, "infinity")).matrix
    res.add("inverse via the form", float(np.max(np.abs(g @ form_inverse(j2, g) - np.eye(3)))) <= tol)
    return res


def horoball_grid(size: int = 15) -> np.ndarray:
    return np.exp(np.linspace(math.log(0.5), math.log(8.0), size))


def suite_horoball(seed: int = DEFAULT_SEED, size: int = 15, margin: float = 0.1, sup_tol: float = 1e-3,
                   n: int = 2) -> SuiteResult:
    res = SuiteResult("horoball", seed)
    grid = horoball_grid(size)
    sups = {}
    sup_bad = None
    worst = 0.0
    for u_inf in grid:
        sr = swap_height_sup(float(u_inf), n=n, seed=seed)
        sups[float(u_inf)] = sr
        rel = abs(sr.sup - 4.0 / u_inf) / (4.0 / u_inf)
        worst = max(worst, rel)
        if rel > sup_tol and sup_bad is None:
            sup_bad = {"uInf": float(u_inf), "sampled": sr.sup, "analytic": 4.0 / u_inf}
    res.add("sampled supremum = 4/u_inf", sup_bad is None, f"max rel err {worst:.2e}", sup_bad)
    agree = 0
    skipped = 0
    bad = None
    for u0 in grid:
        for u_inf in grid:
            if abs(u0 * u_inf - 4.0) < margin:
                skipped += 1
                continue
            sr = sups[float(u_inf)]
            sampled_meet = sr.sup > u0
            ok = horoballs_disjoint(float(u0), float(u_inf)) != sampled_meet
            if sampled_meet and ok:
                ok = horoballs_intersect_witness(float(u0), float(u_inf), n=n, sample=sr) is not None
            if ok:
                agree += 1
            elif bad is None:
                bad = {"u0": float(u0), "uInf": float(u_inf), "sampledSup": sr.sup}
    res.add(f"disjointness grid {size}x{size}", bad is None, f"{agree} agree, {skipped} within margin", bad)
    return res


SUITES: dict[str, Callable[..., SuiteResult]] = {
    "metric": suite_metric,
    "trace": suite_trace,
    "length": suite_length,
    "heisenberg": suite_heisenberg,
    "horoball": suite_horoball,
}


def run_suite(name: str, seed: int = DEFAULT_SEED, threads: int = 1) -> SuiteResult:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}")
    t0 = time.perf_counter()
    res = suite_length(seed, threads=threads) if name == "length" else SUITES[name](seed)
    res.elapsed = time.perf_counter() - t0
    return res
