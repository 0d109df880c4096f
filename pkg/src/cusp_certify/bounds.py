"""Closed-form effective bounds driven by a certified systole lower bound.

Every evaluator has a linear-space form and an ``ln_`` form returning the
natural log of the bound.  Linear forms return ``math.inf`` instead of
overflowing; nothing here returns NaN.  Conditional statements are never
refused: the value is computed and a ``certified`` flag records whether the
hypothesis held.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

FOUR_PI = 4.0 * math.pi
EIGHT_PI = 8.0 * math.pi
LN2 = math.log(2.0)
LN_SQRT2 = 0.5 * LN2
FACTORIAL_CAP = 170

# normalization of the Bergman Kähler class against c1(K + D)
CHERN_NORMALIZATION = "(n+1)/(4 pi)"


class BoundsError(ValueError):
    pass


class VacuousBound(BoundsError):
    """The bound's radicand is not positive, so it says nothing."""


class Certified(NamedTuple):
    value: float
    ln_value: float
    certified: bool
    hypothesis: str


def _linear(fn: Callable[[], float]) -> float:
    try:
        v = fn()
    except OverflowError:
        return math.inf
    if math.isnan(v):
        raise ArithmeticError("evaluator produced NaN")
    return v


def ln_int(k: int) -> float:
    """Natural log of a positive integer of any size, via mantissa/exponent splitting."""
    if k <= 0:
        raise BoundsError("ln_int needs a positive integer")
    shift = max(0, k.bit_length() - 60)
    return math.log(k >> shift) + shift * LN2


def ln_sinh(x: float) -> float:
    if x < 0:
        raise BoundsError("ln_sinh needs x >= 0")
    if x == 0:
        return -math.inf
    if x > 20.0:
        return x - LN2 + math.log1p(-math.exp(-2.0 * x))
    return math.log(math.sinh(x))


def _check_m(m: int) -> None:
    if m < 1:
        raise BoundsError("dimension m must be >= 1")


def _check_sys(sys_: float) -> None:
    if not sys_ >= 0 or math.isnan(sys_):
        raise BoundsError("systole must be nonnegative")


def exact_factorial(n: int) -> int:
    if n > FACTORIAL_CAP:
        raise BoundsError(f"n = {n} exceeds the factorial cap of {FACTORIAL_CAP}")
    return math.factorial(n)


# -- volumes and degrees --------------------------------------------------

def ball_volume_bound(m: int, r: float, mult: float = 1.0) -> float:
    """(4 pi)^m / m! * sinh^{2m}(r) * mult: volume of an m-dimensional subvariety in a Bergman ball."""
    _check_m(m)
    if r <= 0 or mult < 1:
        raise BoundsError("need r > 0 and mult >= 1")
    return _linear(lambda: FOUR_PI ** m / math.factorial(m) * math.sinh(r) ** (2 * m) * mult)


def ln_ball_volume_bound(m: int, r: float, mult: float = 1.0) -> float:
    _check_m(m)
    if r <= 0 or mult < 1:
        raise BoundsError("need r > 0 and mult >= 1")
    return m * math.log(FOUR_PI) - ln_int(math.factorial(m)) + 2 * m * ln_sinh(r) + math.log(mult)


def volume_lower_bound(m: int, sys_: float) -> float:
    _check_m(m)
    _check_sys(sys_)
    return _linear(lambda: FOUR_PI ** m / math.factorial(m) * math.sinh(sys_ / 2.0) ** (2 * m))


def ln_volume_lower_bound(m: int, sys_: float) -> float:
    _check_m(m)
    _check_sys(sys_)
    return m * math.log(FOUR_PI) - ln_int(math.factorial(m)) + 2 * m * ln_sinh(sys_ / 2.0)


def log_degree_lower_bound(m: int, n: int, sys_: float) -> float:
    """Lower bound (n+1)^m sinh^{2m}(sys/2) for the degree of K + D on an m-dimensional subvariety."""
    _check_m(m)
    _check_sys(sys_)
    return _linear(lambda: float(n + 1) ** m * math.sinh(sys_ / 2.0) ** (2 * m))


def ln_log_degree_lower_bound(m: int, n: int, sys_: float) -> float:
    _check_m(m)
    _check_sys(sys_)
    return m * math.log(n + 1) + 2 * m * ln_sinh(sys_ / 2.0)


# -- systole, trace and cusp depth ---------------------------------------

def trace_lower_bound(n: int, sys_: float) -> float:
    """1 - n + sqrt(2) e^{sys/4}: lower bound for |tr| over the hyperbolic trace set."""
    _check_sys(sys_)
    return _linear(lambda: 1 - n + math.sqrt(2.0) * math.exp(sys_ / 4.0))


def ln_trace_lower_bound(n: int, sys_: float) -> float:
    _check_sys(sys_)
    lead = LN_SQRT2 + sys_ / 4.0
    tail = (n - 1) * math.exp(-lead)
    if tail >= 1.0:
        raise VacuousBound("trace lower bound is not positive")
    return lead + math.log1p(-tail)


def depth_from_trace(lam: float, n: int) -> float:
    """min{(lam - n - 1)^(1/4), (lam - n - 1)^(1/2)}."""
    x = lam - n - 1
    if not x > 0:
        raise VacuousBound(f"trace infimum {lam} does not exceed n + 1 = {n + 1}")
    if math.isinf(x):
        return math.inf
    return min(x ** 0.25, x ** 0.5)


def depth_lower_bound(n: int, sys_: float) -> float:
    """Uniform cusp depth bound; literally depth_from_trace(trace_lower_bound(n, sys), n)."""
    return depth_from_trace(trace_lower_bound(n, sys_), n)


def ln_depth_lower_bound(n: int, sys_: float) -> float:
    _check_sys(sys_)
    lead = LN_SQRT2 + sys_ / 4.0
    tail = 2 * n * math.exp(-lead)
    if tail >= 1.0:
        raise VacuousBound("depth radicand is not positive")
    ln_x = lead + math.log1p(-tail)
    return min(ln_x / 4.0, ln_x / 2.0)


def threshold_ample(n: int) -> float:
    """4 ln(5n + (4 pi)^4)."""
    return 4.0 * math.log(5 * n + FOUR_PI ** 4)


def threshold_canonical(n: int) -> float:
    """4 ln(5n + (8 pi)^4)."""
    return 4.0 * math.log(5 * n + EIGHT_PI ** 4)


def threshold_seshadri_locus(n: int) -> float:
    """20 ln(5n + (8 pi)^4)."""
    return 20.0 * math.log(5 * n + EIGHT_PI ** 4)


def threshold_global_generation(n: int) -> float:
    """20 ln(5n + (4 pi)^4)."""
    return 20.0 * math.log(5 * n + FOUR_PI ** 4)


def _exp_term(ln_v: float) -> float:
    return _linear(lambda: math.exp(ln_v))


def degree_lower_bound(m: int, n: int, sys_: float) -> Certified:
    """(n / 4 pi)^m e^{m sys / 16}: degree of K on an m-dimensional subvariety not in the boundary."""
    _check_m(m)
    _check_sys(sys_)
    ln_v = m * (math.log(n / FOUR_PI) + sys_ / 16.0)
    value = _linear(lambda: (n / FOUR_PI) ** m * math.exp(m * sys_ / 16.0))
    return Certified(value, ln_v, sys_ >= threshold_ample(n), "threshold_ample")


def canonical_volume_lower_bound(m: int, sys_: float, n: int) -> Certified:
    """(m / 4 pi)^m e^{m sys / 16}: volume of the canonical bundle of a subvariety."""
    _check_m(m)
    _check_sys(sys_)
    ln_v = m * (math.log(m / FOUR_PI) + sys_ / 16.0)
    value = _linear(lambda: (m / FOUR_PI) ** m * math.exp(m * sys_ / 16.0))
    return Certified(value, ln_v, sys_ >= threshold_canonical(n), "threshold_canonical")


# -- positivity thresholds ------------------------------------------------

def ln_jet_term(n: int, s: int) -> float:
    """n ln((1 + 2n + n!)(n + s)) with the integer product formed exactly."""
    return n * ln_int((1 + 2 * n + exact_factorial(n)) * (n + s))


def very_ampleness_threshold(n: int, s: int = 1) -> float:
    """20 max{n ln((1 + 2n + n!)(n + s)), ln(5n + (8 pi)^4)}."""
    if n < 1 or s < 1:
        raise BoundsError("need n >= 1 and s >= 1")
    return 20.0 * max(ln_jet_term(n, s), math.log(5 * n + EIGHT_PI ** 4))


def full_very_ampleness_threshold(n: int) -> float:
    """20 max{n ln(5n (1 + 2n + n!)), ln(5n + (8 pi)^4)}."""
    if n < 1:
        raise BoundsError("need n >= 1")
    first = n * ln_int(5 * n * (1 + 2 * n + exact_factorial(n)))
    return 20.0 * max(first, math.log(5 * n + EIGHT_PI ** 4))


def boundary_systole_threshold(n: int) -> float:
    """2 sqrt(2n / pi)."""
    return 2.0 * math.sqrt(2.0 * n / math.pi)


def boundary_seshadri_bound(sys_d: float) -> float:
    """(pi / 4) sys(D)^2."""
    return math.pi / 4.0 * sys_d ** 2


def bicanonical_report(n: int, sys_: float) -> dict:
    ok = sys_ >= very_ampleness_threshold(n, 1)
    return {"globallyGenerated2K": ok, "veryAmpleModD2K": ok, "veryAmple3K": ok}


def jets_and_seshadri(n: int, sys_: float, s: int) -> dict:
    if s < 1:
        raise BoundsError("jet order s must be >= 1")
    thr = very_ampleness_threshold(n, s)
    ok = sys_ >= thr
    return {"separatesJets2K": ok, "seshadriLB": s / 2.0 if ok else 0.0, "certified": ok, "threshold": thr}


@dataclass(frozen=True)
class SeshadriThick:
    value: float
    ln_value: float
    locus_threshold: float
    ln_locus_threshold: float
    certified: bool


def seshadri_thick_bound(n: int, sys_: float) -> SeshadriThick:
    """(n+1)/(8 pi) sinh^2(sys/2) on the thick part, with the locus threshold e^{sys/20}."""
    _check_sys(sys_)
    ln_v = math.log((n + 1) / EIGHT_PI) + 2.0 * ln_sinh(sys_ / 2.0)
    value = _linear(lambda: (n + 1) / EIGHT_PI * math.sinh(sys_ / 2.0) ** 2)
    locus = _linear(lambda: math.exp(sys_ / 20.0))
    return SeshadriThick(value, ln_v, locus, sys_ / 20.0, sys_ >= threshold_seshadri_locus(n))


def full_very_ampleness(n: int, sys_: float, sys_d: float | None) -> dict:
    if sys_d is None:
        raise BoundsError("boundary systole sys(D) is required")
    d_thr = boundary_systole_threshold(n)
    s_thr = full_very_ampleness_threshold(n)
    ok = sys_d > d_thr and sys_ >= s_thr
    return {
        "seshadriLB": 2.0 * n if ok else 0.0,
        "veryAmple2K": ok,
        "boundarySeshadriBound": boundary_seshadri_bound(sys_d),
        "sysDThreshold": d_thr,
        "sysThreshold": s_thr,
    }


def sparsity_exponent(n: int, sys_: float, field_degree: int, epsilon: float) -> Certified:
    """4 pi [F:Q] (n+3) (1+eps) / e^{sys/16}; certified only above threshold_ample and for eps > 0."""
    _check_sys(sys_)
    if field_degree < 1 or epsilon < 0:
        raise BoundsError("need [F:Q] >= 1 and epsilon >= 0")
    value = FOUR_PI * field_degree * (n + 3) * (1.0 + epsilon) * math.exp(-sys_ / 16.0)
    ln_v = math.log(FOUR_PI * field_degree * (n + 3)) + math.log1p(epsilon) - sys_ / 16.0
    return Certified(value, ln_v, sys_ >= threshold_ample(n) and epsilon > 0, "threshold_ample")


# -- report --------------------------------------------------------------

@dataclass(frozen=True)
class BoundInputs:
    n: int
    sys: float
    m: int = 1
    s: int = 1
    sys_d: float | None = None
    field_degree: int | None = None
    epsilon: float | None = None

    def __post_init__(self):
        if self.n < 1:
            raise BoundsError("n must be >= 1")
        if not self.sys > 0:
            raise BoundsError("sys must be > 0")
        if not 1 <= self.m <= self.n:
            raise BoundsError("need 1 <= m <= n")
        if self.s < 1:
            raise BoundsError("s must be >= 1")
        if self.field_degree is not None and self.field_degree < 1:
            raise BoundsError("[F:Q] must be >= 1")
        if self.epsilon is not None and self.epsilon < 0:
            raise BoundsError("epsilon must be >= 0")

    def to_json(self) -> dict:
        return {"n": self.n, "sys": self.sys, "m": self.m, "s": self.s, "sysD": self.sys_d,
                "fieldDegree": self.field_degree, "epsilon": self.epsilon}


@dataclass
class BoundReport:
    inputs: dict
    values: dict = field(default_factory=dict)
    ln_values: dict = field(default_factory=dict)
    thresholds: dict = field(default_factory=dict)
    certified: dict = field(default_factory=dict)
    assumptions: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"inputs": dict(self.inputs), "values": dict(self.values), "logValues": dict(self.ln_values),
                "thresholds": dict(self.thresholds), "certified": dict(self.certified),
                "assumptions": [dict(a) for a in self.assumptions]}

    @classmethod
    def from_json(cls, doc: dict) -> "BoundReport":
        return cls(doc["inputs"], doc["values"], doc["logValues"], doc["thresholds"], doc["certified"],
                   doc["assumptions"])


def _safe(fn, *args):
    try:
        return fn(*args)
    except VacuousBound:
        return None


def bound_report(inputs: BoundInputs) -> BoundReport:
    n, sys_, m, s = inputs.n, inputs.sys, inputs.m, inputs.s
    rep = BoundReport(inputs.to_json())
    v, lv, th, cert = rep.values, rep.ln_values, rep.thresholds, rep.certified

    th["ample"] = threshold_ample(n)
    th["canonical"] = threshold_canonical(n)
    th["seshadriLocus"] = threshold_seshadri_locus(n)
    th["globalGeneration"] = threshold_global_generation(n)
    th["veryAmpleness"] = very_ampleness_threshold(n, 1)
    th["jets"] = very_ampleness_threshold(n, s)
    th["fullVeryAmpleness"] = full_very_ampleness_threshold(n)
    th["boundarySystole"] = boundary_systole_threshold(n)

    v["volumeLowerBound"] = volume_lower_bound(m, sys_)
    lv["volumeLowerBound"] = ln_volume_lower_bound(m, sys_)
    v["logDegreeLowerBound"] = log_degree_lower_bound(m, n, sys_)
    lv["logDegreeLowerBound"] = ln_log_degree_lower_bound(m, n, sys_)
    v["traceLowerBound"] = trace_lower_bound(n, sys_)
    lv["traceLowerBound"] = _safe(ln_trace_lower_bound, n, sys_)
    v["depthLowerBound"] = _safe(depth_lower_bound, n, sys_)
    lv["depthLowerBound"] = _safe(ln_depth_lower_bound, n, sys_)
    v["depthComparison"] = _exp_term(sys_ / 16.0)
    lv["depthComparison"] = sys_ / 16.0
    v["thinRadius"] = sys_ / 2.0

    deg = degree_lower_bound(m, n, sys_)
    v["degreeLowerBound"], lv["degreeLowerBound"], cert["degreeLowerBound"] = deg.value, deg.ln_value, deg.certified
    cv = canonical_volume_lower_bound(m, sys_, n)
    v["canonicalVolumeLowerBound"], lv["canonicalVolumeLowerBound"] = cv.value, cv.ln_value
    cert["canonicalVolumeLowerBound"] = cv.certified

    ample = sys_ >= th["ample"]
    cert["depthExceeds4Pi"] = ample
    cert.update(bicanonical_report(n, sys_))
    jets = jets_and_seshadri(n, sys_, s)
    cert["separatesJets2K"] = jets["separatesJets2K"]
    v["jetsSeshadriLowerBound"] = jets["seshadriLB"]

    sesh = seshadri_thick_bound(n, sys_)
    v["seshadriThickBound"], lv["seshadriThickBound"] = sesh.value, sesh.ln_value
    v["seshadriLocusThreshold"], lv["seshadriLocusThreshold"] = sesh.locus_threshold, sesh.ln_locus_threshold
    cert["seshadriThickBound"] = sesh.certified

    if inputs.sys_d is not None:
        full = full_very_ampleness(n, sys_, inputs.sys_d)
        v["fullSeshadriLowerBound"] = full["seshadriLB"]
        v["boundarySeshadriBound"] = full["boundarySeshadriBound"]
        cert["veryAmple2K"] = full["veryAmple2K"]
    if inputs.field_degree is not None and inputs.epsilon is not None:
        sp = sparsity_exponent(n, sys_, inputs.field_degree, inputs.epsilon)
        v["sparsityExponent"], lv["sparsityExponent"], cert["sparsityExponent"] = sp.value, sp.ln_value, sp.certified

    a = rep.assumptions
    a.append({"name": "sysIsCertifiedLowerBound", "holds": True,
              "detail": "sys is taken as a user-certified lower bound for the systole"})
    a.append({"name": "sys>=threshold_ample", "holds": ample, "threshold": th["ample"],
              "usedBy": ["depthExceeds4Pi", "degreeLowerBound", "sparsityExponent"]})
    a.append({"name": "sys>=threshold_canonical", "holds": sys_ >= th["canonical"], "threshold": th["canonical"],
              "usedBy": ["canonicalVolumeLowerBound"]})
    a.append({"name": "sys>=threshold_seshadri_locus", "holds": sesh.certified, "threshold": th["seshadriLocus"],
              "usedBy": ["seshadriThickBound"]})
    a.append({"name": "sys>=very_ampleness_threshold(n,1)", "holds": sys_ >= th["veryAmpleness"],
              "threshold": th["veryAmpleness"], "usedBy": ["globallyGenerated2K", "veryAmpleModD2K", "veryAmple3K"]})
    a.append({"name": "sys>=very_ampleness_threshold(n,s)", "holds": jets["certified"], "threshold": th["jets"],
              "usedBy": ["separatesJets2K"]})
    a.append({"name": "depthRadicandPositive", "holds": v["depthLowerBound"] is not None,
              "usedBy": ["depthLowerBound"]})
    if inputs.sys_d is not None:
        a.append({"name": "sysD>boundary_systole_threshold", "holds": inputs.sys_d > th["boundarySystole"],
                  "threshold": th["boundarySystole"], "usedBy": ["veryAmple2K"]})
        a.append({"name": "sys>=full_very_ampleness_threshold", "holds": sys_ >= th["fullVeryAmpleness"],
                  "threshold": th["fullVeryAmpleness"], "usedBy": ["veryAmple2K"]})
    if inputs.epsilon is not None:
        a.append({"name": "epsilon>0", "holds": inputs.epsilon > 0, "usedBy": ["sparsityExponent"]})
    a.append({"name": "introThresholdVariant", "holds": sys_ >= th["canonical"], "threshold": th["canonical"],
              "detail": "the stronger 8 pi constant sometimes stated for the degree and sparsity results"})
    return rep


TEXT_GROUPS = [
    ("Subvariety volume in a Bergman ball", ["volumeLowerBound"]),
    ("Degree of K + D on subvarieties", ["logDegreeLowerBound"]),
    ("Systole bounds the trace infimum", ["traceLowerBound"]),
    ("Systole bounds the uniform cusp depth", ["depthLowerBound", "depthComparison", "depthExceeds4Pi"]),
    ("Degree of K on subvarieties", ["degreeLowerBound"]),
    ("Volume of the canonical bundle of subvarieties", ["canonicalVolumeLowerBound"]),
    ("Effective global generation and very ampleness",
     ["globallyGenerated2K", "veryAmpleModD2K", "veryAmple3K"]),
    ("Separation of jets", ["separatesJets2K", "jetsSeshadriLowerBound"]),
    ("Seshadri constant on the thick part", ["seshadriThickBound", "seshadriLocusThreshold"]),
    ("Very ampleness of 2K from the boundary systole",
     ["veryAmple2K", "fullSeshadriLowerBound", "boundarySeshadriBound"]),
    ("Sparsity of rational points", ["sparsityExponent"]),
    ("Thin part", ["thinRadius"]),
]


def format_text(rep: BoundReport) -> str:
    lines = ["inputs: " + ", ".join(f"{k}={val}" for k, val in rep.inputs.items() if val is not None)]
    for title, keys in TEXT_GROUPS:
        rows = []
        for k in keys:
            if k in rep.values:
                val = rep.values[k]
                ln_v = rep.ln_values.get(k)
                s = "n/a (vacuous)" if val is None else f"{val:.10g}"
                if ln_v is not None:
                    s += f"  [ln = {ln_v:.10g}]"
                cert = rep.certified.get(k)
                if cert is not None:
                    s += "  certified" if cert else "  NOT certified"
                rows.append(f"  {k}: {s}")
            elif k in rep.certified:
                rows.append(f"  {k}: {'yes' if rep.certified[k] else 'NOT certified'}")
        if rows:
            lines.append(title)
            lines.extend(rows)
    lines.append("thresholds")
    lines.extend(f"  {k}: {val:.10g}" for k, val in rep.thresholds.items())
    lines.append("assumptions")
    lines.extend(f"  [{'x' if a['holds'] else ' '}] {a['name']}" for a in rep.assumptions)
    return "\n".join(lines)


def report_dict(inputs: BoundInputs) -> dict:
    return bound_report(inputs).to_json()

