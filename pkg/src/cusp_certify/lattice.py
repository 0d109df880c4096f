"""Generator sets, word-ball enumeration and census statistics.

Every infimum over the group (systole, trace infimum, cusp data) is estimated
from a finite ball of words, so every reported figure is one-sided and is
labelled as such.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .hermitian import (
    GroupElement,
    HermitianForm,
    InvalidInput,
    MembershipError,
    matrix_from_json,
    membership_residual,
    standard_form,
)
from .isometry import (
    IndeterminateClassification,
    bottom_left,
    classify,
    fixes_infinity,
    length_from_r,
    unit_determinant,
    vertical_translation_length,
)
from .siegel import SiegelPoint, act, distance

log = logging.getLogger(__name__)

DEFAULT_TOLERANCES = {
    "membership": 1e-8,
    "dedup": 1e-8,
    "classify": 1e-9,
    "spectrum": 1e-9,
}
DEFAULT_CAP = 1_000_000
MAX_WORD_LENGTH = 12

ONE_SIDED_NOTES = {
    "sysUpperEstimate": "upper bound for sys(X): minimum over a finite ball, not over the group",
    "lambdaEstimate": "upper bound for the trace infimum over S_Gamma",
    "tMinVertical": "upper bound for the shortest vertical translation t_inf",
    "cMinNonStabilizer": "upper bound for c_m, the minimal |c| off the stabilizer",
    "depthEstimate": "empirical t*c/2 from ball minima; not a certified depth bound",
}


class LatticeError(InvalidInput):
    pass


@dataclass(frozen=True)
class Generator:
    name: str
    element: GroupElement


@dataclass(frozen=True)
class LatticeSpec:
    n: int
    generators: tuple[Generator, ...]
    cusp: str | None = None
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))

    @property
    def names(self) -> list[str]:
        return [g.name for g in self.generators]


def _inverse_name(name: str) -> str:
    return name[:-3] if name.endswith("^-1") else name + "^-1"


def load_lattice(doc: dict) -> LatticeSpec:
    """Validate a lattice document and close its generator list under inversion."""
    if not isinstance(doc, dict):
        raise LatticeError("lattice document must be a JSON object")
    try:
        n = int(doc["n"])
        gens = doc["generators"]
    except (KeyError, TypeError, ValueError) as exc:
        raise LatticeError(f"malformed lattice document: {exc}") from exc
    if n < 1:
        raise LatticeError("n must be >= 1")
    if not isinstance(gens, list) or not gens:
        raise LatticeError("generator list is empty")
    tolerances = dict(DEFAULT_TOLERANCES)
    tolerances.update(doc.get("tolerances") or {})
    cusp = doc.get("cusp")
    if cusp not in (None, "infinity"):
        raise LatticeError(f"unsupported cusp designation {cusp!r}")
    form = HermitianForm.standard(n)
    out: list[Generator] = []
    for k, g in enumerate(gens):
        if not isinstance(g, dict) or "matrix" not in g:
            raise LatticeError(f"generator #{k} has no matrix")
        name = str(g.get("name", f"g{k}"))
        m = matrix_from_json(g["matrix"])
        if m.shape[0] != n + 1:
            raise LatticeError(f"generator {name!r} has dimension {m.shape[0]}, expected {n + 1}")
        try:
            el = GroupElement.from_matrix(m, form, tol=tolerances["membership"])
        except MembershipError as exc:
            raise MembershipError(f"generator {name!r} is not in U(Q): residual {exc.residual:.3e}",
                                  exc.residual) from exc
        out.append(Generator(name, el))
    out += [Generator(_inverse_name(g.name), g.element.inverse()) for g in list(out)]
    return LatticeSpec(n, tuple(out), cusp, tolerances)


@dataclass
class WordBall:
    spec: LatticeSpec
    max_length: int
    elements: list[GroupElement]
    layer_starts: list[int]

    def __len__(self) -> int:
        return len(self.elements)

    def words(self, named: bool = False) -> list:
        if not named:
            return [list(e.word) for e in self.elements]
        names = self.spec.names
        return [[names[i] for i in e.word] for e in self.elements]


class BallCapExceeded(RuntimeError):
    """Enumeration hit the element cap; carries the partial ball and a resume token."""

    def __init__(self, partial: WordBall, token: dict):
        super().__init__(f"word ball exceeded the cap of {token['cap']} elements "
                         f"after completing length {token['completedLength']}")
        self.partial = partial
        self.token = token


class _DedupStore:
    def __init__(self, tol: float):
        self.tol = tol
        self.decimals = max(0, int(round(-math.log10(tol))))
        self.buckets: dict[bytes, list[int]] = {}
        self.elements: list[GroupElement] = []

    def key(self, el: GroupElement) -> bytes:
        nf = el.normal_form
        parts = np.round(np.concatenate([nf.real.ravel(), nf.imag.ravel()]), self.decimals) + 0.0
        return parts.tobytes()

    def add(self, el: GroupElement) -> bool:
        k = self.key(el)
        bucket = self.buckets.setdefault(k, [])
        for idx in bucket:
            if np.linalg.norm(self.elements[idx].normal_form - el.normal_form) < 10 * self.tol:
                return False
        bucket.append(len(self.elements))
        self.elements.append(el)
        return True


def _times(el: GroupElement, gen_index: int, gen: GroupElement, j: np.ndarray) -> GroupElement:
    prod = el.matrix @ gen.matrix
    return GroupElement._trusted(prod, membership_residual(j, prod), el.word + (gen_index,))


def word_ball(spec: LatticeSpec, length: int, dedup_tol: float | None = None, cap: int = DEFAULT_CAP,
              threads: int = 1, resume: dict | None = None) -> WordBall:
    """Breadth-first enumeration of all words of length <= ``length``.

    Elements are deduplicated by their projective normal form; each keeps a
    shortest witnessing word.  Products are computed in parallel per layer but
    inserted in a fixed (frontier, generator) order, so the output does not
    depend on ``threads``.
    """
    if length < 1:
        raise InvalidInput("word length must be >= 1")
    if length > MAX_WORD_LENGTH:
        raise InvalidInput(f"word length is capped at {MAX_WORD_LENGTH}")
    tol = dedup_tol if dedup_tol is not None else spec.tolerances["dedup"]
    j = standard_form(spec.n)
    gens = [g.element for g in spec.generators]
    store = _DedupStore(tol)
    start_layer = 1
    layer_starts = [0]
    if resume is None:
        store.add(GroupElement._trusted(np.eye(spec.n + 1, dtype=np.complex128), 0.0, ()))
    else:
        for w in resume["words"]:
            m = np.eye(spec.n + 1, dtype=np.complex128)
            for i in w:
                m = m @ gens[i].matrix
            store.add(GroupElement._trusted(m, membership_residual(j, m), tuple(w)))
        layer_starts = list(resume["layerStarts"])
        start_layer = int(resume["completedLength"]) + 1

    def expand(chunk: Sequence[GroupElement]) -> list[GroupElement]:
        return [_times(el, gi, g, j) for el in chunk for gi, g in enumerate(gens)]

    for layer in range(start_layer, length + 1):
        frontier = store.elements[layer_starts[-1]:]
        if threads > 1 and len(frontier) > 1:
            size = math.ceil(len(frontier) / threads)
            chunks = [frontier[i:i + size] for i in range(0, len(frontier), size)]
            with ThreadPoolExecutor(max_workers=threads) as ex:
                products = [p for part in ex.map(expand, chunks) for p in part]
        else:
            products = expand(frontier)
        new_start = len(store.elements)
        for p in products:
            if store.add(p) and len(store.elements) > cap:
                del store.elements[new_start:]
                partial = WordBall(spec, layer - 1, store.elements, layer_starts)
                token = {
                    "maxLength": length,
                    "completedLength": layer - 1,
                    "cap": cap,
                    "layerStarts": layer_starts,
                    "words": [list(e.word) for e in store.elements],
                }
                raise BallCapExceeded(partial, token)
        layer_starts = layer_starts + [new_start]
    return WordBall(spec, length, store.elements, layer_starts)


def dedup_spectrum(values: Iterable[float], resolution: float = 1e-9) -> list[float]:
    out: list[float] = []
    for v in sorted(values):
        if not out or v - out[-1] > resolution:
            out.append(v)
    return out


def abs_trace(el: GroupElement) -> float:
    """|tr| of the unit-|det| representative."""
    return float(abs(np.trace(unit_determinant(el))))


@dataclass(frozen=True)
class CuspStats:
    t_min_vertical: float | None
    c_min_non_stabilizer: float | None
    depth_estimate: float | None

    def to_json(self) -> dict:
        return {
            "tMinVertical": self.t_min_vertical,
            "cMinNonStabilizer": self.c_min_non_stabilizer,
            "depthEstimate": self.depth_estimate,
            "oneSided": True,
        }


def cusp_stats(ball: WordBall | Sequence[GroupElement], spec: LatticeSpec | None = None) -> CuspStats:
    """Ball minima of vertical translation lengths and of |c| off the stabilizer of q_inf."""
    elements = ball.elements if isinstance(ball, WordBall) else list(ball)
    spec = spec or (ball.spec if isinstance(ball, WordBall) else None)
    if spec is not None and spec.cusp != "infinity":
        raise LatticeError("cusp statistics need the cusp designated at infinity")
    ts = []
    cs = []
    for el in elements:
        if fixes_infinity(el):
            t = vertical_translation_length(el)
            if t is not None:
                ts.append(float(abs(t)))
        else:
            cs.append(float(abs(bottom_left(el))))
    t_min = min(ts) if ts else None
    c_min = min(cs) if cs else None
    depth = t_min * c_min / 2.0 if t_min is not None and c_min is not None else None
    return CuspStats(t_min, c_min, depth)


@dataclass(frozen=True)
class WordBallCensus:
    max_length: int
    element_count: int
    counts: dict
    hyperbolic_length_spectrum: list
    trace_spectrum: list
    sys_upper_estimate: float | None
    lambda_estimate: float | None
    cusp_stats: CuspStats | None
    indeterminate: list
    n: int

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "maxLength": self.max_length,
            "elementCount": self.element_count,
            "counts": dict(self.counts),
            "hyperbolicLengthSpectrum": list(self.hyperbolic_length_spectrum),
            "traceSpectrum": list(self.trace_spectrum),
            "sysUpperEstimate": self.sys_upper_estimate,
            "lambdaEstimate": self.lambda_estimate,
            "cuspStats": None if self.cusp_stats is None else self.cusp_stats.to_json(),
            "indeterminate": list(self.indeterminate),
            "oneSided": {k: v for k, v in ONE_SIDED_NOTES.items()},
        }


def _classify_one(el: GroupElement, tol: float):
    try:
        return classify(el, tol)
    except IndeterminateClassification as exc:
        return exc


def census(ball: WordBall, spec: LatticeSpec | None = None, threads: int = 1) -> WordBallCensus:
    spec = spec or ball.spec
    tol = spec.tolerances["classify"]
    res_tol = spec.tolerances["spectrum"]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            classes = list(ex.map(lambda e: _classify_one(e, tol), ball.elements))
    else:
        classes = [_classify_one(e, tol) for e in ball.elements]
    counts = {"elliptic": 0, "parabolic": 0, "hyperbolic": 0, "indeterminate": 0}
    lengths = []
    traces = []
    indeterminate = []
    names = spec.names
    trace_floor = (spec.n + 1) * (1.0 + 1e-9)
    for el, cls in zip(ball.elements, classes):
        if isinstance(cls, IndeterminateClassification):
            counts["indeterminate"] += 1
            indeterminate.append({"word": [names[i] for i in el.word], "candidates": list(cls.candidates)})
            continue
        counts[cls.kind] += 1
        if cls.kind == "hyperbolic":
            lengths.append(float(length_from_r(cls.r)))
        tr = abs_trace(el)
        if tr > trace_floor:
            traces.append(tr)
    lengths = dedup_spectrum(lengths, res_tol)
    traces = dedup_spectrum(traces, res_tol)
    if indeterminate:
        log.warning("%d elements could not be classified", len(indeterminate))
    cstats = cusp_stats(ball, spec) if spec.cusp == "infinity" else None
    return WordBallCensus(
        ball.max_length, len(ball), counts, lengths, traces,
        lengths[0] if lengths else None, traces[0] if traces else None,
        cstats, indeterminate, spec.n,
    )


def stabilizer_elements(ball: WordBall | Sequence[GroupElement]) -> list[GroupElement]:
    """Ball elements fixing q_inf, excluding the identity class."""
    elements = ball.elements if isinstance(ball, WordBall) else list(ball)
    return [e for e in elements if fixes_infinity(e) and not _is_identity(e)]


def _is_identity(el: GroupElement, tol: float = 1e-10) -> bool:
    nf = el.normal_form
    return float(np.linalg.norm(nf - np.eye(nf.shape[0]))) <= tol


def thin_membership(p: SiegelPoint, stabilizer: Sequence[GroupElement], rho: float) -> bool:
    """Witness that ``p`` is displaced less than ``rho`` by some stabilizer element.

    True certifies membership of the thin neighbourhood; False only means no
    witness was found among the supplied elements.
    """
    if rho <= 0:
        raise InvalidInput("rho must be positive")
    for g in stabilizer:
        if not fixes_infinity(g):
            raise InvalidInput("thin-membership elements must fix q_inf")
        if _is_identity(g):
            continue
        if distance(p, act(g, p)) < rho:
            return True
    return False


def thin_overlap(p: SiegelPoint, stab_a: Sequence[GroupElement], stab_b: Sequence[GroupElement],
                 rho: float, to_b: GroupElement | None = None) -> bool:
    """Whether ``p`` is witnessed in the rho-thin sets of two different cusps.

    ``stab_b`` is given for a cusp moved to q_inf by ``to_b``; below half the
    systole the two thin sets cannot meet, so True flags an inconsistency.
    """
    q = act(to_b, p) if to_b is not None else p
    return thin_membership(p, stab_a, rho) and thin_membership(q, stab_b, rho)


def thin_radius(sys_lower: float) -> float:
    """Radius rho = sys/2 defining the thin part; the thick part is nonempty at this radius."""
    if sys_lower <= 0:
        raise InvalidInput("systole must be positive")
    return sys_lower / 2.0


def census_from_document(doc: dict, length: int, threads: int = 1, cap: int = DEFAULT_CAP) -> WordBallCensus:
    spec = load_lattice(doc)
    return census(word_ball(spec, length, cap=cap, threads=threads), spec, threads=threads)
