import copy
import math

import numpy as np
import pytest

from cusp_certify.hermitian import InvalidInput, MembershipError, matrix_to_json
from cusp_certify.isometry import (
    HeisenbergElement, commutator, fixes_infinity, heisenberg_to_matrix, swap_form, u_product_bound,
)
from cusp_certify.lattice import (
    BallCapExceeded, LatticeError, abs_trace, census, cusp_stats, load_lattice, stabilizer_elements,
    thin_membership, thin_radius, word_ball,
)
from cusp_certify.siegel import SiegelPoint, act


def keys(ball):
    return {np.round(e.normal_form, 8).tobytes() for e in ball.elements}


def test_load_synthetic(synthetic2):
    spec = load_lattice(synthetic2)
    assert spec.n == 2 and len(spec.generators) == 6
    assert spec.names == ["vert2", "swap1", "dil2", "vert2^-1", "swap1^-1", "dil2^-1"]
    assert all(g.element.residual <= 1e-8 for g in spec.generators)


def test_load_rejects_bad_documents(synthetic2):
    doc = copy.deepcopy(synthetic2)
    doc["generators"][1]["matrix"] = matrix_to_json(np.diag([2, 1, 1]))
    with pytest.raises(MembershipError, match="swap1"):
        load_lattice(doc)
    with pytest.raises(LatticeError):
        load_lattice({"n": 2, "generators": []})
    with pytest.raises(LatticeError):
        load_lattice({"n": 3, "generators": synthetic2["generators"]})
    with pytest.raises(LatticeError):
        load_lattice([1, 2])


def test_ball_small_lengths(synthetic2):
    spec = load_lattice(synthetic2)
    b1 = word_ball(spec, 1)
    # the swap is an involution, so its formal inverse merges with it
    assert len(b1) == 6
    assert b1.elements[0].word == ()
    b2 = word_ball(spec, 2)
    assert len(b2) < 6 ** 2 + 7
    swap = spec.generators[1].element
    sq = np.round((swap @ swap).normal_form, 8).tobytes()
    assert sq in keys(b2) and fixes_infinity(swap @ swap)
    with pytest.raises(InvalidInput):
        word_ball(spec, 0)
    with pytest.raises(InvalidInput):
        word_ball(spec, 13)


def test_ball_monotone_residuals_and_shortest_words(synthetic2):
    spec = load_lattice(synthetic2)
    balls = [word_ball(spec, k) for k in range(1, 5)]
    for a, b in zip(balls, balls[1:]):
        assert keys(a) <= keys(b)
    last = balls[-1]
    assert max(e.residual for e in last.elements) <= 1e-7
    lengths = [len(e.word) for e in last.elements]
    assert lengths == sorted(lengths)
    for layer, start in enumerate(last.layer_starts):
        assert all(len(e.word) >= layer for e in last.elements[start:])


def test_ball_deterministic_across_threads(synthetic2):
    spec = load_lattice(synthetic2)
    ref = word_ball(spec, 4).words()
    for k in (2, 8):
        assert word_ball(spec, 4, threads=k).words() == ref


def test_cap_and_resume(synthetic2):
    spec = load_lattice(synthetic2)
    with pytest.raises(BallCapExceeded) as info:
        word_ball(spec, 4, cap=50)
    token = info.value.token
    assert token["completedLength"] == 2 and len(info.value.partial) <= 50
    resumed = word_ball(spec, 4, resume=token)
    assert resumed.words() == word_ball(spec, 4).words()


def test_census_synthetic(synthetic2):
    spec = load_lattice(synthetic2)
    c2 = census(word_ball(spec, 2), spec)
    assert c2.sys_upper_estimate <= 2.032790 + 1e-6
    assert c2.sys_upper_estimate == pytest.approx(2 * math.acosh(25 / 16), abs=1e-12)
    assert sum(c2.counts.values()) == c2.element_count
    assert c2.lambda_estimate == min(c2.trace_spectrum)
    c4 = census(word_ball(spec, 4), spec)
    assert any(abs(x - 4.0) < 1e-9 for x in c4.trace_spectrum)
    for x in c2.hyperbolic_length_spectrum:
        assert min(abs(x - y) for y in c4.hyperbolic_length_spectrum) <= 1e-9
    assert c4.sys_upper_estimate <= c2.sys_upper_estimate


def test_commutator_with_swap_is_in_ball(synthetic2):
    spec = load_lattice(synthetic2)
    g, s = spec.generators[0].element.matrix, spec.generators[1].element.matrix
    comm = commutator(g, s)
    ball = word_ball(spec, 4)
    hits = [e for e in ball.elements if np.allclose(e.normal_form, comm / comm.flat[np.argmax(np.abs(comm))])]
    assert hits and len(hits[0].word) == 4
    assert abs_trace(hits[0]) == pytest.approx(4.0, abs=1e-12)


def test_census_heisenberg_only():
    gens = [{"name": "a", "matrix": matrix_to_json(heisenberg_to_matrix(HeisenbergElement((1 + 0j,), 0)).matrix)},
            {"name": "b", "matrix": matrix_to_json(heisenberg_to_matrix(HeisenbergElement((1j,), 0)).matrix)}]
    spec = load_lattice({"n": 2, "generators": gens, "cusp": "infinity"})
    c = census(word_ball(spec, 3), spec)
    assert c.sys_upper_estimate is None and c.counts["hyperbolic"] == 0
    assert c.lambda_estimate is None
    assert c.cusp_stats.c_min_non_stabilizer is None


def test_cusp_stats(synthetic2):
    spec = load_lattice(synthetic2)
    s1 = cusp_stats(word_ball(spec, 1), spec)
    assert s1.t_min_vertical == pytest.approx(2.0)
    assert s1.c_min_non_stabilizer <= 1.0
    assert s1.depth_estimate == pytest.approx(1.0)
    s2 = cusp_stats(word_ball(spec, 2), spec)
    assert s2.t_min_vertical == pytest.approx(2.0)
    assert s2.to_json()["oneSided"] is True


def test_thin_membership_examples():
    g = [heisenberg_to_matrix(HeisenbergElement.vertical(2.0))]
    assert thin_membership(SiegelPoint((0j,), 0, 10), g, 1.0)
    assert not thin_membership(SiegelPoint((0j,), 0, 0.1), g, 1.0)
    assert not thin_membership(SiegelPoint((0j,), 0, 10), [], 1.0)
    with pytest.raises(InvalidInput):
        thin_membership(SiegelPoint((0j,), 0, 10), [swap_form(1.0)], 1.0)
    assert thin_radius(2.0) == 1.0


def test_stabilizer_elements_exclude_identity(synthetic2):
    spec = load_lattice(synthetic2)
    stab = stabilizer_elements(word_ball(spec, 2))
    assert stab and all(fixes_infinity(e) for e in stab)
    assert all(np.linalg.norm(e.normal_form - np.eye(3)) > 1e-6 for e in stab)


def test_u_product_sweep_over_ball(synthetic2, rng):
    spec = load_lattice(synthetic2)
    for g in word_ball(spec, 3).elements:
        if fixes_infinity(g):
            continue
        bound = u_product_bound(g)
        for _ in range(10):
            p = SiegelPoint((complex(*rng.normal(size=2)),), rng.normal(), math.exp(rng.normal()))
            assert p.u * act(g, p).u <= bound + 1e-8
