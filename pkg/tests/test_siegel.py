import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cusp_certify.hermitian import InvalidInput, form_value, standard_form
from cusp_certify.isometry import HeisenbergElement, dilation, heisenberg_to_matrix, random_member, swap_form
from cusp_certify.siegel import (
    Horoball, OracleBudget, OutsideDomain, PointAtInfinity, SiegelPoint, act, distance, distance_lower_bound,
    embed, horoball_contains, horoballs_disjoint, horoballs_intersect_witness, min_displacement_oracle,
    swap_height, swap_height_sup, unembed,
)

mp.mp.dps = 40
O = SiegelPoint((0j,), 0.0, 1.0)


def projective_distance_mp(p: SiegelPoint, q: SiegelPoint) -> float:
    """High-precision distance from the form: 2 acosh(|<z,w>|^2 / (Q(z) Q(w)))."""
    def lift(s):
        zeta = [mp.mpc(z.real, z.imag) for z in s.zeta]
        nz = sum(abs(z) ** 2 for z in zeta)
        return [(-nz - s.u + 1j * s.v) / 2] + zeta + [mp.mpc(1)]

    def herm(a, b):
        k = len(a) - 1
        return mp.conj(a[0]) * b[k] + mp.conj(a[k]) * b[0] + sum(mp.conj(a[i]) * b[i] for i in range(1, k))

    z, w = lift(p), lift(q)
    arg = abs(herm(z, w)) ** 2 / (herm(z, z).real * herm(w, w).real)
    return float(2 * mp.acosh(arg))


def test_embed_examples():
    np.testing.assert_array_equal(embed(O), [-0.5, 0, 1])
    np.testing.assert_array_equal(embed(SiegelPoint((0j,), 0, 0)), [0, 0, 1])
    np.testing.assert_allclose(embed(SiegelPoint((1 + 0j,), 2, 3)), [-2 + 1j, 1, 1])
    with pytest.raises(OutsideDomain):
        embed(SiegelPoint((0j,), 0, -1))


def test_unembed_examples():
    assert unembed([-0.5, 0, 1]) == O
    assert unembed([-2 + 1j, 1, 1]) == SiegelPoint((1 + 0j,), 2, 3)
    with pytest.raises(PointAtInfinity):
        unembed([1, 0, 0])
    with pytest.raises(OutsideDomain):
        unembed([1, 0, 1])


def test_unembed_is_projective():
    z = embed(SiegelPoint((0.3 - 0.2j,), -1.5, 0.7))
    p = unembed((2 - 3j) * z)
    assert p.u == pytest.approx(0.7, rel=1e-12) and p.v == pytest.approx(-1.5, rel=1e-12)


def test_distance_examples():
    assert distance(O, O) == 0.0
    assert distance(O, SiegelPoint((0j,), 0, 4)) == pytest.approx(2 * math.acosh(25 / 16), abs=1e-10)
    a, b = SiegelPoint((0j,), 1.0, 2.0), SiegelPoint((0j,), -1.0, 2.0)
    assert distance(a, b) > 0 and distance_lower_bound(2.0, 2.0) == 0.0
    with pytest.raises(InvalidInput):
        distance(O, SiegelPoint((0j,), 0, 0))


def test_lower_bound_examples():
    assert distance_lower_bound(1, 1) == 0
    assert distance_lower_bound(1, 4) == pytest.approx(2.0326961933568075, abs=1e-12)
    with pytest.raises(InvalidInput):
        distance_lower_bound(0, 1)


def test_distance_matches_high_precision_form(rng):
    for _ in range(200):
        n = int(rng.integers(2, 5))
        p = SiegelPoint(tuple(rng.normal(size=n - 1) + 1j * rng.normal(size=n - 1)), rng.normal(),
                        math.exp(rng.normal()))
        q = SiegelPoint(tuple(rng.normal(size=n - 1) + 1j * rng.normal(size=n - 1)), rng.normal(),
                        math.exp(rng.normal()))
        ref = projective_distance_mp(p, q)
        assert distance(p, q) == pytest.approx(ref, rel=1e-10, abs=1e-12)


def test_act_examples():
    p = SiegelPoint((0.4 + 0.1j,), 0.3, 1.7)
    q = act(np.eye(3), p)
    assert q.zeta == p.zeta and q.v == p.v and q.u == pytest.approx(p.u, rel=1e-15)
    q = act(dilation(2.0), O)
    assert (q.zeta, q.v, q.u) == ((0j,), 0.0, 4.0)
    # the coordinate action is derived from the matrix: g_inf(0, t) shifts v by -t
    q = act(heisenberg_to_matrix(HeisenbergElement.vertical(2.0)), O)
    assert q.v == pytest.approx(-2.0) and q.u == pytest.approx(1.0)
    with pytest.raises(PointAtInfinity):
        act(swap_form(1.0), SiegelPoint((0j,), 0, 0))


def test_horoball_examples():
    p = SiegelPoint((0j,), 0, 2)
    assert horoball_contains(Horoball("infinity", 1), p)
    assert swap_height(p) == pytest.approx(2.0)
    assert horoball_contains(Horoball("zero", 1), p)
    assert not horoball_contains(Horoball("zero", 5), p)
    assert horoballs_disjoint(2, 2)
    assert not horoballs_disjoint(1, 1)
    with pytest.raises(InvalidInput):
        Horoball("infinity", 0)
    with pytest.raises(InvalidInput):
        horoballs_disjoint(0, 1)


def test_swap_height_is_height_after_standard_swap(rng):
    s = swap_form(1.0)
    for _ in range(50):
        p = SiegelPoint((complex(*rng.normal(size=2)),), rng.normal(), math.exp(rng.normal()))
        assert swap_height(p) == pytest.approx(act(s, p).u, rel=1e-10)


def test_sampler_supremum_and_witness():
    r = swap_height_sup(0.5)
    assert r.sup == pytest.approx(8.0, rel=1e-3)
    w = horoballs_intersect_witness(1.0, 1.0)
    assert w is not None and w.u > 1.0 and swap_height(w) > 1.0
    assert horoballs_intersect_witness(2.5, 2.0) is None


def test_oracle_identity_and_dilation():
    assert min_displacement_oracle(np.eye(3), OracleBudget(starts=4)).value == pytest.approx(0.0, abs=1e-9)
    res = min_displacement_oracle(dilation(2.0))
    assert res.converged
    assert res.value == pytest.approx(2 * math.acosh(25 / 16), abs=1e-4)


def test_oracle_parabolic_tends_to_zero():
    g = heisenberg_to_matrix(HeisenbergElement.vertical(2.0))
    values = [min_displacement_oracle(g, OracleBudget(starts=8, max_sweeps=s)).value for s in (1, 5, 50)]
    assert values[-1] < 1e-2
    assert values[0] >= values[-1]


def test_oracle_monotone_in_starts(rng):
    m = random_member(2, rng, scale=0.7)
    vals = [min_displacement_oracle(m, OracleBudget(starts=k)).value for k in (4, 16, 64)]
    assert vals[0] >= vals[1] >= vals[2]


seeds = st.integers(min_value=0, max_value=2**32 - 1)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_round_trip_and_form_value(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 5))
    p = SiegelPoint(tuple(rng.normal(size=n - 1) + 1j * rng.normal(size=n - 1)), 3 * rng.normal(),
                    math.exp(2 * rng.normal()))
    q = unembed(embed(p))
    scale = max(1.0, abs(p.v), p.u, float(np.linalg.norm(p.zeta_array)) ** 2)
    assert abs(q.u - p.u) <= 1e-12 * scale and abs(q.v - p.v) <= 1e-12 * scale
    assert form_value(standard_form(n), embed(p)) == pytest.approx(-p.u, rel=1e-12, abs=1e-12 * scale)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_isometry_invariance_and_dominance(seed):
    rng = np.random.default_rng(seed)
    g = random_member(2, rng, scale=0.5, factors=2)
    p = SiegelPoint((complex(*rng.normal(size=2)),), rng.normal(), math.exp(rng.normal()))
    q = SiegelPoint((complex(*rng.normal(size=2)),), rng.normal(), math.exp(rng.normal()))
    d = distance(p, q)
    assert abs(distance(act(g, p), act(g, q)) - d) <= 1e-8 * max(1.0, d)
    assert distance(q, p) == pytest.approx(d, abs=1e-12)
    assert d >= distance_lower_bound(p.u, q.u) - 1e-10


def test_siegel_point_json_round_trip():
    p = SiegelPoint((1 - 2j, 0.5j), 0.25, 3.0)
    assert SiegelPoint.from_json(p.to_json()) == p
    q = SiegelPoint.unpack(p.pack())
    assert q.zeta == p.zeta and q.v == p.v and q.u == pytest.approx(3.0, rel=1e-15)
    with pytest.raises(InvalidInput):
        SiegelPoint.from_json({"zeta": [], "v": 0})
