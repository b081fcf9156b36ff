"""Envelope construction, segment interpolants, and convex combination."""

import math

import numpy as np
import pytest

from openconvex import chain, interpolation
from openconvex.bounds import PointData
from openconvex.errors import InfeasibleData, MismatchError, RangeError
from openconvex.interpolation import (
    build_segment_interpolant,
    combine,
    envelope_eval,
    eval_interpolant,
    make_envelope,
    two_point_feasible,
)


def _pd(x, f, g):
    return PointData(x=np.asarray(x, float), f=f, g=np.asarray(g, float))


class TestTwoPointFeasible:
    def test_quadratic_data(self):
        # samples of ||z||^2/2 are always interpolable at L = 1
        p0 = _pd([0.0, 0.0], 0.0, [0.0, 0.0])
        p1 = _pd([1.0, 2.0], 2.5, [1.0, 2.0])
        assert two_point_feasible(1.0, p0, p1)

    def test_counterexample_pair_infeasible(self):
        p0 = _pd([0.0, 0.0], 0.0, [0.0, 0.0])
        p1 = _pd([2.0, 0.0], 16991.0 / 23040.0,
                 [253.0 / 240.0, 77.0 / 120.0])
        assert not two_point_feasible(1.0, p0, p1)

    def test_value_window(self):
        p0 = _pd([0.0], 0.0, [0.0])
        x1, g1 = [1.0], [0.5]
        # window is [g1^2/(2L) .. g1 - g1^2/(2L)] = [0.125, 0.375]
        assert two_point_feasible(1.0, p0, _pd(x1, 0.125, g1))
        assert two_point_feasible(1.0, p0, _pd(x1, 0.375, g1))
        assert not two_point_feasible(1.0, p0, _pd(x1, 0.1249, g1))
        assert not two_point_feasible(1.0, p0, _pd(x1, 0.3751, g1))


class TestEnvelope:
    def test_coincident_surrogates(self):
        # both surrogates equal ||z||^2/2: envelope is that quadratic
        p0 = _pd([0.0, 0.0], 0.0, [0.0, 0.0])
        p1 = _pd([1.0, 0.0], 0.5, [1.0, 0.0])
        env = make_envelope(1.0, p0, p1)
        for z in ([0.3, 0.0], [0.5, 0.4], [1.0, 0.0]):
            v, g = envelope_eval(env, z)
            z = np.asarray(z)
            assert v == pytest.approx(0.5 * float(z @ z), abs=1e-12)
            assert np.allclose(g, z, atol=1e-12)

    def test_hand_derived_tangency_window(self):
        # q0(z) = z^2/2 and q1(z) = (z - 1/2)^2/2 + 1/8 share the tangent
        # line y = z/4 - 1/32, touching at z = 1/4 and z = 3/4
        p0 = _pd([0.0], 0.0, [0.0])
        p1 = _pd([1.0], 0.25, [0.5])
        assert two_point_feasible(1.0, p0, p1)
        env = make_envelope(1.0, p0, p1)
        assert env.t_lo == pytest.approx(0.25, abs=1e-12)
        assert env.t_hi == pytest.approx(0.75, abs=1e-12)
        # before the window the envelope equals q0
        v, g = envelope_eval(env, [0.1])
        assert v == pytest.approx(0.005, abs=1e-12)
        assert g[0] == pytest.approx(0.1, abs=1e-12)
        # inside the window it is the tangent line
        for z in (0.5, 0.6):
            v, g = envelope_eval(env, [z])
            assert v == pytest.approx(0.25 * z - 0.03125, abs=1e-12)
            assert g[0] == pytest.approx(0.25, abs=1e-12)
        # past the window it equals q1
        v, g = envelope_eval(env, [0.9])
        assert v == pytest.approx(0.205, abs=1e-12)
        assert g[0] == pytest.approx(0.4, abs=1e-12)

    def test_envelope_dominated_by_surrogates(self):
        rng = np.random.default_rng(2)
        for _ in range(30):
            p0 = _pd(rng.normal(size=2), 0.0, 0.3 * rng.normal(size=2))
            x1 = p0.x + rng.normal(size=2)
            g1 = 0.3 * rng.normal(size=2)
            d = x1 - p0.x
            quad = float((p0.g - g1) @ (p0.g - g1)) / 2.0
            lo = p0.f + float(p0.g @ d) + quad
            hi = p0.f + float(g1 @ d) - quad
            if lo > hi:
                continue
            p1 = _pd(x1, 0.5 * (lo + hi), g1)
            env = make_envelope(1.0, p0, p1)
            for t in np.linspace(0.0, 1.0, 11):
                z = p0.x + t * d
                v, _ = envelope_eval(env, z)
                assert v <= env.q0(z) + 1e-10
                assert v <= env.q1(z) + 1e-10

    def test_infeasible_pair_rejected(self):
        p0 = _pd([0.0], 0.0, [0.0])
        with pytest.raises(InfeasibleData):
            make_envelope(1.0, p0, _pd([1.0], 0.0, [0.5]))


class TestSegmentInterpolant:
    def _interp(self, s, N, direction):
        spec = chain.normalized_spec(s, N, direction)
        res = chain.solve_spec(spec)
        assert res.status == chain.OPTIMAL
        return build_segment_interpolant(spec.L, res.chain), res

    def test_knot_round_trip(self):
        interp, res = self._interp(0.6, 4, chain.UPPER)
        for k, knot in enumerate(interp.knots):
            v, dv = eval_interpolant(interp, k / interp.N)
            assert v == pytest.approx(knot.f, abs=1e-10)
            assert dv == pytest.approx(float(knot.g @ (interp.y - interp.x)),
                                       abs=1e-10)

    def test_endpoint_matches_bound(self):
        interp, res = self._interp(0.6, 3, chain.LOWER)
        v, _ = eval_interpolant(interp, 1.0)
        assert v == pytest.approx(res.value, abs=1e-9)

    def test_convex_and_smooth_along_segment(self):
        interp, _ = self._interp(0.55, 5, chain.UPPER)
        ts = np.linspace(0.0, 1.0, 201)
        vals = []
        ders = []
        for t in ts:
            v, dv = eval_interpolant(interp, float(t))
            vals.append(v)
            ders.append(dv)
        # convexity: the directional derivative is nondecreasing
        assert all(d2 >= d1 - 1e-9 for d1, d2 in zip(ders, ders[1:]))
        # smoothness: derivative is 1-Lipschitz in t (L = 1, unit segment)
        h = ts[1] - ts[0]
        assert all(abs(d2 - d1) <= h + 1e-9 for d1, d2 in zip(ders, ders[1:]))

    def test_corrupted_chain_rejected(self):
        spec = chain.normalized_spec(0.6, 3, chain.UPPER)
        res = chain.solve_spec(spec)
        bad = list(res.chain)
        bad[1] = PointData(x=bad[1].x, f=bad[1].f + 0.5, g=bad[1].g)
        with pytest.raises(InfeasibleData, match=r"pair \(0, 1\)"):
            build_segment_interpolant(spec.L, bad)

    def test_short_chain_rejected(self):
        with pytest.raises(InfeasibleData):
            build_segment_interpolant(1.0, [_pd([0.0], 0.0, [0.0])])

    def test_t_out_of_range(self):
        interp, _ = self._interp(0.6, 2, chain.UPPER)
        with pytest.raises(RangeError):
            eval_interpolant(interp, 1.0 + 1e-9)


class TestCombine:
    def _pair(self, s=0.6, N=3):
        spec_u = chain.normalized_spec(s, N, chain.UPPER)
        spec_b = chain.normalized_spec(s, N, chain.LOWER)
        ru = chain.solve_spec(spec_u)
        rb = chain.solve_spec(spec_b)
        Fu = build_segment_interpolant(spec_u.L, ru.chain)
        Fb = build_segment_interpolant(spec_b.L, rb.chain)
        return Fu, Fb, ru, rb

    def test_extremes_reproduce_inputs(self):
        Fu, Fb, _, _ = self._pair()
        for t in np.linspace(0.0, 1.0, 21):
            vu, du = eval_interpolant(Fu, float(t))
            vb, db = eval_interpolant(Fb, float(t))
            v1, d1 = eval_interpolant(combine(Fu, Fb, 1.0), float(t))
            v0, d0 = eval_interpolant(combine(Fu, Fb, 0.0), float(t))
            assert v1 == pytest.approx(vu, abs=1e-12)
            assert v0 == pytest.approx(vb, abs=1e-12)
            assert d1 == pytest.approx(du, abs=1e-12)
            assert d0 == pytest.approx(db, abs=1e-12)

    def test_midpoint_mixture(self):
        Fu, Fb, ru, rb = self._pair()
        Fm = combine(Fu, Fb, 0.5)
        v_end, _ = eval_interpolant(Fm, 1.0)
        assert v_end == pytest.approx(0.5 * (ru.value + rb.value), abs=1e-9)
        for t in np.linspace(0.0, 1.0, 21):
            vu, _ = eval_interpolant(Fu, float(t))
            vb, _ = eval_interpolant(Fb, float(t))
            vm, _ = eval_interpolant(Fm, float(t))
            assert vm == pytest.approx(0.5 * (vu + vb), abs=1e-12)

    def test_mixture_stays_convex_and_smooth(self):
        Fu, Fb, _, _ = self._pair(s=0.65, N=2)
        Fm = combine(Fu, Fb, 0.3)
        ts = np.linspace(0.0, 1.0, 201)
        ders = [eval_interpolant(Fm, float(t))[1] for t in ts]
        h = ts[1] - ts[0]
        assert all(d2 >= d1 - 1e-9 for d1, d2 in zip(ders, ders[1:]))
        assert all(abs(d2 - d1) <= h + 1e-9 for d1, d2 in zip(ders, ders[1:]))

    def test_lambda_out_of_range(self):
        Fu, Fb, _, _ = self._pair(N=2)
        with pytest.raises(RangeError):
            combine(Fu, Fb, 1.5)

    def test_mismatched_knot_counts(self):
        Fu, _, _, _ = self._pair(N=2)
        _, Fb3, _, _ = self._pair(N=3)
        with pytest.raises(MismatchError):
            combine(Fu, Fb3, 0.5)
