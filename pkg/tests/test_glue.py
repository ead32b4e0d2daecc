"""Tests for the gluing map, averaged estimator, and Hölder seminorm."""

import math

import numpy as np
import pytest

from thompsonlab.wiener import (GridDiffeo, a_inv, sample_brownian,
                                exponential_family, polynomial_family,
                                identity_map)
from thompsonlab.glue import (GlueInput, build_fn, build_ltilde, q_glue,
                              knot_mismatch, conjugation_pieces, _weights,
                              EstimatorConfig, L_estimator,
                              theorem3_experiment, holder_seminorm)

M = 2 ** 10
GRID = np.arange(M + 1) / M


def identity_piece():
    return GridDiffeo(GRID.copy(), np.ones(M + 1))


def random_piece(seed, m=M):
    q = a_inv(sample_brownian(m, seed))
    return GridDiffeo(q.values, q.deriv)


def random_input(seed, n):
    rng = np.random.default_rng(seed)
    xbar = np.sort(rng.uniform(0.05, 0.95, n - 1))
    return GlueInput(xbar, [random_piece(1000 * seed + j) for j in range(n)])


class TestGlueInput:
    def test_monotone_required(self):
        with pytest.raises(ValueError):
            GlueInput([0.6, 0.4], [identity_piece()] * 3)

    def test_piece_count_checked(self):
        with pytest.raises(ValueError):
            GlueInput([0.5], [identity_piece()])


class TestBlockMap:
    def test_identity_pieces_squash_linearly(self):
        inp = GlueInput([0.3], [identity_piece(), identity_piece()])
        # first block maps [0, 1/2] linearly onto [0, 0.3]
        assert build_fn(inp, np.array([0.25]))[0] == pytest.approx(0.15)
        assert build_fn(inp, np.array([0.75]))[0] == pytest.approx(0.65)

    def test_single_block_is_the_piece(self):
        q = random_piece(5)
        inp = GlueInput([], [q])
        assert np.allclose(build_fn(inp, GRID), q.values)

    def test_monotone_continuous(self):
        inp = random_input(7, 4)
        vals = build_fn(inp, GRID)
        assert np.all(np.diff(vals) > 0)
        assert vals[0] == 0.0 and vals[-1] == pytest.approx(1.0)


class TestTimeChange:
    def test_identity_pieces_reduce_to_block_map(self):
        inp = GlueInput([0.2, 0.7], [identity_piece()] * 3)
        assert np.allclose(build_ltilde(inp, GRID), build_fn(inp, GRID))

    def test_single_block_identity(self):
        inp = GlueInput([], [random_piece(9)])
        assert np.allclose(build_ltilde(inp, GRID), GRID)

    def test_weights_positive(self):
        assert np.all(_weights(random_input(11, 5)) > 0)


class TestGlued:
    def test_identity_glue(self):
        inp = GlueInput([0.3, 0.6], [identity_piece()] * 3)
        q = q_glue(inp, M)
        assert np.max(np.abs(q.values - GRID)) < 1e-12
        assert np.max(np.abs(q.deriv - 1.0)) < 1e-12

    def test_single_block_passthrough(self):
        piece = random_piece(13)
        q = q_glue(GlueInput([], [piece]), M)
        assert np.allclose(q.values, piece.values)

    def test_knot_mismatch_small(self):
        worst = max(knot_mismatch(random_input(100 + s, 2 + s % 4))
                    for s in range(20))
        assert worst < 1e-8

    def test_output_is_diffeo(self):
        q = q_glue(random_input(17, 4), M)
        assert np.all(q.deriv > 0)
        assert np.all(np.diff(q.values) > 0)


class TestConjugation:
    def test_identity_map_fixes_input(self):
        inp = random_input(19, 3)
        out = conjugation_pieces(identity_map(), inp)
        assert np.array_equal(out.xbar, inp.xbar)
        for a, b in zip(out.pieces, inp.pieces):
            assert np.allclose(a.values, b.values)

    @pytest.mark.parametrize("g", [exponential_family(0.8),
                                   polynomial_family(0.4)])
    @pytest.mark.parametrize("n", [2, 5, 8])
    def test_conjugation_identity(self, g, n):
        inp = random_input(23 + n, n)
        lhs = q_glue(conjugation_pieces(g, inp), M).values
        rhs = g.g(q_glue(inp, M).values)
        assert np.max(np.abs(lhs - rhs)) < 1e-6

    def test_weight_chain_invariance(self):
        inp = random_input(29, 4)
        w = _weights(inp)
        wt = _weights(conjugation_pieces(exponential_family(0.8), inp))
        ratios = wt / w
        assert np.allclose(ratios, ratios[0])


class TestEstimator:
    def cfg(self, **kw):
        base = dict(delta=0.25, support=[(0.5,), (0.25, 0.5, 0.75)],
                    inner_samples=40, M=256, seed=3)
        base.update(kw)
        return EstimatorConfig(**base)

    def test_constant_functional_exact(self):
        est, se = L_estimator("one", self.cfg())
        assert est == 1.0 and se == 0.0

    def test_deterministic(self):
        assert L_estimator("midpoint", self.cfg()) == \
            L_estimator("midpoint", self.cfg())

    def test_convex_average(self):
        est, _ = L_estimator("exp_l2", self.cfg())
        assert 0.0 < est < 1.0

    def test_identity_stub(self):
        cfg = self.cfg(support=[(0.5,)])
        est, se = L_estimator("midpoint", cfg, identity_pieces=True)
        assert est == pytest.approx(0.5) and se < 1e-15

    def test_delta_range_enforced(self):
        with pytest.raises(ValueError):
            self.cfg(delta=0.7)
        with pytest.raises(ValueError):
            self.cfg(support=[])


class TestTrendExperiment:
    def stages(self):
        return [("stage1", [(0.5,)]),
                ("stage2", [(0.25, 0.5, 0.75), (0.25, 0.5, 0.625)])]

    def test_identity_generator_zero_difference(self):
        cfg = EstimatorConfig(0.25, [(0.5,)], 20, 128, 5)
        rows = theorem3_experiment("midpoint", "id", None, None,
                                   self.stages(), cfg)
        assert all(r["diff"] == 0.0 for r in rows)
        assert [r["stage"] for r in rows] == ["stage1", "stage2"]

    def test_schema(self):
        cfg = EstimatorConfig(0.25, [(0.5,)], 10, 128, 5)
        rows = theorem3_experiment("midpoint", "id", None, None,
                                   self.stages(), cfg)
        for r in rows:
            assert {"stage", "n", "support_size", "F", "g", "L_F", "L_Fg",
                    "diff", "SE", "seed"} <= set(r)


class TestHolder:
    def test_identity_zero(self):
        r = holder_seminorm(identity_piece(), 0.3)
        assert r["value"] == 0.0

    def test_linear_log_derivative_closed_form(self):
        c = 1.3
        q = a_inv(c * GRID)
        r = holder_seminorm(q, 0.3)
        want = abs(math.log(c / math.expm1(c))) + c
        assert r["value"] == pytest.approx(want, abs=1e-5)
        assert r["witness"] == (0.0, 1.0)

    def test_monotone_in_delta(self):
        q = random_piece(31)
        v1 = holder_seminorm(q, 0.1)["value"]
        v2 = holder_seminorm(q, 0.4)["value"]
        assert v1 <= v2

    def test_range_enforced(self):
        with pytest.raises(ValueError):
            holder_seminorm(identity_piece(), 0.5)
