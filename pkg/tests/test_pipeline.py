"""Generating functions, V by quadrature, and the derivation residuals."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ricci_forge import models
from ricci_forge.errors import DomainError, UsageError
from ricci_forge.pipeline import (EQUATIONS, ResidualReport, compute_V, kappa, random_ty,
                                  residual_ode7, residual_reduced)
from ricci_forge.quadrature import QuadratureSpec

import oracles

t_ok = st.floats(0.15, math.pi - 0.15).filter(lambda t: abs(math.cos(t)) > 0.1)
y_any = st.floats(-3, 3)


def _gen(n):
    return models.builtin(f"example{n}").generators


class TestComputeV:
    def test_example1_matches_closed_form(self):
        gen = _gen(1)
        for t, y in [(0.7, 0.3), (2.2, -1.5)]:
            V = compute_V(gen, QuadratureSpec(), t, y)
            assert V.value == pytest.approx(gen.V_mode.V(t, y), rel=1e-12)

    def test_derivatives_match_finite_differences(self):
        gen, quad = _gen(3), QuadratureSpec()
        t, y = 0.9, 0.6
        V = compute_V(gen, quad, t, y)
        f = lambda tt, xx, yy, zz: compute_V(gen, quad, tt, yy).value  # noqa: E731
        # small step for the gradient; the Hessian needs a wider one to
        # stay clear of quadrature noise
        g, _ = oracles.fd_grad_hess(f, (t, 0.0, y, 0.0), h=1e-5)
        _, h = oracles.fd_grad_hess(f, (t, 0.0, y, 0.0), h=1e-3)
        assert V.grad[0] == pytest.approx(g[0], rel=1e-6)
        assert V.grad[2] == pytest.approx(g[2], rel=1e-6)
        assert V.hess[2, 2] == pytest.approx(h[2, 2], rel=1e-5)
        assert V.hess[0, 2] == pytest.approx(h[0, 2], rel=1e-5)

    def test_ratio_to_closed_form_is_y_independent(self):
        # the base point only shifts the integral, so V_quad / V_closed is constant in y
        gen = _gen(2)
        ratios = [compute_V(gen, QuadratureSpec(), 0.8, y).value / gen.V_mode.V(0.8, y)
                  for y in np.linspace(-2, 2, 9)]
        assert np.ptp(ratios) < 1e-10 * abs(ratios[0])

    def test_zero_N_base_point(self):
        gen = _gen(1)
        bad = gen.__class__(gen.w, gen.q, gen.K, gen.K_t, gen.K_x, lambda y: y * 1.0,
                            lambda y: 1.0 + 0 * y, gen.V_mode, "bad")
        with pytest.raises(DomainError):
            compute_V(bad, QuadratureSpec(), 0.7, 0.5)


class TestKappa:
    def test_closed_form_when_c2_zero(self):
        N = lambda y: -((2.0 + math.cos(y)) ** 2)  # noqa: E731
        assert kappa(N, 1.5, 0.0, QuadratureSpec(), 0.4) == pytest.approx(1.5 * (2 + math.cos(0.4)))

    def test_jet_form_agrees(self):
        from ricci_forge import jets
        N = lambda y: -((2.0 + jets.cos(y)) * (2.0 + jets.cos(y)))  # noqa: E731
        N_y = lambda y: 2.0 * (2.0 + jets.cos(y)) * jets.sin(y)  # noqa: E731
        k = kappa(N, 1.0, 0.7, QuadratureSpec(), 0.4, N_y=N_y)
        assert k.value == pytest.approx(kappa(N, 1.0, 0.7, QuadratureSpec(), 0.4), rel=1e-14)
        step = 1e-5
        fd = (kappa(N, 1.0, 0.7, QuadratureSpec(), 0.4 + step)
              - kappa(N, 1.0, 0.7, QuadratureSpec(), 0.4 - step)) / (2 * step)
        assert k.grad[2] == pytest.approx(fd, rel=1e-7)


class TestResiduals:
    @pytest.mark.parametrize("n", [1, 2, 3])
    @pytest.mark.parametrize("eq", EQUATIONS[1:])
    def test_reduced_equations_hold(self, n, eq):
        r = residual_reduced(_gen(n), None, eq, 0.9, 0.4)
        tol = 1e-5 if eq in ("eq28", "eq30") else 1e-8
        assert r.relative < tol

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_ode7_holds(self, n):
        assert residual_ode7(_gen(n), (0.9, 0.7, 0.4, 0.0)).relative < 1e-9

    def test_unknown_equation(self):
        with pytest.raises(UsageError):
            residual_reduced(_gen(2), None, "eq31", 0.9, 0.4)

    def test_corrupted_V_breaks_eq27(self):
        r = residual_reduced(_gen(2), None, "eq27", 0.9, 0.4, v_transform=lambda V: V + 0.1)
        assert r.relative > 1e-3

    def test_report_keeps_worst(self):
        rep = ResidualReport("ode7")
        rng = np.random.default_rng(0)
        for t, y in random_ty(rng, 30):
            rep.add(residual_ode7(_gen(2), (t, 0.5, y, 0.0)))
        d = rep.to_dict()
        assert rep.count == 30 and len(d["events"]) == 5
        assert d["events"][0]["relative"] == rep.max_relative

    def test_random_ty_avoids_loci(self):
        for t, _ in random_ty(np.random.default_rng(1), 200):
            assert abs(math.sin(t)) > 0.05 and abs(math.cos(t)) > 0.05


class TestProperties:
    @settings(max_examples=40, deadline=None)
    @given(t_ok, y_any, st.floats(-2, 2))
    def test_gauge_invariance_under_base_point(self, t, y, y0):
        # eq27 and eq29 involve only y-log-derivatives, which do not see y0
        gen = _gen(2)
        for eq in ("eq27", "eq29"):
            base = residual_reduced(gen, QuadratureSpec(), eq, t, y)
            moved = residual_reduced(gen, QuadratureSpec(y0=y0), eq, t, y)
            assert abs(moved.value - base.value) <= 1e-10 * max(base.scale, moved.scale)
            assert moved.relative < 1e-8

    @settings(max_examples=30, deadline=None)
    @given(t_ok, y_any, st.floats(-2, 2))
    def test_theorem1_family_satisfies_ode7(self, t, y, x):
        m = models.builtin("theorem1_instance", c1=1.3, c2=0.4)
        assert residual_ode7(m.generators, (t, x, y, 0.0)).relative < 1e-9
