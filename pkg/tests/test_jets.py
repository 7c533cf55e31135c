"""Unit and property tests for the second-order jet arithmetic."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ricci_forge import jets
from ricci_forge.errors import DomainError, UsageError
from ricci_forge.jets import Jet2

import oracles

coord = st.floats(-2.0, 2.0, allow_nan=False)
events = st.tuples(coord, coord, coord, coord)


def _poly(t, x, y, z):
    return t * t * x + 3.0 * y * z - x / (2.0 + y * y) + jets.sin(t * z)


class TestSeeding:
    def test_seed_is_unit_gradient(self):
        t, x, y, z = jets.seed_all((0.1, 0.2, 0.3, 0.4))
        assert np.array_equal(x.grad, [0, 1, 0, 0])
        assert not np.any(x.hess)
        assert y.value == 0.3

    def test_wrong_length(self):
        with pytest.raises(UsageError):
            jets.seed_all((1.0, 2.0))

    def test_constant_has_zero_derivatives(self):
        c = Jet2.constant(2.5)
        assert c.value == 2.5 and not np.any(c.grad) and not np.any(c.hess)


class TestArithmetic:
    def test_product_rule(self):
        t, x, _, _ = jets.seed_all((2.0, 3.0, 0.0, 0.0))
        f = t * t * x
        assert f.value == 12.0
        assert np.allclose(f.grad, [12.0, 4.0, 0, 0])
        assert f.hess[0, 0] == 6.0 and f.hess[0, 1] == 4.0 and f.hess[1, 1] == 0.0

    def test_quotient(self):
        t, x, _, _ = jets.seed_all((1.0, 2.0, 0.0, 0.0))
        f = t / x
        assert f.grad[1] == pytest.approx(-0.25)
        assert f.hess[1, 1] == pytest.approx(2.0 * 1.0 / 8.0)
        assert f.hess[0, 1] == pytest.approx(-0.25)

    def test_numpy_scalar_defers_to_jet(self):
        t = jets.seed((1.0, 0, 0, 0), 0)
        f = np.float64(2.0) * t
        assert isinstance(f, Jet2) and f.grad[0] == 2.0
        g = np.float64(1.0) - t
        assert isinstance(g, Jet2) and g.grad[0] == -1.0

    def test_division_by_zero_value(self):
        t = jets.seed((0.0, 0, 0, 0), 0)
        with pytest.raises(DomainError):
            1.0 / t

    def test_comparisons_use_value(self):
        t = jets.seed((1.0, 0, 0, 0), 0)
        assert t > 0.5 and t <= 1.0 and float(t) == 1.0


class TestElementary:
    @pytest.mark.parametrize("fn,ref", [
        (jets.sin, math.sin), (jets.cos, math.cos), (jets.tan, math.tan),
        (jets.exp, math.exp), (jets.log, math.log), (jets.abs_sqrt, lambda v: math.sqrt(abs(v))),
    ])
    def test_float_passthrough(self, fn, ref):
        assert fn(0.7) == ref(0.7)

    @pytest.mark.parametrize("fn", [jets.sin, jets.cos, jets.tan, jets.exp, jets.log,
                                    jets.abs_sqrt, jets.sqrt, lambda a: jets.power(a, 2.5)])
    def test_against_finite_differences(self, fn):
        point = np.array([0.7, 0.4, 0.3, 0.2])

        def f(t, x, y, z):
            return fn(0.5 + t * x + y - 0.3 * z)

        J = f(*jets.seed_all(point))
        g, h = oracles.fd_grad_hess(lambda *c: float(f(*c)), point)
        assert np.max(np.abs(J.grad - g)) < 1e-7 * max(1.0, np.max(np.abs(g)))
        assert np.max(np.abs(J.hess - h)) < 1e-5 * max(1.0, np.max(np.abs(h)))

    def test_abs_sqrt_negative_argument(self):
        x = jets.seed((0, -4.0, 0, 0), 1)
        r = jets.abs_sqrt(x)
        assert r.value == 2.0
        assert r.grad[1] == pytest.approx(-0.25)
        assert r.hess[1, 1] == pytest.approx(-1.0 / 32.0)

    @pytest.mark.parametrize("call", [
        lambda: jets.log(0.0), lambda: jets.log(-1.0), lambda: jets.abs_sqrt(0.0),
        lambda: jets.sqrt(-1.0), lambda: jets.power(-2.0, 0.5), lambda: jets.reciprocal(0.0),
    ])
    def test_domain_errors(self, call):
        with pytest.raises(DomainError):
            call()

    def test_power_special_cases(self):
        x = jets.seed((0, 3.0, 0, 0), 1)
        assert jets.power(x, 0).value == 1.0
        sq = jets.power(x, 2)
        assert sq.value == 9.0 and sq.grad[1] == 6.0 and sq.hess[1, 1] == 2.0
        assert jets.power(-2.0, 3) == -8.0


class TestProperties:
    @settings(max_examples=60, deadline=None)
    @given(events)
    def test_hessian_exactly_symmetric(self, p):
        J = _poly(*jets.seed_all(p))
        assert np.array_equal(J.hess, J.hess.T)

    @settings(max_examples=60, deadline=None)
    @given(events)
    def test_value_matches_float_evaluation(self, p):
        # jet division multiplies by the reciprocal, so allow a few ulps
        assert _poly(*jets.seed_all(p)).value == pytest.approx(_poly(*p), rel=1e-14, abs=1e-14)

    @settings(max_examples=40, deadline=None)
    @given(events)
    def test_matches_finite_differences(self, p):
        J = _poly(*jets.seed_all(p))
        g, h = oracles.fd_grad_hess(lambda *c: float(_poly(*c)), np.array(p))
        assert np.max(np.abs(J.grad - g)) <= 1e-6 * max(1.0, np.max(np.abs(g)))
        assert np.max(np.abs(J.hess - h)) <= 1e-5 * max(1.0, np.max(np.abs(h)))

    @settings(max_examples=40, deadline=None)
    @given(st.floats(-50, 50, allow_nan=False), st.floats(-50, 50, allow_nan=False))
    def test_constants_stay_exact(self, a, b):
        ja, jb = Jet2.constant(a), Jet2.constant(b)
        for r in (ja + jb, ja - jb, ja * jb):
            assert not np.any(r.grad) and not np.any(r.hess)
        assert (ja * jb).value == a * b
