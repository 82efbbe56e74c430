import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nmqw.channel import dephase, frozen, kraus_pair, schedule
from nmqw.kernel import DecoherenceFunction, KernelParams, sample_closed_form

from oracles import random_density, random_kappa

RHO_PLUS_I = np.array([[0.5, -0.5j], [0.5j, 0.5]])


def unit_disk():
    return st.tuples(st.floats(0, 1), st.floats(0, 2 * np.pi)).map(lambda rp: rp[0] * np.exp(1j * rp[1]))


def densities():
    return st.integers(0, 2**32 - 1).map(lambda s: random_density(np.random.default_rng(s)))


class TestDephase:
    def test_populations_fixed(self):
        out = dephase(RHO_PLUS_I, 0.3 - 0.2j)
        assert out[0, 0] == 0.5 and out[1, 1] == 0.5

    def test_coherence_rule(self):
        k = 0.3 - 0.2j
        out = dephase(RHO_PLUS_I, k)
        assert out[1, 0] == pytest.approx(k * 0.5j)
        assert out[0, 1] == pytest.approx(np.conj(k) * -0.5j)

    def test_identity_and_full(self):
        np.testing.assert_allclose(dephase(RHO_PLUS_I, 1.0), RHO_PLUS_I)
        np.testing.assert_allclose(dephase(RHO_PLUS_I, 0.0), np.eye(2) / 2)

    def test_exactly_hermitian(self):
        rng = np.random.default_rng(4)
        for _ in range(50):
            out = dephase(random_density(rng), random_kappa(rng))
            assert np.array_equal(out, out.conj().T)

    @pytest.mark.parametrize("bad", [1.01, 1j * 1.5, complex("nan")])
    def test_rejects_bad_kappa(self, bad):
        with pytest.raises(ValueError):
            dephase(RHO_PLUS_I, bad)

    def test_rejects_non_density(self):
        with pytest.raises(ValueError):
            dephase(np.array([[1.0, 0.0], [0.0, 1.0]]), 0.5)

    @given(rho=densities(), a=unit_disk(), b=unit_disk())
    @settings(max_examples=200, deadline=None)
    def test_semigroup(self, rho, a, b):
        np.testing.assert_allclose(dephase(dephase(rho, a), b), dephase(rho, a * b), atol=1e-14)

    @given(rho=densities(), k=unit_disk())
    @settings(max_examples=200, deadline=None)
    def test_preserves_positivity(self, rho, k):
        out = dephase(rho, k)
        assert np.trace(out).real == pytest.approx(1.0, abs=1e-14)
        assert np.linalg.eigvalsh(out).min() >= -1e-14


class TestKraus:
    def test_matches_map_on_random_pairs(self):
        rng = np.random.default_rng(20240611)
        worst = 0.0
        for _ in range(1000):
            rho, k = random_density(rng), random_kappa(rng)
            pair = kraus_pair(k)
            worst = max(worst, np.max(np.abs(pair.apply(rho) - dephase(rho, k))))
            assert pair.completeness_residual() <= 1e-12
        assert worst <= 1e-12

    @pytest.mark.parametrize("k", [0.0, 1.0, -1.0, 1j, 0.6 * np.exp(2.1j)])
    def test_edge_values(self, k):
        pair = kraus_pair(k)
        assert pair.completeness_residual() <= 1e-12
        np.testing.assert_allclose(pair.apply(RHO_PLUS_I), dephase(RHO_PLUS_I, k), atol=1e-14)

    def test_unit_modulus_is_unitary(self):
        pair = kraus_pair(np.exp(0.7j))
        assert np.max(np.abs(pair.A2)) < 1e-15
        np.testing.assert_allclose(pair.A1 @ pair.A1.conj().T, np.eye(2), atol=1e-15)


class TestSchedules:
    def test_frozen(self):
        s = frozen(0.4, 5)
        assert s.mode == "frozen" and len(s) == 5 and s.frozen_value == 0.4
        assert np.all(s.factors == 0.4)

    def test_factors_read_only(self):
        s = frozen(0.4, 3)
        with pytest.raises(ValueError):
            s.factors[0] = 1.0

    def test_absolute_samples_integer_times(self):
        p = KernelParams(1, 0.05)
        df = sample_closed_form(p, 0.5, 10.0)
        s = schedule(df, 10)
        np.testing.assert_allclose(s.factors, [df.at(float(j)) for j in range(1, 11)])

    def test_incremental_reproduces_kappa(self):
        df = sample_closed_form(KernelParams(1, 10), 1.0, 20.0)
        s = schedule(df, 20, "incremental")
        np.testing.assert_allclose(np.cumprod(s.factors), df.values[1:], rtol=1e-12)
        assert s.flagged == ()

    def test_incremental_flags_zero(self):
        df = DecoherenceFunction(KernelParams(1, 0.01), 1.0, np.array([1.0, 0.5, 0.0, -0.3]))
        s = schedule(df, 3, "incremental")
        assert s.flagged == (3,)
        assert s.factors[2] == 0
        assert s.factors[1] == 0.0

    def test_incremental_clamps_magnitude(self):
        df = DecoherenceFunction(KernelParams(1, 0.01), 1.0, np.array([1.0, 0.2, -0.5]))
        s = schedule(df, 2, "incremental")
        assert s.factors[1] == pytest.approx(-1.0)

    def test_frozen_mode_through_schedule(self):
        assert schedule(None, 4, "frozen", kappa=0.5).frozen_value == 0.5
        with pytest.raises(ValueError):
            schedule(None, 4, "frozen")

    def test_errors(self):
        df = sample_closed_form(KernelParams(1, 1), 1.0, 5.0)
        with pytest.raises(ValueError):
            schedule(df, 6)
        with pytest.raises(ValueError):
            schedule(df, 3, "weird")
        with pytest.raises(ValueError):
            schedule(None, 3)
