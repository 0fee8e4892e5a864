import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rsthp.channel import draw_estimate
from rsthp.errors import NoPrivatePower
from rsthp.kernels import thp_encode_batch
from rsthp.thp import (
    ModuloParams,
    build_thp_filters,
    build_transmit_vector,
    compute_beta,
    modulo_reduce,
    thp_encode,
)

QPSK = ModuloParams.qpsk()


def qpsk_symbols(rng, shape):
    return ((rng.integers(0, 2, shape) * 2 - 1) + 1j * (rng.integers(0, 2, shape) * 2 - 1)) / np.sqrt(2)


class TestBuildFilters:
    def test_identity_channel(self):
        for scheme in ("dthp", "cthp"):
            f = build_thp_filters(np.eye(3), scheme)
            assert np.allclose(f.F, np.eye(3), atol=1e-14)
            assert np.allclose(f.lhat, np.eye(3), atol=1e-14)
            assert np.allclose(f.g, np.ones(3), atol=1e-14)
            assert np.allclose(f.B, np.eye(3), atol=1e-14)
            assert np.allclose(f.w_priv, np.eye(3), atol=1e-14)

    def test_diagonal_channel(self):
        H = np.diag([2.0, 4.0])
        fd = build_thp_filters(H, "dthp")
        fc = build_thp_filters(H, "cthp")
        assert np.allclose(fd.lhat, np.diag([2.0, 4.0]), atol=1e-12)
        assert np.allclose(fd.g, [0.5, 0.25], atol=1e-12)
        assert np.allclose(fd.B, np.eye(2), atol=1e-12)
        assert np.allclose(fd.w_priv, np.eye(2), atol=1e-12)
        assert np.allclose(fc.w_priv, np.diag([0.5, 0.25]), atol=1e-12)

    def test_unit_diagonal_feedback(self):
        rng = np.random.default_rng(3)
        H = draw_estimate(4, 6, rng)
        for scheme in ("dthp", "cthp"):
            f = build_thp_filters(H, scheme)
            assert np.allclose(np.diagonal(f.B), 1.0, atol=0)
            assert np.abs(np.triu(f.B, 1)).max() < 1e-12
            # Columns of F orthonormal.
            assert np.abs(f.F.conj().T @ f.F - np.eye(4)).max() < 1e-10

    def test_composite_columns_invert_the_estimate(self):
        rng = np.random.default_rng(5)
        H = draw_estimate(4, 4, rng)
        fc = build_thp_filters(H, "cthp")
        fd = build_thp_filters(H, "dthp")
        assert np.abs(H @ fc.w_priv - np.eye(4)).max() < 1e-10
        assert np.abs(np.diag(fd.g) @ H @ fd.w_priv - np.eye(4)).max() < 1e-10
        # Feedback/feedforward identity behind the zero residual interference.
        eff = np.diag(fd.g) @ H @ fd.F @ np.linalg.inv(fd.B)
        assert np.abs(eff - np.eye(4)).max() < 1e-9

    def test_estimate_times_f_is_lower_triangular(self):
        rng = np.random.default_rng(6)
        H = draw_estimate(3, 7, rng)
        f = build_thp_filters(H, "dthp")
        assert np.abs(H @ f.F - f.lhat).max() < 1e-10


class TestComputeBeta:
    def test_dthp_unit(self):
        f = build_thp_filters(np.eye(4), "dthp")
        assert compute_beta(f, 4.0, 0.0) == pytest.approx(1.0, rel=1e-12)

    def test_cthp_unit(self):
        f = build_thp_filters(np.eye(4), "cthp")
        assert compute_beta(f, 8.0, 4.0) == pytest.approx(1.0, rel=1e-12)

    def test_no_private_power(self):
        f = build_thp_filters(np.eye(2), "dthp")
        with pytest.raises(NoPrivatePower):
            compute_beta(f, 1.0, 1.0)

    @pytest.mark.parametrize("scheme", ["dthp", "cthp"])
    @pytest.mark.parametrize("delta", [0.0, 0.3])
    def test_power_closure_unit_variance_symbols(self, scheme, delta):
        # With unit-variance effective symbols the scaling closes the
        # transmit power constraint; 2% covers Monte Carlo noise.
        rng = np.random.default_rng(8)
        etr = 50.0
        H = draw_estimate(4, 8, rng)
        f = build_thp_filters(H, scheme)
        pc2 = delta * etr
        p_c = np.zeros(8, dtype=complex)
        if delta > 0:
            direction = rng.standard_normal(8) + 1j * rng.standard_normal(8)
            p_c = np.sqrt(pc2) * direction / np.linalg.norm(direction)
        compute_beta(f, etr, pc2)
        n = 10000
        v = (rng.standard_normal((n, 4)) + 1j * rng.standard_normal((n, 4))) / np.sqrt(2)
        sc = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2)
        power = np.mean(
            [np.vdot(x, x).real for x in (build_transmit_vector(f, v[t], sc[t], p_c) for t in range(n))]
        )
        assert abs(power / etr - 1.0) < 0.02


class TestModulo:
    def test_zero(self):
        assert modulo_reduce(0.0, QPSK) == 0.0

    def test_lattice_point(self):
        lam = QPSK.lam
        assert abs(modulo_reduce(lam + 0j, QPSK)) < 1e-15

    def test_beyond_half(self):
        lam = QPSK.lam
        out = modulo_reduce(0.6 * lam + 0j, QPSK)
        assert out == pytest.approx(-0.4 * lam, rel=1e-12)

    def test_idempotence_bulk(self):
        rng = np.random.default_rng(0)
        lam = QPSK.lam
        z = (rng.uniform(-10, 10, 10**5) + 1j * rng.uniform(-10, 10, 10**5)) * lam
        once = modulo_reduce(z, QPSK)
        assert np.array_equal(modulo_reduce(once, QPSK), once)
        assert once.real.min() >= -lam / 2 and once.real.max() < lam / 2
        assert once.imag.min() >= -lam / 2 and once.imag.max() < lam / 2

    @settings(max_examples=200, deadline=None)
    @given(
        st.floats(-10, 10, allow_nan=False),
        st.floats(-10, 10, allow_nan=False),
    )
    def test_range_lattice_idempotence(self, re, im):
        lam = QPSK.lam
        z = complex(re * lam, im * lam)
        out = modulo_reduce(z, QPSK)
        assert -lam / 2 <= out.real < lam / 2
        assert -lam / 2 <= out.imag < lam / 2
        shift = (out - z) / lam
        assert abs(shift.real - round(shift.real)) < 1e-9
        assert abs(shift.imag - round(shift.imag)) < 1e-9
        assert modulo_reduce(out, QPSK) == out


class TestEncode:
    def test_identity_feedback(self):
        rng = np.random.default_rng(1)
        s = 3.0 * (rng.standard_normal(4) + 1j * rng.standard_normal(4))
        v, d = thp_encode(s, np.eye(4), QPSK)
        assert np.allclose(v, modulo_reduce(s, QPSK), atol=1e-14)
        assert np.allclose(np.eye(4) @ v - d, s, atol=1e-12)

    def test_two_stream_no_wrap(self):
        B = np.array([[1.0, 0.0], [0.5, 1.0]])
        s = np.array([0.1, 0.2], dtype=complex)
        v, d = thp_encode(s, B, ModuloParams(lam=100.0))
        assert np.allclose(v, [0.1, 0.15], atol=1e-14)
        assert np.abs(d).max() < 1e-14

    def test_first_stream_untouched_inside_region(self):
        rng = np.random.default_rng(2)
        B = build_thp_filters(draw_estimate(3, 3, rng), "dthp").B
        s = qpsk_symbols(rng, 3)
        v, _ = thp_encode(s, B, QPSK)
        assert v[0] == s[0]

    def test_recursion_matches_inverse_identity(self):
        rng = np.random.default_rng(4)
        for _ in range(200):
            K = int(rng.integers(2, 6))
            B = np.tril(rng.standard_normal((K, K)) + 1j * rng.standard_normal((K, K)), -1)
            B += np.eye(K)
            s = qpsk_symbols(rng, K)
            v, d = thp_encode(s, B, QPSK)
            assert np.abs(B @ v - d - s).max() < 1e-12
            # Perturbation lies on the scaled integer lattice.
            steps = d / QPSK.lam
            assert np.abs(steps.real - np.round(steps.real)).max() < 1e-9
            assert np.abs(steps.imag - np.round(steps.imag)).max() < 1e-9

    def test_batch_matches_single(self):
        # Batch-size-dependent BLAS summation order allows ulp-level drift
        # on the fallback backend, hence the tolerance.
        rng = np.random.default_rng(6)
        B = build_thp_filters(draw_estimate(4, 4, rng), "cthp").B
        s = qpsk_symbols(rng, (50, 4))
        v_batch, d_batch = thp_encode_batch(s, B, QPSK.lam)
        for t in range(50):
            v, d = thp_encode(s[t], B, QPSK)
            assert np.abs(v - v_batch[t]).max() < 1e-12
            assert np.abs(d - d_batch[t]).max() < 1e-12


class TestTransmitVector:
    def test_single_stream(self):
        f = build_thp_filters(np.eye(3), "dthp")
        compute_beta(f, 12.0, 0.0)
        x = build_transmit_vector(f, np.array([1.0, 0, 0], dtype=complex), 0.0, np.zeros(3))
        assert np.allclose(x, f.beta * f.F[:, 0], atol=1e-14)

    def test_common_only(self):
        f = build_thp_filters(np.eye(3), "cthp")
        compute_beta(f, 12.0, 3.0)
        p_c = np.array([1.0, 1.0, 1.0]) / np.sqrt(3) * np.sqrt(3.0)
        x = build_transmit_vector(f, np.zeros(3, dtype=complex), 2.0 + 1j, p_c)
        assert np.allclose(x, p_c * (2.0 + 1j), atol=1e-14)

    def test_matches_formula(self):
        rng = np.random.default_rng(7)
        H = draw_estimate(3, 5, rng)
        for scheme in ("dthp", "cthp"):
            f = build_thp_filters(H, scheme)
            compute_beta(f, 10.0, 1.0)
            v = rng.standard_normal(3) + 1j * rng.standard_normal(3)
            p_c = rng.standard_normal(5) + 1j * rng.standard_normal(5)
            s_c = complex(rng.standard_normal(), rng.standard_normal())
            x = build_transmit_vector(f, v, s_c, p_c)
            mix = f.F @ (f.g * v) if scheme == "cthp" else f.F @ v
            assert np.allclose(x, p_c * s_c + f.beta * mix, atol=1e-12)

    def test_requires_beta(self):
        f = build_thp_filters(np.eye(2), "dthp")
        with pytest.raises(ValueError):
            build_transmit_vector(f, np.zeros(2, dtype=complex), 0.0, np.zeros(2))
