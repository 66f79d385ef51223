import os
import subprocess
import sys

import numpy as np
import pytest

from doubled_spectral import _kernels


needs_numba = pytest.mark.skipif(
    not _kernels.HAVE_NUMBA, reason="numba not importable"
)


@pytest.fixture
def node_data(rule16):
    rng = np.random.default_rng(211)
    c1 = 1.0 / np.exp(rng.uniform(np.log(0.5), np.log(2.0), 4)) ** 2
    c2 = 1.0 / np.exp(rng.uniform(np.log(0.5), np.log(2.0), 4)) ** 2
    raw = rng.standard_normal((4, 4))
    amat = np.eye(4) + 0.05 * (raw + raw.T)
    values = rng.standard_normal(rule16.node_count)
    return rule16.xi, rule16.weights, c1, c2, amat, values


@needs_numba
class TestBackendAgreement:
    def test_weighted(self, node_data):
        xi, w, c1, c2, amat, values = node_data
        a = _kernels.weighted_total(values, w, backend="numba")
        b = _kernels.weighted_total(values, w, backend="numpy")
        assert abs(a - b) <= 1e-13 * max(abs(a), 1e-30)

    def test_kinetic(self, node_data):
        xi, w, c1, c2, amat, values = node_data
        a = _kernels.kinetic_sum(xi, w, c1, c2, backend="numba")
        b = _kernels.kinetic_sum(xi, w, c1, c2, backend="numpy")
        assert abs(a - b) <= 1e-13 * abs(a)

    def test_potential(self, node_data):
        xi, w, c1, c2, amat, values = node_data
        a = _kernels.potential_moments(xi, w, c1, c2, backend="numba")
        b = _kernels.potential_moments(xi, w, c1, c2, backend="numpy")
        assert np.all(np.abs(a - b) <= 1e-13 * np.abs(a))

    def test_rational(self, node_data):
        xi, w, c1, c2, amat, values = node_data
        a = _kernels.rational_sum(xi, w, amat, backend="numba")
        b = _kernels.rational_sum(xi, w, amat, backend="numpy")
        assert abs(a - b) <= 1e-13 * abs(a)


class TestDeterminism:
    def test_bitwise_repeatable(self, node_data):
        xi, w, c1, c2, amat, values = node_data
        first = _kernels.potential_moments(xi, w, c1, c2)
        second = _kernels.potential_moments(xi, w, c1, c2)
        assert np.array_equal(first, second)

    def test_thread_count_does_not_change_bits(self, node_data):
        xi, w, c1, c2, amat, values = node_data
        saved = _kernels.get_threads()
        try:
            _kernels.set_threads(1)
            serial = _kernels.potential_moments(xi, w, c1, c2)
            serial_k = _kernels.kinetic_sum(xi, w, c1, c2)
            _kernels.set_threads(4)
            pooled = _kernels.potential_moments(xi, w, c1, c2)
            pooled_k = _kernels.kinetic_sum(xi, w, c1, c2)
        finally:
            _kernels.set_threads(saved)
        assert np.array_equal(serial, pooled)
        assert serial_k == pooled_k

    def test_thread_guard(self):
        with pytest.raises(ValueError):
            _kernels.set_threads(0)


class TestBackendSelection:
    def test_active_backend_reported(self):
        assert _kernels.active_backend() in ("numba", "numpy")

    def test_env_forces_numpy(self):
        env = dict(os.environ)
        env["DOUBLED_SPECTRAL_BACKEND"] = "numpy"
        out = subprocess.run(
            [
                sys.executable,
                "-c",
                "from doubled_spectral import active_backend; print(active_backend())",
            ],
            env=env,
            capture_output=True,
            text=True,
            check=True,
        )
        assert out.stdout.strip() == "numpy"

    def test_env_rejects_unknown(self):
        env = dict(os.environ)
        env["DOUBLED_SPECTRAL_BACKEND"] = "cuda"
        out = subprocess.run(
            [sys.executable, "-c", "import doubled_spectral"],
            env=env,
            capture_output=True,
            text=True,
        )
        assert out.returncode != 0
