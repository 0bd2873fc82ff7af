"""Backend equivalence: compiled kernels must match the pure-Python fallback
bit-for-bit (same arithmetic, same order, no FP contraction)."""

import numpy as np
import pytest

from pvcurt._core import _pykernels

try:
    from pvcurt._core import _ckernels
except ImportError:
    _ckernels = None

needs_compiled = pytest.mark.skipif(
    _ckernels is None, reason="compiled kernels not built"
)


@pytest.fixture(scope="module")
def vectors(array_params):
    from pvcurt.pvarray import STC, effective_module_params
    from pvcurt.plant import PlantParams, pack_plant_params

    i_ph, i_0, a, r_s, r_sh = effective_module_params(array_params, STC)
    voc_m = _pykernels.diode_voc(i_ph, i_0, a, r_sh, -1.0)
    dp = np.array([i_ph, i_0, a, r_s, r_sh, 16.0, 153.0, voc_m])
    pp = pack_plant_params(PlantParams())
    return dp, pp


@needs_compiled
class TestBitIdentical:
    def test_diode_current(self, vectors):
        dp, _ = vectors
        i_ph, i_0, a, r_s, r_sh, _, _, voc_m = dp
        for v in np.linspace(-1.0, voc_m + 1.0, 57):
            for ig in (-1.0, 0.0, 4.0, i_ph):
                py = _pykernels.diode_current(v, i_ph, i_0, a, r_s, r_sh, voc_m, ig)
                cy = _ckernels.diode_current(v, i_ph, i_0, a, r_s, r_sh, voc_m, ig)
                assert py == cy

    def test_diode_voc(self, vectors):
        dp, _ = vectors
        i_ph, i_0, a, _, r_sh, _, _, _ = dp
        for scale in (1.0, 0.62, 0.11, 0.013):
            py = _pykernels.diode_voc(i_ph * scale, i_0, a, r_sh, -1.0)
            cy = _ckernels.diode_voc(i_ph * scale, i_0, a, r_sh, -1.0)
            assert py == cy

    def test_advance_reduced(self, vectors):
        dp, pp = vectors
        s0 = np.array([0.0, 560.0, 0.0, 0.0, 0.0, 300.0])
        rng = np.random.default_rng(3)
        s_py, s_cy = s0.copy(), s0.copy()
        a_py, a_cy = np.zeros(3), np.zeros(3)
        for _ in range(20):
            ref = float(rng.uniform(480.0, 590.0))
            st1 = _pykernels.advance_reduced(s_py, a_py, 200, 1e-3, ref, 0.0, 0.39, dp, pp)
            st2 = _ckernels.advance_reduced(s_cy, a_cy, 200, 1e-3, ref, 0.0, 0.39, dp, pp)
            assert st1 == st2 == 0
            assert s_py.tobytes() == s_cy.tobytes()
            assert a_py.tobytes() == a_cy.tobytes()

    def test_advance_full(self, vectors):
        dp, pp = vectors
        s0 = np.zeros(14)
        s0[1] = 560.0
        s0[7] = 300.0
        rng = np.random.default_rng(4)
        s_py, s_cy = s0.copy(), s0.copy()
        a_py, a_cy = np.zeros(3), np.zeros(3)
        for _ in range(10):
            ref = float(rng.uniform(480.0, 590.0))
            q = float(rng.uniform(-50e3, 50e3))
            st1 = _pykernels.advance_full(s_py, a_py, 500, 1e-4, ref, q, dp, pp)
            st2 = _ckernels.advance_full(s_cy, a_cy, 500, 1e-4, ref, q, dp, pp)
            assert st1 == st2 == 0
            assert s_py.tobytes() == s_cy.tobytes()
            assert a_py.tobytes() == a_cy.tobytes()

    def test_collapse_status_matches(self, vectors):
        dp, pp = vectors
        dp0 = dp.copy()
        dp0[0] = 0.0  # no photocurrent
        s_py = np.array([0.0, 400.0, 40.0, 0.0, 0.0, 0.0])
        s_cy = s_py.copy()
        a1, a2 = np.zeros(3), np.zeros(3)
        st1 = _pykernels.advance_reduced(s_py, a1, 5000, 1e-3, 400.0, 0.0, 0.39, dp0, pp)
        st2 = _ckernels.advance_reduced(s_cy, a2, 5000, 1e-3, 400.0, 0.0, 0.39, dp0, pp)
        assert st1 == st2 == 1
        assert s_py.tobytes() == s_cy.tobytes()
