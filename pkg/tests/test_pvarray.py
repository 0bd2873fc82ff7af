import math

import numpy as np
import pytest

from pvcurt.errors import ContractError, ExtractionError
from pvcurt.pvarray import (
    CS6P_250P,
    STC,
    ModuleDatasheet,
    OperatingConditions,
    array_current,
    array_voc,
    effective_module_params,
    extract_params,
    find_mpp,
)

from conftest import sweep_oracle


class TestExtraction:
    def test_table_scale_array_mpp(self, array_params):
        """153x16 CS6P-250P array reproduces the 481.6 V / 1270 A MPP."""
        v_mpp, p_mpp = find_mpp(STC, array_params)
        i_mpp = p_mpp / v_mpp
        assert abs(v_mpp - 481.6) <= 0.01 * 481.6
        assert abs(i_mpp - 1270.0) <= 0.01 * 1270.0

    def test_identity_topology_matches_datasheet(self, module_params):
        v_mpp, p_mpp = find_mpp(STC, module_params)
        assert abs(v_mpp - CS6P_250P.v_mp_stc) <= 0.01 * CS6P_250P.v_mp_stc
        p_ds = CS6P_250P.v_mp_stc * CS6P_250P.i_mp_stc
        assert abs(p_mpp - p_ds) <= 0.01 * p_ds

    def test_reproduces_short_and_open_circuit(self, module_params):
        isc = array_current(0.0, STC, module_params)
        assert abs(isc - CS6P_250P.i_sc_stc) <= 1e-3 * CS6P_250P.i_sc_stc
        ioc = array_current(CS6P_250P.v_oc_stc, STC, module_params)
        assert abs(ioc) <= 1e-3 * CS6P_250P.i_sc_stc

    def test_invalid_datasheet_rejected(self):
        with pytest.raises(ContractError):
            ModuleDatasheet(
                v_oc_stc=37.2,
                i_sc_stc=8.87,
                v_mp_stc=30.1,
                i_mp_stc=9.5,  # > i_sc
                alpha_isc=0.005,
                beta_voc=-0.12,
                n_cells=60,
            )

    def test_infeasible_fill_factor_fails(self):
        # fill factor ~0.99 cannot be met by a single-diode curve
        bad = ModuleDatasheet(
            v_oc_stc=37.2,
            i_sc_stc=8.87,
            v_mp_stc=36.9,
            i_mp_stc=8.85,
            alpha_isc=0.005,
            beta_voc=-0.12,
            n_cells=60,
        )
        with pytest.raises(ExtractionError):
            extract_params(bad, 1, 1)

    def test_bad_topology_rejected(self):
        with pytest.raises(ContractError):
            extract_params(CS6P_250P, 0, 153)


class TestArrayCurrent:
    def test_short_circuit(self, array_params):
        isc = array_current(0.0, STC, array_params)
        target = array_params.n_parallel * CS6P_250P.i_sc_stc
        assert abs(isc - target) <= 1e-3 * target

    def test_open_circuit(self, array_params):
        voc = array_voc(STC, array_params)
        i = array_current(voc, STC, array_params)
        assert abs(i) <= 1e-3 * array_params.n_parallel * CS6P_250P.i_sc_stc

    def test_paper_mpp_current(self, array_params):
        i = array_current(481.6, STC, array_params)
        assert abs(i - 1270.0) <= 0.01 * 1270.0

    def test_half_irradiance_mpp_current(self, array_params):
        """At G=500 the MPP current is ~half the STC value (sweep oracle)."""
        cond = OperatingConditions(500.0)
        i_ph, i_0, a, r_s, r_sh = effective_module_params(array_params, cond)
        v_m = np.linspace(0.0, 40.0, 4001)
        i_m = sweep_oracle(v_m, i_ph, i_0, a, r_s, r_sh)
        p = v_m * i_m
        v_mpp_mod = v_m[np.argmax(p)]
        i = array_current(v_mpp_mod * array_params.n_series, cond, array_params)
        half_stc = 0.5 * array_params.n_parallel * CS6P_250P.i_mp_stc
        assert abs(i - half_stc) <= 0.02 * half_stc

    def test_out_of_range_clamped(self, array_params):
        voc = array_voc(STC, array_params)
        assert array_current(voc + 50.0, STC, array_params) == 0.0
        isc = array_current(0.0, STC, array_params)
        assert array_current(-5.0, STC, array_params) == isc

    def test_matches_sweep_oracle(self, array_params):
        cond = OperatingConditions(850.0, 40.0)
        i_ph, i_0, a, r_s, r_sh = effective_module_params(array_params, cond)
        v_m = np.linspace(0.0, 34.0, 35)
        expect = sweep_oracle(v_m, i_ph, i_0, a, r_s, r_sh)
        for vm, ie in zip(v_m, expect):
            got = array_current(vm * array_params.n_series, cond, array_params)
            assert got == pytest.approx(array_params.n_parallel * ie, rel=1e-7)


class TestFindMpp:
    def test_stc_power(self, array_params):
        v_mpp, p_mpp = find_mpp(STC, array_params)
        assert abs(p_mpp - 612e3) <= 0.01 * 612e3
        assert abs(v_mpp - 481.6) <= 0.01 * 481.6

    def test_zero_irradiance(self, array_params):
        _, p_mpp = find_mpp(OperatingConditions(0.0), array_params)
        assert abs(p_mpp) <= 1.0

    def test_against_millivolt_sweep(self, array_params):
        """1 mV module-grid brute force agrees within 0.01% at G=700."""
        cond = OperatingConditions(700.0)
        i_ph, i_0, a, r_s, r_sh = effective_module_params(array_params, cond)
        v_m = np.arange(0.0, 38.0, 1e-3)
        i_m = sweep_oracle(v_m, i_ph, i_0, a, r_s, r_sh)
        p = (
            v_m
            * i_m
            * array_params.n_series
            * array_params.n_parallel
        )
        p_oracle = p.max()
        _, p_mpp = find_mpp(cond, array_params)
        assert abs(p_mpp - p_oracle) <= 1e-4 * p_oracle

    def test_randomized_conditions_vs_oracle(self, array_params):
        rng = np.random.default_rng(7)
        for _ in range(6):
            g = float(rng.uniform(50.0, 1150.0))
            tc = float(rng.uniform(-10.0, 70.0))
            cond = OperatingConditions(g, tc)
            i_ph, i_0, a, r_s, r_sh = effective_module_params(array_params, cond)
            v_m = np.arange(0.0, 42.0, 1e-3)
            i_m = sweep_oracle(v_m, i_ph, i_0, a, r_s, r_sh)
            p_oracle = (v_m * i_m).max() * 16 * 153
            _, p_mpp = find_mpp(cond, array_params)
            assert abs(p_mpp - p_oracle) <= 1e-4 * p_oracle


class TestInvariants:
    def test_current_monotone_in_voltage(self, array_params):
        voc = array_voc(STC, array_params)
        vs = np.linspace(0.0, voc, 400)
        i_prev = math.inf
        for v in vs:
            i = array_current(v, STC, array_params)
            assert i <= i_prev + 1e-9
            i_prev = i

    def test_power_curve_unimodal(self, array_params):
        voc = array_voc(STC, array_params)
        vs = np.linspace(0.0, voc, 1000)
        p = np.array([v * array_current(v, STC, array_params) for v in vs])
        dp = np.diff(p)
        signs = np.sign(dp[np.abs(dp) > 1e-9])
        flips = np.count_nonzero(np.diff(signs) != 0)
        assert flips == 1

    def test_photocurrent_linear_in_irradiance(self, array_params):
        for g in (0.0, 250.0, 777.0, 1000.0):
            for tc in (0.0, 25.0, 55.0):
                i_ph, _, _, _, _ = effective_module_params(
                    array_params, OperatingConditions(g, tc)
                )
                expect = (g / 1000.0) * (
                    array_params.i_ph_stc + array_params.alpha_isc * (tc - 25.0)
                )
                assert i_ph == expect

    def test_array_composition(self, array_params, module_params):
        cond = OperatingConditions(640.0, 33.0)
        for v_m in (0.0, 12.5, 25.0, 30.0):
            i_mod = array_current(v_m, cond, module_params)
            i_arr = array_current(v_m * 16, cond, array_params)
            assert i_arr == pytest.approx(153 * i_mod, rel=1e-9, abs=1e-9)

    def test_voc_drops_with_temperature(self, array_params):
        v25 = array_voc(STC, array_params)
        v50 = array_voc(OperatingConditions(1000.0, 50.0), array_params)
        assert v50 < v25
