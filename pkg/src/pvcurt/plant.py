"""Closed-loop electrical plant of the single-stage PV system.

dc-link capacitor, averaged two-level VSC with dq current control and a
dc-voltage PI, L filter plus transformer series leakage into a stiff grid.
Two fidelity levels share the controller structure:

* ``step_full``   — dq current dynamics explicit at <=200 us, dc link
  backward-Euler in energy form (semi-implicit overall);
* ``step_reduced`` — inner current loop replaced by a first-order lag on the
  achieved currents, same dc-link treatment, usable up to 5 ms.

Sensor noise is injected only into the controller-visible measurement frame;
the plant itself integrates noiseless physics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ._core import (
    ACC_SIZE,
    DP_SIZE,
    FUL_SIZE,
    PP_SIZE,
    RED_SIZE,
    kernels,
)
from .errors import ContractError, NumericFaultError, PlantCollapseError
from .pvarray import OperatingConditions, PvArrayParams, effective_module_params, find_mpp

MOD_INDEX_MAX = 1.15  # linear range + overmodulation margin
U_CAP = 500.0  # current-PI integral contribution cap, volts


@dataclass(frozen=True)
class PlantParams:
    """Circuit constants and controller gains (defaults: 500 kVA testbed).

    The transformer magnetizing branch (l_mag_pu, r_mag_pu) is carried for
    documentation only; the model uses the series leakage impedance.
    """

    c_dc: float = 5000e-6
    l_f: float = 100e-6
    r_l: float = 3e-3
    f_grid: float = 60.0
    v_grid_ll_rms: float = 200.0
    s_rated: float = 500e3
    x_leak_pu: float = 0.06
    r_loss_pu: float = 0.0024
    l_mag_pu: float = 200.0
    r_mag_pu: float = 200.0
    kp_vdc: float = 1.0
    ki_vdc: float = 250.0
    kp_i: float = 0.7
    ki_i: float = 50.0
    i_limit: float = 3200.0
    vdc_min: float = 300.0

    def __post_init__(self):
        for name in ("c_dc", "l_f", "f_grid", "v_grid_ll_rms", "s_rated"):
            if getattr(self, name) <= 0.0:
                raise ContractError(f"{name} must be > 0")
        for name in ("r_l", "x_leak_pu", "r_loss_pu"):
            if getattr(self, name) < 0.0:
                raise ContractError(f"{name} must be >= 0")
        for name in ("kp_vdc", "ki_vdc", "kp_i", "ki_i", "i_limit"):
            if getattr(self, name) <= 0.0:
                raise ContractError(f"{name} must be > 0")
        if self.vdc_min <= math.sqrt(2.0) * self.v_grid_ll_rms:
            raise ContractError(
                "vdc_min must exceed the peak line-to-line grid voltage "
                f"({math.sqrt(2.0) * self.v_grid_ll_rms:.1f} V)"
            )

    @property
    def omega(self) -> float:
        return 2.0 * math.pi * self.f_grid

    @property
    def z_base(self) -> float:
        return self.v_grid_ll_rms**2 / self.s_rated

    @property
    def l_leak(self) -> float:
        return self.x_leak_pu * self.z_base / self.omega

    @property
    def r_leak(self) -> float:
        return self.r_loss_pu * self.z_base

    @property
    def e_d(self) -> float:
        """Grid Thevenin d-axis voltage (peak phase, voltage-aligned frame)."""
        return math.sqrt(2.0 / 3.0) * self.v_grid_ll_rms


def pack_plant_params(p: PlantParams) -> np.ndarray:
    pp = np.empty(PP_SIZE)
    pp[0] = p.kp_vdc
    pp[1] = p.ki_vdc
    pp[2] = p.kp_i
    pp[3] = p.ki_i
    pp[4] = p.i_limit
    pp[5] = 2.0 * p.i_limit / p.ki_vdc
    pp[6] = U_CAP / p.ki_i
    pp[7] = MOD_INDEX_MAX
    pp[8] = p.e_d
    pp[9] = p.omega
    pp[10] = p.l_f
    pp[11] = p.r_l
    pp[12] = p.l_f + p.l_leak
    pp[13] = p.r_l + p.r_leak
    pp[14] = p.l_leak
    pp[15] = p.r_leak
    pp[16] = p.c_dc
    pp[17] = 0.5 * p.vdc_min
    pp[18] = (0.25 * p.vdc_min) ** 2
    return pp


def pack_env(array: PvArrayParams, cond: OperatingConditions) -> np.ndarray:
    """Per-segment diode/environment vector for the kernels."""
    i_ph, i_0, a, r_s, r_sh = effective_module_params(array, cond)
    voc_m = kernels.diode_voc(i_ph, i_0, a, r_sh, -1.0)
    dp = np.empty(DP_SIZE)
    dp[0] = i_ph
    dp[1] = i_0
    dp[2] = a
    dp[3] = r_s
    dp[4] = r_sh
    dp[5] = float(array.n_series)
    dp[6] = float(array.n_parallel)
    dp[7] = voc_m
    return dp


@dataclass
class PlantState:
    """Mutable plant state; single-owner, one instance per simulation run."""

    v_dc: float
    i_d: float = 0.0
    i_q: float = 0.0
    int_vdc: float = 0.0
    int_id: float = 0.0
    int_iq: float = 0.0
    v_sd: float = 0.0
    v_sq: float = 0.0
    m_d: float = 0.0
    m_q: float = 0.0
    u_d: float = 0.0
    u_q: float = 0.0
    i_pv: float = 0.0
    t: float = 0.0

    def to_full(self) -> np.ndarray:
        return np.array(
            [
                self.t,
                self.v_dc,
                self.i_d,
                self.i_q,
                self.int_vdc,
                self.int_id,
                self.int_iq,
                self.i_pv,
                self.m_d,
                self.m_q,
                self.u_d,
                self.u_q,
                self.v_sd,
                self.v_sq,
            ]
        )

    @classmethod
    def from_full(cls, s: np.ndarray) -> "PlantState":
        return cls(
            t=s[0],
            v_dc=s[1],
            i_d=s[2],
            i_q=s[3],
            int_vdc=s[4],
            int_id=s[5],
            int_iq=s[6],
            i_pv=s[7],
            m_d=s[8],
            m_q=s[9],
            u_d=s[10],
            u_q=s[11],
            v_sd=s[12],
            v_sq=s[13],
        )

    def to_reduced(self) -> np.ndarray:
        return np.array([self.t, self.v_dc, self.int_vdc, self.i_d, self.i_q, self.i_pv])

    @classmethod
    def from_reduced(cls, s: np.ndarray) -> "PlantState":
        return cls(t=s[0], v_dc=s[1], int_vdc=s[2], i_d=s[3], i_q=s[4], i_pv=s[5])


def init_plant_state(
    v_dc0: float, cond: OperatingConditions, array: PvArrayParams, params: PlantParams
) -> PlantState:
    if v_dc0 <= 0.0:
        raise ContractError("initial v_dc must be > 0")
    dp = pack_env(array, cond)
    i_m = kernels.diode_current(
        v_dc0 / array.n_series, dp[0], dp[1], dp[2], dp[3], dp[4], dp[7], -1.0
    )
    return PlantState(v_dc=v_dc0, i_pv=array.n_parallel * i_m)


def _raise_status(status: int, t: float):
    if status == 1:
        raise PlantCollapseError(
            f"dc-link voltage collapsed below half vdc_min at t={t:.6f} s", t=t
        )
    if status == 2:
        raise NumericFaultError(f"non-finite plant state at t={t:.6f} s", t=t)


def step_full(
    state: PlantState,
    v_dc_ref: float,
    q_ref: float,
    cond: OperatingConditions,
    params: PlantParams,
    array: PvArrayParams,
    dt: float,
) -> PlantState:
    """Advance the full-fidelity plant one step of dt seconds."""
    if dt <= 0.0 or dt > 200e-6:
        raise ContractError("step_full requires 0 < dt <= 200e-6 s")
    if state.v_dc <= 0.0:
        raise ContractError("state.v_dc must be > 0")
    s = state.to_full()
    acc = np.zeros(ACC_SIZE)
    dp = pack_env(array, cond)
    status = kernels.advance_full(s, acc, 1, dt, v_dc_ref, q_ref, dp, pack_plant_params(params))
    _raise_status(status, s[0])
    return PlantState.from_full(s)


def step_reduced(
    state: PlantState,
    v_dc_ref: float,
    cond: OperatingConditions,
    params: PlantParams,
    array: PvArrayParams,
    dt: float,
    lag_tau: float = 2e-3,
    q_ref: float = 0.0,
) -> PlantState:
    """Advance the reduced (energy-balance) plant one step of dt seconds."""
    if dt <= 0.0 or dt > 5e-3:
        raise ContractError("step_reduced requires 0 < dt <= 5e-3 s")
    if state.v_dc <= 0.0:
        raise ContractError("state.v_dc must be > 0")
    s = state.to_reduced()
    acc = np.zeros(ACC_SIZE)
    dp = pack_env(array, cond)
    lag_alpha = 1.0 - math.exp(-dt / lag_tau)
    status = kernels.advance_reduced(
        s, acc, 1, dt, v_dc_ref, q_ref, lag_alpha, dp, pack_plant_params(params)
    )
    _raise_status(status, s[0])
    return PlantState.from_reduced(s)


@dataclass(frozen=True)
class MeasurementFrame:
    """Controller-visible sensor sample (possibly noisy)."""

    p_pv: float
    v_pv: float
    i_pv: float
    v_dc: float
    t: float


def measure(state: PlantState) -> MeasurementFrame:
    return MeasurementFrame(
        p_pv=state.v_dc * state.i_pv,
        v_pv=state.v_dc,
        i_pv=state.i_pv,
        v_dc=state.v_dc,
        t=state.t,
    )


def mpp_ratings(array: PvArrayParams):
    """Fixed channel ratings used as the noise reference (STC MPP values)."""
    v_mpp, p_mpp = find_mpp(OperatingConditions(1000.0, 25.0), array)
    return v_mpp, p_mpp / v_mpp


def add_noise(
    frame: MeasurementFrame,
    snr_db: float,
    rng: np.random.Generator,
    v_rated: float,
    i_rated: float,
) -> MeasurementFrame:
    """Add independent zero-mean Gaussian noise to v_pv, i_pv and v_dc.

    sigma_x = x_rated / 10**(snr_db/20) per channel; p_pv is recomputed from
    the noisy voltage and current. ``snr_db = inf`` disables noise (frame
    returned unchanged, no RNG draws).
    """
    if snr_db is None or snr_db == math.inf:
        return frame
    if snr_db <= 0.0:
        raise ContractError("snr_db must be > 0 (or inf to disable)")
    sf = 10.0 ** (-snr_db / 20.0)
    nv, ni, nd = rng.standard_normal(3)
    v_pv = frame.v_pv + v_rated * sf * nv
    i_pv = frame.i_pv + i_rated * sf * ni
    v_dc = frame.v_dc + v_rated * sf * nd
    return replace(frame, p_pv=v_pv * i_pv, v_pv=v_pv, i_pv=i_pv, v_dc=v_dc)
