"""Single-diode (5-parameter) PV array model.

Extracts the five STC parameters from datasheet values, evaluates the
implicit I-V equation with irradiance/temperature scaling, and provides a
maximum-power-point search used both by the controller evaluation and as
the simulator's ground truth.

The module-level equation solved throughout is

    I = I_ph - I_0*(exp((V + I*R_s)/a) - 1) - (V + I*R_s)/R_sh

with the array obtained by the exact series/parallel mapping
(v -> v/n_series, i -> i*n_parallel).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._core import kernels
from .errors import ContractError, ExtractionError, SolverError

BOLTZMANN = 1.380649e-23  # J/K
ELEM_CHARGE = 1.602176634e-19  # C
T_STC_C = 25.0
T_STC_K = 298.15
G_STC = 1000.0  # W/m^2
BANDGAP_EV = 1.121  # silicon band gap used for the I_0(T) scaling


@dataclass(frozen=True)
class ModuleDatasheet:
    """STC datasheet values of a single PV module.

    Attributes:
        v_oc_stc: open-circuit voltage (V).
        i_sc_stc: short-circuit current (A).
        v_mp_stc: voltage at maximum power (V).
        i_mp_stc: current at maximum power (A).
        alpha_isc: short-circuit current temperature coefficient (A/degC).
        beta_voc: open-circuit voltage temperature coefficient (V/degC).
        n_cells: number of series-connected cells in the module.
    """

    v_oc_stc: float
    i_sc_stc: float
    v_mp_stc: float
    i_mp_stc: float
    alpha_isc: float
    beta_voc: float
    n_cells: int

    def __post_init__(self):
        if not 0.0 < self.v_mp_stc < self.v_oc_stc:
            raise ContractError("datasheet requires 0 < v_mp_stc < v_oc_stc")
        if not 0.0 < self.i_mp_stc < self.i_sc_stc:
            raise ContractError("datasheet requires 0 < i_mp_stc < i_sc_stc")
        if self.n_cells < 1:
            raise ContractError("datasheet requires n_cells >= 1")


# Canadian Solar CS6P-250P (60-cell poly, 250 W). Coefficients are the
# datasheet percentages converted to absolute units.
CS6P_250P = ModuleDatasheet(
    v_oc_stc=37.2,
    i_sc_stc=8.87,
    v_mp_stc=30.1,
    i_mp_stc=8.30,
    alpha_isc=0.00065 * 8.87,
    beta_voc=-0.0034 * 37.2,
    n_cells=60,
)


@dataclass(frozen=True)
class PvArrayParams:
    """Extracted 5-parameter model plus array topology.

    All five electrical parameters are module-level at STC; ``a`` is the
    modified ideality factor n*k*T*N_cells/q (volts).
    """

    i_ph_stc: float
    i_0_stc: float
    r_s: float
    r_sh: float
    a: float
    n_series: int
    n_parallel: int
    alpha_isc: float
    beta_voc: float

    def __post_init__(self):
        for name in ("i_ph_stc", "i_0_stc", "r_sh", "a"):
            if getattr(self, name) <= 0.0:
                raise ContractError(f"{name} must be strictly positive")
        if self.r_s < 0.0:
            raise ContractError("r_s must be non-negative")
        if self.i_0_stc / self.i_ph_stc >= 1e-3:
            raise ContractError("i_0_stc must be << i_ph_stc (ratio < 1e-3)")
        if self.n_series < 1 or self.n_parallel < 1:
            raise ContractError("n_series and n_parallel must be >= 1")


@dataclass(frozen=True)
class OperatingConditions:
    """Plane-of-array irradiance (W/m^2) and cell temperature (degC)."""

    irradiance: float
    cell_temperature: float = T_STC_C

    def __post_init__(self):
        if self.irradiance < 0.0:
            raise ContractError("irradiance must be >= 0")
        if not -40.0 <= self.cell_temperature <= 90.0:
            raise ContractError("cell_temperature must be in [-40, 90] degC")


STC = OperatingConditions(G_STC, T_STC_C)


def effective_module_params(params: PvArrayParams, cond: OperatingConditions):
    """Module-level (i_ph, i_0, a, r_s, r_sh) at the given conditions.

    i_ph is linear in irradiance with the alpha_isc correction; i_0 follows
    the cubic-temperature/band-gap form; a is proportional to the absolute
    cell temperature; the resistances are held constant.
    """
    t_k = params_cell_kelvin = cond.cell_temperature + 273.15
    dt = cond.cell_temperature - T_STC_C
    i_ph = (cond.irradiance / G_STC) * (params.i_ph_stc + params.alpha_isc * dt)
    eg_over_k = BANDGAP_EV * ELEM_CHARGE / BOLTZMANN
    i_0 = (
        params.i_0_stc
        * (t_k / T_STC_K) ** 3
        * math.exp(eg_over_k * (1.0 / T_STC_K - 1.0 / t_k))
    )
    a = params.a * (params_cell_kelvin / T_STC_K)
    return i_ph, i_0, a, params.r_s, params.r_sh


def module_voc(params: PvArrayParams, cond: OperatingConditions) -> float:
    """Module open-circuit voltage at the given conditions."""
    i_ph, i_0, a, _, r_sh = effective_module_params(params, cond)
    v = kernels.diode_voc(i_ph, i_0, a, r_sh, -1.0)
    if v != v:
        raise SolverError("open-circuit voltage solve did not converge")
    return v


def array_voc(cond: OperatingConditions, params: PvArrayParams) -> float:
    """Array open-circuit voltage at the given conditions."""
    return module_voc(params, cond) * params.n_series


def array_current(v: float, cond: OperatingConditions, params: PvArrayParams) -> float:
    """Array current at array voltage ``v`` (implicit single-diode solve).

    Voltages outside [0, V_oc(cond)] are clamped to the boundary and the
    boundary current is returned, so the plant stays defined when the
    controller momentarily commands an out-of-range voltage.
    """
    i_ph, i_0, a, r_s, r_sh = effective_module_params(params, cond)
    voc_m = kernels.diode_voc(i_ph, i_0, a, r_sh, -1.0)
    v_m = v / params.n_series
    i_m = kernels.diode_current(v_m, i_ph, i_0, a, r_s, r_sh, voc_m, -1.0)
    if i_m != i_m:
        raise SolverError(
            "implicit I-V solve did not converge",
            bracket=(0.0, i_ph, v_m),
        )
    return params.n_parallel * i_m


def find_mpp(cond: OperatingConditions, params: PvArrayParams):
    """Locate the maximum power point; returns (v_mpp, p_mpp) at array level.

    The P-V curve is unimodal, so a coarse scan brackets the peak and a
    golden-section search refines it to ~1e-6 relative in voltage.
    """
    i_ph, i_0, a, r_s, r_sh = effective_module_params(params, cond)
    voc_m = kernels.diode_voc(i_ph, i_0, a, r_sh, -1.0)
    if voc_m <= 0.0 or i_ph <= 0.0:
        return 0.0, 0.0
    npar = float(params.n_parallel)
    ns = float(params.n_series)

    def p_of(vm):
        im = kernels.diode_current(vm, i_ph, i_0, a, r_s, r_sh, voc_m, -1.0)
        return vm * ns * im * npar

    n_scan = 32
    best_j = 0
    best_p = 0.0
    for j in range(n_scan + 1):
        p = p_of(voc_m * j / n_scan)
        if p > best_p:
            best_p = p
            best_j = j
    lo = voc_m * max(best_j - 1, 0) / n_scan
    hi = voc_m * min(best_j + 1, n_scan) / n_scan

    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - invphi * (hi - lo)
    x2 = lo + invphi * (hi - lo)
    p1 = p_of(x1)
    p2 = p_of(x2)
    tol = 1e-6 * voc_m
    while hi - lo > tol:
        if p1 >= p2:
            hi = x2
            x2 = x1
            p2 = p1
            x1 = hi - invphi * (hi - lo)
            p1 = p_of(x1)
        else:
            lo = x1
            x1 = x2
            p1 = p2
            x2 = lo + invphi * (hi - lo)
            p2 = p_of(x2)
    vm_best = 0.5 * (lo + hi)
    return vm_best * ns, p_of(vm_best)


def _residuals(x, ds: ModuleDatasheet):
    """Scaled residuals of the 5-equation STC system.

    Conditions: short-circuit point, open-circuit point, MPP point,
    dP/dV = 0 at the MPP, and the shunt-slope consistency condition
    dI/dV|_sc = -1/R_sh.
    """
    i_ph, ln_i0, r_s, ln_rsh, a = x
    i_0 = math.exp(ln_i0)
    r_sh = math.exp(ln_rsh)
    isc, voc = ds.i_sc_stc, ds.v_oc_stc
    vmp, imp = ds.v_mp_stc, ds.i_mp_stc

    def f(v, i):
        xj = v + i * r_s
        return i_ph - i_0 * (math.exp(xj / a) - 1.0) - xj / r_sh - i

    def didv(v, i):
        g = i_0 / a * math.exp((v + i * r_s) / a) + 1.0 / r_sh
        return -g / (1.0 + r_s * g)

    r1 = f(0.0, isc) / isc
    r2 = f(voc, 0.0) / isc
    r3 = f(vmp, imp) / isc
    r4 = (imp + vmp * didv(vmp, imp)) * vmp / (vmp * imp)
    g_sc = i_0 / a * math.exp(isc * r_s / a) + 1.0 / r_sh
    r5 = (g_sc / (1.0 + r_s * g_sc) - 1.0 / r_sh) * voc / isc
    return np.array([r1, r2, r3, r4, r5])


def extract_params(
    datasheet: ModuleDatasheet, n_series: int, n_parallel: int
) -> PvArrayParams:
    """Fit the 5-parameter model to the datasheet STC points.

    Damped multivariate Newton on the 5-equation system, seeded with the
    ideality-1.3 heuristic; i_0 and R_sh iterate in log space to keep them
    positive.

    Raises:
        ExtractionError: if the iteration cap is reached or the fitted model
            fails to reproduce the datasheet points.
    """
    if n_series < 1 or n_parallel < 1:
        raise ContractError("n_series and n_parallel must be >= 1")
    vt_mod = datasheet.n_cells * BOLTZMANN * T_STC_K / ELEM_CHARGE
    a0 = 1.3 * vt_mod
    rs0 = (
        a0 * math.log(1.0 - datasheet.i_mp_stc / datasheet.i_sc_stc)
        + datasheet.v_oc_stc
        - datasheet.v_mp_stc
    ) / datasheet.i_mp_stc
    rs0 = max(rs0, 1e-4)
    rsh0 = 100.0 * datasheet.v_oc_stc / datasheet.i_sc_stc
    iph0 = datasheet.i_sc_stc * (1.0 + rs0 / rsh0)
    i00 = (iph0 - datasheet.v_oc_stc / rsh0) / (
        math.exp(datasheet.v_oc_stc / a0) - 1.0
    )

    x = np.array([iph0, math.log(i00), rs0, math.log(rsh0), a0])
    r = _residuals(x, datasheet)
    norm = float(np.max(np.abs(r)))
    for _ in range(100):
        if norm < 1e-11:
            break
        jac = np.empty((5, 5))
        for j in range(5):
            h = 1e-7 * max(abs(x[j]), 1e-3)
            xp = x.copy()
            xp[j] += h
            jac[:, j] = (_residuals(xp, datasheet) - r) / h
        try:
            step = np.linalg.solve(jac, -r)
        except np.linalg.LinAlgError as exc:
            raise ExtractionError(f"singular Jacobian: {exc}", residual=norm)
        lam = 1.0
        for _ in range(30):
            x_new = x + lam * step
            if x_new[0] > 0.0 and x_new[4] > 0.0 and x_new[2] >= 0.0:
                r_new = _residuals(x_new, datasheet)
                norm_new = float(np.max(np.abs(r_new)))
                if norm_new < norm or norm_new < 1e-11:
                    x, r, norm = x_new, r_new, norm_new
                    break
            lam *= 0.5
        else:
            raise ExtractionError(
                "line search stalled during parameter extraction", residual=norm
            )
    else:
        raise ExtractionError(
            "parameter extraction did not converge in 100 iterations",
            residual=norm,
        )

    params = PvArrayParams(
        i_ph_stc=float(x[0]),
        i_0_stc=float(math.exp(x[1])),
        r_s=float(x[2]),
        r_sh=float(math.exp(x[3])),
        a=float(x[4]),
        n_series=n_series,
        n_parallel=n_parallel,
        alpha_isc=datasheet.alpha_isc,
        beta_voc=datasheet.beta_voc,
    )

    # The fitted model must reproduce the datasheet at STC.
    module = PvArrayParams(
        i_ph_stc=params.i_ph_stc,
        i_0_stc=params.i_0_stc,
        r_s=params.r_s,
        r_sh=params.r_sh,
        a=params.a,
        n_series=1,
        n_parallel=1,
        alpha_isc=params.alpha_isc,
        beta_voc=params.beta_voc,
    )
    isc_model = array_current(0.0, STC, module)
    ioc_model = array_current(datasheet.v_oc_stc, STC, module)
    v_mp, p_mp = find_mpp(STC, module)
    checks = (
        abs(isc_model - datasheet.i_sc_stc) <= 1e-3 * datasheet.i_sc_stc
        and abs(ioc_model) <= 1e-3 * datasheet.i_sc_stc
        and abs(v_mp - datasheet.v_mp_stc) <= 0.01 * datasheet.v_mp_stc
        and abs(p_mp - datasheet.v_mp_stc * datasheet.i_mp_stc)
        <= 0.01 * datasheet.v_mp_stc * datasheet.i_mp_stc
    )
    if not checks:
        raise ExtractionError(
            "fitted parameters do not reproduce the datasheet STC points",
            residual=norm,
        )
    return params
