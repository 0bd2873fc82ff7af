"""Pure-Python hot-loop kernels (fallback backend).

Mirrors ``_ckernels.pyx`` operation-for-operation so both backends produce
bit-identical trajectories. Keep any change here in sync with the Cython file.

State vector layouts (float64):

reduced (size 6):
    0 t, 1 v_dc, 2 int_vdc, 3 i_d (lagged), 4 i_q (lagged), 5 i_pv

full (size 14):
    0 t, 1 v_dc, 2 i_d, 3 i_q, 4 int_vdc, 5 int_id, 6 int_iq, 7 i_pv,
    8 m_d, 9 m_q, 10 u_d, 11 u_q, 12 v_sd, 13 v_sq

acc (size 3): 0 e_pv, 1 e_grid, 2 e_loss  (trapezoid-integrated energies, J)

dp — per-segment diode/environment params (size 8):
    0 i_ph, 1 i_0, 2 a, 3 r_s, 4 r_sh (module level), 5 n_series,
    6 n_parallel, 7 v_oc (module level)

pp — plant params (size 19):
    0 kp_vdc, 1 ki_vdc, 2 kp_i, 3 ki_i, 4 i_limit, 5 int_v_cap, 6 int_i_cap,
    7 m_max, 8 e_d, 9 omega, 10 l_f, 11 r_l, 12 l_tot, 13 r_tot, 14 l_leak,
    15 r_leak, 16 c_dc, 17 v_collapse, 18 w_lo

advance_* return codes: 0 ok, 1 dc-link collapse, 2 numeric fault.
"""

from math import exp, fabs, log, sqrt

NAN = float("nan")


def diode_current(v, iph, i0, a, rs, rsh, voc, ig):
    """Module current at module voltage ``v`` (bracketed Newton, implicit eq).

    ``v`` is clamped to [0, voc]; ``ig`` < 0 means "no warm-start guess".
    Returns NaN if 100 iterations do not reach 1e-9 relative tolerance
    (cannot happen with a valid bracket; treated as a bug signal upstream).
    """
    if iph <= 0.0:
        return 0.0
    if v >= voc:
        return 0.0
    if v < 0.0:
        v = 0.0
    if ig < 0.0:
        i = iph - i0 * (exp(v / a) - 1.0) - v / rsh
        if i < 0.0:
            i = 0.0
        if i > iph:
            i = iph
    else:
        i = ig
        if i < 0.0:
            i = 0.0
        if i > iph:
            i = iph
    lo = 0.0
    hi = iph
    for _ in range(100):
        x = v + i * rs
        e = exp(x / a)
        f = iph - i0 * (e - 1.0) - x / rsh - i
        if f > 0.0:
            lo = i
        else:
            hi = i
        df = -i0 * (rs / a) * e - rs / rsh - 1.0
        i_new = i - f / df
        if i_new <= lo or i_new >= hi:
            i_new = 0.5 * (lo + hi)
        di = fabs(i_new - i)
        i = i_new
        sc = fabs(i)
        if sc < 1.0:
            sc = 1.0
        if di <= 1e-9 * sc:
            return i
    return NAN


def diode_voc(iph, i0, a, rsh, vg):
    """Module open-circuit voltage (root of the zero-current equation)."""
    if iph <= 0.0:
        return 0.0
    hi = a * log(iph / i0 + 1.0)
    lo = 0.0
    v = vg
    if v <= lo or v >= hi:
        v = hi
    for _ in range(100):
        e = exp(v / a)
        h = iph - i0 * (e - 1.0) - v / rsh
        if h > 0.0:
            lo = v
        else:
            hi = v
        dh = -i0 / a * e - 1.0 / rsh
        v_new = v - h / dh
        if v_new <= lo or v_new >= hi:
            v_new = 0.5 * (lo + hi)
        dv = fabs(v_new - v)
        v = v_new
        sc = fabs(v)
        if sc < 1.0:
            sc = 1.0
        if dv <= 1e-12 * sc:
            return v
    return NAN


def _dc_update(w, p_t, dt2c, iph, i0, a, rs, rsh, ns, npar, voc_m, w_lo, ig):
    """Backward-Euler update of the dc-link energy state w = v_dc^2.

    Solves  w+ = w + dt2c*(p_pv(sqrt(w+)) - p_t)  with a bracketed Newton.
    Returns (v_new, i_module_new, status). A "root" pinned at the lower
    bracket edge surfaces as a collapsing voltage and is caught by the
    caller's v_collapse check.
    """
    voc_a = voc_m * ns
    w_hi = voc_a * voc_a
    if w > w_hi:
        w_hi = w
    if p_t < 0.0:
        w_hi = w_hi - dt2c * p_t
    w_hi = w_hi + 1.0
    lo = w_lo
    hi = w_hi
    wx = w
    if wx <= lo or wx >= hi:
        wx = 0.5 * (lo + hi)
    iw = ig
    v = 0.0
    im = 0.0
    for _ in range(100):
        v = sqrt(wx)
        vm = v / ns
        im = diode_current(vm, iph, i0, a, rs, rsh, voc_m, iw)
        if im != im:
            return v, 0.0, 2
        iw = im
        gval = wx - w - dt2c * (v * (npar * im) - p_t)
        if gval > 0.0:
            hi = wx
        else:
            lo = wx
        if vm >= voc_m or iph <= 0.0:
            didv_m = 0.0
        else:
            x = vm + im * rs
            e = exp(x / a)
            gm = i0 / a * e + 1.0 / rsh
            didv_m = -gm / (1.0 + rs * gm)
        didv_a = didv_m * npar / ns
        dpdw = (npar * im + v * didv_a) / (2.0 * v)
        dg = 1.0 - dt2c * dpdw
        if dg <= 1e-12:
            w_new = 0.5 * (lo + hi)
        else:
            w_new = wx - gval / dg
            if w_new <= lo or w_new >= hi:
                w_new = 0.5 * (lo + hi)
        dw = fabs(w_new - wx)
        wx = w_new
        sc = wx
        if sc < 1.0:
            sc = 1.0
        if dw <= 1e-10 * sc:
            v = sqrt(wx)
            im = diode_current(v / ns, iph, i0, a, rs, rsh, voc_m, iw)
            if im != im:
                return v, 0.0, 2
            return v, im, 0
    return v, im, 2


def advance_reduced(s, acc, n_steps, dt, v_dc_ref, q_ref, lag_alpha, dp, pp):
    """Advance the reduced (energy-balance) plant by n_steps of dt seconds."""
    t = s[0]
    v = s[1]
    int_v = s[2]
    idl = s[3]
    iql = s[4]
    ipv = s[5]

    iph = dp[0]
    i0 = dp[1]
    a = dp[2]
    rs = dp[3]
    rsh = dp[4]
    ns = dp[5]
    npar = dp[6]
    voc_m = dp[7]

    kp_v = pp[0]
    ki_v = pp[1]
    i_lim = pp[4]
    int_v_cap = pp[5]
    e_d = pp[8]
    r_tot = pp[13]
    c_dc = pp[16]
    v_collapse = pp[17]
    w_lo = pp[18]

    dt2c = 2.0 * dt / c_dc
    e15 = 1.5 * e_d
    lim2 = i_lim * i_lim
    iq_cmd0 = -q_ref / e15

    e_pv = acc[0]
    e_gr = acc[1]
    e_ls = acc[2]

    status = 0
    for _ in range(n_steps):
        p_pv0 = v * ipv
        p_gr0 = e15 * idl
        p_ls0 = 1.5 * r_tot * (idl * idl + iql * iql)

        err = v - v_dc_ref
        id_raw = kp_v * err + ki_v * int_v
        iq_raw = iq_cmd0
        mag2 = id_raw * id_raw + iq_raw * iq_raw
        if mag2 > lim2:
            scale = i_lim / sqrt(mag2)
            id_c = id_raw * scale
            iq_c = iq_raw * scale
            sat = 1
        else:
            id_c = id_raw
            iq_c = iq_raw
            sat = 0
        if sat == 0 or (id_raw > 0.0 and err < 0.0) or (id_raw < 0.0 and err > 0.0):
            int_v = int_v + dt * err
            if int_v > int_v_cap:
                int_v = int_v_cap
            elif int_v < -int_v_cap:
                int_v = -int_v_cap

        idl = idl + (id_c - idl) * lag_alpha
        iql = iql + (iq_c - iql) * lag_alpha
        p_t = e15 * idl + 1.5 * r_tot * (idl * idl + iql * iql)

        w = v * v
        v, im, st = _dc_update(
            w, p_t, dt2c, iph, i0, a, rs, rsh, ns, npar, voc_m, w_lo, ipv / npar
        )
        if st != 0:
            status = st
            break
        ipv = npar * im
        if v != v or ipv != ipv:
            status = 2
            break
        if v < v_collapse:
            status = 1
            break

        t = t + dt
        p_pv1 = v * ipv
        p_gr1 = e15 * idl
        p_ls1 = 1.5 * r_tot * (idl * idl + iql * iql)
        e_pv = e_pv + 0.5 * dt * (p_pv0 + p_pv1)
        e_gr = e_gr + 0.5 * dt * (p_gr0 + p_gr1)
        e_ls = e_ls + 0.5 * dt * (p_ls0 + p_ls1)

    s[0] = t
    s[1] = v
    s[2] = int_v
    s[3] = idl
    s[4] = iql
    s[5] = ipv
    acc[0] = e_pv
    acc[1] = e_gr
    acc[2] = e_ls
    return status


def advance_full(s, acc, n_steps, dt, v_dc_ref, q_ref, dp, pp):
    """Advance the full (dq current dynamics) plant by n_steps of dt seconds."""
    t = s[0]
    v = s[1]
    i_d = s[2]
    i_q = s[3]
    int_v = s[4]
    int_id = s[5]
    int_iq = s[6]
    ipv = s[7]
    md = s[8]
    mq = s[9]
    ud = s[10]
    uq = s[11]
    vsd = s[12]
    vsq = s[13]

    iph = dp[0]
    i0 = dp[1]
    a = dp[2]
    rs = dp[3]
    rsh = dp[4]
    ns = dp[5]
    npar = dp[6]
    voc_m = dp[7]

    kp_v = pp[0]
    ki_v = pp[1]
    kp_i = pp[2]
    ki_i = pp[3]
    i_lim = pp[4]
    int_v_cap = pp[5]
    int_i_cap = pp[6]
    m_max = pp[7]
    e_d = pp[8]
    omega = pp[9]
    l_f = pp[10]
    r_l = pp[11]
    l_tot = pp[12]
    r_tot = pp[13]
    l_leak = pp[14]
    r_leak = pp[15]
    c_dc = pp[16]
    v_collapse = pp[17]
    w_lo = pp[18]

    dt2c = 2.0 * dt / c_dc
    e15 = 1.5 * e_d
    lim2 = i_lim * i_lim
    mmax2 = m_max * m_max
    dtl = dt / l_tot

    e_pv = acc[0]
    e_gr = acc[1]
    e_ls = acc[2]

    status = 0
    for _ in range(n_steps):
        p_pv0 = v * ipv
        p_gr0 = e15 * i_d
        p_ls0 = 1.5 * r_tot * (i_d * i_d + i_q * i_q)

        # quasi-static low-side bus voltage seen by the controller
        vsd = e_d + r_leak * i_d - omega * l_leak * i_q
        vsq = r_leak * i_q + omega * l_leak * i_d

        err = v - v_dc_ref
        id_raw = kp_v * err + ki_v * int_v
        iq_raw = -q_ref / (1.5 * vsd)
        mag2 = id_raw * id_raw + iq_raw * iq_raw
        if mag2 > lim2:
            scale = i_lim / sqrt(mag2)
            id_c = id_raw * scale
            iq_c = iq_raw * scale
            sat = 1
        else:
            id_c = id_raw
            iq_c = iq_raw
            sat = 0
        if sat == 0 or (id_raw > 0.0 and err < 0.0) or (id_raw < 0.0 and err > 0.0):
            int_v = int_v + dt * err
            if int_v > int_v_cap:
                int_v = int_v_cap
            elif int_v < -int_v_cap:
                int_v = -int_v_cap

        e_id = id_c - i_d
        e_iq = iq_c - i_q
        ud = kp_i * e_id + ki_i * int_id
        uq = kp_i * e_iq + ki_i * int_iq

        md_raw = (2.0 / v) * (vsd - omega * l_f * i_q + r_l * i_d + ud)
        mq_raw = (2.0 / v) * (vsq + omega * l_f * i_d + r_l * i_q + uq)
        mm2 = md_raw * md_raw + mq_raw * mq_raw
        if mm2 > mmax2:
            mscale = m_max / sqrt(mm2)
            md = md_raw * mscale
            mq = mq_raw * mscale
            msat = 1
        else:
            md = md_raw
            mq = mq_raw
            msat = 0
        if msat == 0:
            int_id = int_id + dt * e_id
            if int_id > int_i_cap:
                int_id = int_i_cap
            elif int_id < -int_i_cap:
                int_id = -int_i_cap
            int_iq = int_iq + dt * e_iq
            if int_iq > int_i_cap:
                int_iq = int_i_cap
            elif int_iq < -int_i_cap:
                int_iq = -int_i_cap

        vtd = 0.5 * md * v
        vtq = 0.5 * mq * v
        did = dtl * (vtd + omega * l_tot * i_q - r_tot * i_d - e_d)
        diq = dtl * (vtq - omega * l_tot * i_d - r_tot * i_q)
        id_new = i_d + did
        iq_new = i_q + diq
        p_t = 1.5 * (vtd * (0.5 * (i_d + id_new)) + vtq * (0.5 * (i_q + iq_new)))
        i_d = id_new
        i_q = iq_new

        w = v * v
        v, im, st = _dc_update(
            w, p_t, dt2c, iph, i0, a, rs, rsh, ns, npar, voc_m, w_lo, ipv / npar
        )
        if st != 0:
            status = st
            break
        ipv = npar * im
        if v != v or ipv != ipv or i_d != i_d or fabs(i_d) > 1e12:
            status = 2
            break
        if v < v_collapse:
            status = 1
            break

        t = t + dt
        p_pv1 = v * ipv
        p_gr1 = e15 * i_d
        p_ls1 = 1.5 * r_tot * (i_d * i_d + i_q * i_q)
        e_pv = e_pv + 0.5 * dt * (p_pv0 + p_pv1)
        e_gr = e_gr + 0.5 * dt * (p_gr0 + p_gr1)
        e_ls = e_ls + 0.5 * dt * (p_ls0 + p_ls1)

    s[0] = t
    s[1] = v
    s[2] = i_d
    s[3] = i_q
    s[4] = int_v
    s[5] = int_id
    s[6] = int_iq
    s[7] = ipv
    s[8] = md
    s[9] = mq
    s[10] = ud
    s[11] = uq
    s[12] = vsd
    s[13] = vsq
    acc[0] = e_pv
    acc[1] = e_gr
    acc[2] = e_ls
    return status
