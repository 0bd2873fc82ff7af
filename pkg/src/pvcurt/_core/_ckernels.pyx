# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot-loop kernels.

Must stay operation-for-operation identical to ``_pykernels.py`` (the
pure-Python fallback); the backend-equivalence tests assert bit-identical
trajectories. See _pykernels.py for the state/param vector layouts.
"""

from libc.math cimport exp, fabs, log, sqrt

cdef double NAN_ = float("nan")


cdef double _diode_current(double v, double iph, double i0, double a,
                           double rs, double rsh, double voc, double ig) noexcept nogil:
    cdef double i, lo, hi, x, e, f, df, i_new, di, sc
    cdef int k
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
    for k in range(100):
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
    return NAN_


cdef double _diode_voc(double iph, double i0, double a, double rsh, double vg) noexcept nogil:
    cdef double hi, lo, v, e, h, dh, v_new, dv, sc
    cdef int k
    if iph <= 0.0:
        return 0.0
    hi = a * log(iph / i0 + 1.0)
    lo = 0.0
    v = vg
    if v <= lo or v >= hi:
        v = hi
    for k in range(100):
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
    return NAN_


cdef int _dc_update(double w, double p_t, double dt2c, double iph, double i0,
                    double a, double rs, double rsh, double ns, double npar,
                    double voc_m, double w_lo, double ig,
                    double* v_out, double* im_out) noexcept nogil:
    cdef double voc_a, w_hi, lo, hi, wx, iw, v, im, vm, gval
    cdef double didv_m, didv_a, dpdw, dg, w_new, dw, sc, x, e, gm
    cdef int k
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
    for k in range(100):
        v = sqrt(wx)
        vm = v / ns
        im = _diode_current(vm, iph, i0, a, rs, rsh, voc_m, iw)
        if im != im:
            v_out[0] = v
            im_out[0] = 0.0
            return 2
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
            im = _diode_current(v / ns, iph, i0, a, rs, rsh, voc_m, iw)
            if im != im:
                v_out[0] = v
                im_out[0] = 0.0
                return 2
            v_out[0] = v
            im_out[0] = im
            return 0
    v_out[0] = v
    im_out[0] = im
    return 2


def diode_current(double v, double iph, double i0, double a, double rs,
                  double rsh, double voc, double ig):
    return _diode_current(v, iph, i0, a, rs, rsh, voc, ig)


def diode_voc(double iph, double i0, double a, double rsh, double vg):
    return _diode_voc(iph, i0, a, rsh, vg)


def advance_reduced(double[::1] s, double[::1] acc, int n_steps, double dt,
                    double v_dc_ref, double q_ref, double lag_alpha,
                    double[::1] dp, double[::1] pp):
    cdef double t = s[0]
    cdef double v = s[1]
    cdef double int_v = s[2]
    cdef double idl = s[3]
    cdef double iql = s[4]
    cdef double ipv = s[5]

    cdef double iph = dp[0]
    cdef double i0 = dp[1]
    cdef double a = dp[2]
    cdef double rs = dp[3]
    cdef double rsh = dp[4]
    cdef double ns = dp[5]
    cdef double npar = dp[6]
    cdef double voc_m = dp[7]

    cdef double kp_v = pp[0]
    cdef double ki_v = pp[1]
    cdef double i_lim = pp[4]
    cdef double int_v_cap = pp[5]
    cdef double e_d = pp[8]
    cdef double r_tot = pp[13]
    cdef double c_dc = pp[16]
    cdef double v_collapse = pp[17]
    cdef double w_lo = pp[18]

    cdef double dt2c = 2.0 * dt / c_dc
    cdef double e15 = 1.5 * e_d
    cdef double lim2 = i_lim * i_lim
    cdef double iq_cmd0 = -q_ref / e15

    cdef double e_pv = acc[0]
    cdef double e_gr = acc[1]
    cdef double e_ls = acc[2]

    cdef double p_pv0, p_gr0, p_ls0, err, id_raw, iq_raw, mag2, scale
    cdef double id_c, iq_c, p_t, w, im, p_pv1, p_gr1, p_ls1
    cdef int sat, st, status, k
    status = 0
    with nogil:
        for k in range(n_steps):
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
            st = _dc_update(w, p_t, dt2c, iph, i0, a, rs, rsh, ns, npar,
                            voc_m, w_lo, ipv / npar, &v, &im)
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


def advance_full(double[::1] s, double[::1] acc, int n_steps, double dt,
                 double v_dc_ref, double q_ref, double[::1] dp, double[::1] pp):
    cdef double t = s[0]
    cdef double v = s[1]
    cdef double i_d = s[2]
    cdef double i_q = s[3]
    cdef double int_v = s[4]
    cdef double int_id = s[5]
    cdef double int_iq = s[6]
    cdef double ipv = s[7]
    cdef double md = s[8]
    cdef double mq = s[9]
    cdef double ud = s[10]
    cdef double uq = s[11]
    cdef double vsd = s[12]
    cdef double vsq = s[13]

    cdef double iph = dp[0]
    cdef double i0 = dp[1]
    cdef double a = dp[2]
    cdef double rs = dp[3]
    cdef double rsh = dp[4]
    cdef double ns = dp[5]
    cdef double npar = dp[6]
    cdef double voc_m = dp[7]

    cdef double kp_v = pp[0]
    cdef double ki_v = pp[1]
    cdef double kp_i = pp[2]
    cdef double ki_i = pp[3]
    cdef double i_lim = pp[4]
    cdef double int_v_cap = pp[5]
    cdef double int_i_cap = pp[6]
    cdef double m_max = pp[7]
    cdef double e_d = pp[8]
    cdef double omega = pp[9]
    cdef double l_f = pp[10]
    cdef double r_l = pp[11]
    cdef double l_tot = pp[12]
    cdef double r_tot = pp[13]
    cdef double l_leak = pp[14]
    cdef double r_leak = pp[15]
    cdef double c_dc = pp[16]
    cdef double v_collapse = pp[17]
    cdef double w_lo = pp[18]

    cdef double dt2c = 2.0 * dt / c_dc
    cdef double e15 = 1.5 * e_d
    cdef double lim2 = i_lim * i_lim
    cdef double mmax2 = m_max * m_max
    cdef double dtl = dt / l_tot

    cdef double e_pv = acc[0]
    cdef double e_gr = acc[1]
    cdef double e_ls = acc[2]

    cdef double p_pv0, p_gr0, p_ls0, err, id_raw, iq_raw, mag2, scale
    cdef double id_c, iq_c, e_id, e_iq, md_raw, mq_raw, mm2, mscale
    cdef double vtd, vtq, did, diq, id_new, iq_new, p_t, w, im
    cdef double p_pv1, p_gr1, p_ls1
    cdef int sat, msat, st, status, k
    status = 0
    with nogil:
        for k in range(n_steps):
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
            st = _dc_update(w, p_t, dt2c, iph, i0, a, rs, rsh, ns, npar,
                            voc_m, w_lo, ipv / npar, &v, &im)
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
