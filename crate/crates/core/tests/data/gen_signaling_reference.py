"""Reference values for the closed-form signaling terms.

Rows tagged `_closed` evaluate the unscaled erf closed forms with enough
digits to absorb the exp(R^2/4l^2) factor exactly; the other rows use direct
mpmath quadrature of the defining integral. Units: amp = 1,
kick = 1, Alice on [0, T].

    python3 gen_signaling_reference.py > signaling_reference.csv
"""
from mpmath import mp, mpf, mpc, erf, erfc, exp, cos, sqrt, pi, quad, nstr

J = mpc(0, 1)


def digits_for(x_max, ell):
    return int(x_max ** 2 / (4 * ell ** 2) / 2.3) + 40


def delta_ell(w, tau, r, ell):
    mp.dps = digits_for(tau, ell)
    w, tau, r, ell = map(mpf, (w, tau, r, ell))
    x = cos(tau * w) * exp(r ** 2 / (4 * ell ** 2) - w * (ell ** 2 * w + J * tau)) * (
        erf(tau / (2 * ell) - J * ell * w) + erfc(r / (2 * ell) - J * ell * w) - 1
        + exp(2 * J * tau * w) * (erf(tau / (2 * ell) + J * ell * w) - erf(r / (2 * ell) + J * ell * w)))
    return (-4 / (16 * sqrt(pi) * ell) * x).real


def delta_direct(w, tau, r, ell):
    mp.dps = 30
    w, tau, r, ell = map(mpf, (w, tau, r, ell))
    k = 2 * ell ** 2 / r
    pts = [r] + [r + m * k for m in (1, 8, 64) if r + m * k < tau] + [tau]
    val = quad(lambda s: cos(w * (tau - s)) * exp((r - s) * (r + s) / (4 * ell ** 2)), pts)
    return -cos(w * tau) / (2 * pi * ell ** 2) * val


def delta_local(w, tau, r):
    mp.dps = 30
    w, tau, r = map(mpf, (w, tau, r))
    return cos(w * tau) * cos(w * (tau - r)) / (pi * r)


def timelike_ell(w, tau, r, t, ell):
    mp.dps = digits_for(tau, ell)
    w, tau, r, t, ell = map(mpf, (w, tau, r, t, ell))
    x = cos(tau * w) * exp(r ** 2 / (4 * ell ** 2) - w * (ell ** 2 * w + J * tau)) * (
        erf(tau / (2 * ell) - J * ell * w) + erf((t - tau) / (2 * ell) + J * ell * w)
        + exp(2 * J * tau * w) * (erf(tau / (2 * ell) + J * ell * w) + erf((t - tau) / (2 * ell) - J * ell * w)))
    return (-4 / (16 * sqrt(pi) * ell) * x).real


def extended(w, a, b, r, t, ell):
    """(s2_local, s2_ell) by direct quadrature."""
    mp.dps = 30
    w, a, b, r, t, ell = map(mpf, (w, a, b, r, t, ell))

    def inner(t2):
        top = min(t, t2 - r)
        if top <= 0:
            return mpf(0)
        # In s = t2 - t1 the kernel decays away from s = r on a scale 2l^2/r.
        lo = t2 - top
        pts = [lo]
        k = 2 * ell ** 2 / r
        for m in (1, 8, 64):
            if lo + m * k < t2:
                pts.append(lo + m * k)
        pts.append(t2)
        return quad(lambda s: cos(w * (t2 - s)) * exp((r - s) * (r + s) / (4 * ell ** 2)), pts)

    pts = [a]
    for m in (1, 8, 64):
        if a + m * 2 * ell ** 2 / r < b:
            pts.append(a + m * 2 * ell ** 2 / r)
    pts.append(b)
    s2_ell = -4 / (8 * pi * ell ** 2) * quad(lambda t2: cos(w * t2) * inner(t2), pts)
    s2_local = quad(lambda t2: cos(w * t2) * cos(w * (t2 - r)), [a, b]) / (pi * r)
    return s2_local, s2_ell


def row(case, w, r, t, p, q, ell, local, ell_part):
    mp.dps = 30
    print(",".join([case] + [repr(float(v)) for v in (w, r, t, p, q, ell)]
                   + [nstr(local, 25), nstr(ell_part, 25), nstr(local + ell_part, 25)]), flush=True)


def main():
    mp.dps = 30
    print("case,omega,R,T,p,q,ell,s2_local,s2_ell,excess")
    for w, tau, ell in [(1, 8, 0.05), (1, 8, 0.3), (1, 8.9, 0.2), (2.5, 8.9, 0.2), (0.4, 7.3, 0.1)]:
        row("delta_closed", w, 7, 2, tau, 0, ell, delta_local(w, tau, 7), delta_ell(w, tau, 7, ell))
    for w, tau, ell in [(1, 8, 0.05), (0, 7.5, 0.01), (1, 8, 0.01), (1, 8, 0.002), (0.4, 7.3, 0.03)]:
        row("delta", w, 7, 2, tau, 0, ell, delta_local(w, tau, 7), delta_direct(w, tau, 7, ell))
    for w, tau, ell in [(1, 12, 0.3), (1, 9.5, 0.3), (1, 10, 1.0), (1, 9.05, 0.1), (2, 9.2, 0.15)]:
        row("timelike_closed", w, 7, 2, tau, 0, ell, mpf(0), timelike_ell(w, tau, 7, 2, ell))
    for w, a, b, ell in [(1, 8, 8.1, 0.1), (1, 8, 8.1, 0.01), (1, 7, 9, 0.05), (1, 7, 9, 0.01),
                         (1e-6, 7, 9, 0.07), (0.3, 7.2, 8.5, 0.5), (2, 7, 8, 0.02)]:
        local, ell_part = extended(w, a, b, 7, 2, ell)
        row("extended", w, 7, 2, a, b, ell, local, ell_part)


if __name__ == "__main__":
    main()
