"""Independent transfer model (numpy + scipy DOP853) for freezing reference
efficiencies. Same conventions as the library: frame at the qubit, G = 1,
spin line at `spin`, cavity parked `park` above it, gradient sign -1, spins
start as exp(-i w_j tau_R)/sqrt(N), intrinsic detunings paired with the
induced grid through a golden-ratio stride.
"""
import math

import numpy as np
from scipy.integrate import solve_ivp


def grid(half, n):
    return np.zeros(n) if half == 0 else np.linspace(-half, half, n)


def stride(n):
    s = max(1, round(n / ((1 + 5**0.5) / 2)))
    while math.gcd(s, n) != 1:
        s += 1
    return s


def run(spin=176.0, park=20.0, kappa_sqrt_n=6.0, d_ib=2.0, d_inh=10.0, tau_r=0.15, n=128,
        tail=1.0, shift_b=0.0, cavity_a=None, cavity_c=None):
    kappa = kappa_sqrt_n / math.sqrt(n)
    inh = grid(d_inh, n)
    base = grid(d_ib, n)
    s = stride(n)
    ib = np.array([base[(j * s) % n] for j in range(n)])
    t_s = math.pi / (2 * kappa_sqrt_n)
    t_c = math.pi / 2
    a = spin if cavity_a is None else cavity_a
    c = spin + park if cavity_c is None else cavity_c
    segments = [(t_s, a, 0.0), (t_c, 0.0, shift_b), (tail, c, shift_b)]
    y = np.zeros(n + 2, complex)
    y[:n] = np.exp(-1j * inh * tau_r) / math.sqrt(n)
    for duration, cavity, shift in segments:
        det = spin - inh + ib + shift

        def f(_t, y):
            out = np.empty_like(y)
            out[:n] = -1j * (det * y[:n] + kappa * y[n])
            out[n] = -1j * (cavity * y[n] + kappa * y[:n].sum() + y[n + 1])
            out[n + 1] = -1j * y[n]
            return out

        y = solve_ivp(f, (0, duration), y, method="DOP853", rtol=1e-12, atol=1e-14).y[:, -1]
    return abs(y[n + 1]) ** 2


if __name__ == "__main__":
    print("fig3", repr(run()))
    print("ideal", repr(run(d_ib=0.0, d_inh=0.0)))
    print("variant100", repr(run(spin=20.0, shift_b=100.0, cavity_a=20.0, cavity_c=20.0)))
    print("fig3_n512", repr(run(n=512)))
