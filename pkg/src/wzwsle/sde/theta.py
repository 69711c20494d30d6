"""Finite-dimensional group-valued series process Theta_t(z).

Theta is a z^-1-power series with matrix coefficients acting on a
finite-dimensional representation; its right-invariant increment is

    dTheta Theta^-1 = sum_r X_r dtheta_r + (1/2) sum_{r,s} X_r X_s dtheta_r dtheta_s,

and with dtheta_r = f^-n dB_r the Ito term collapses to
(1/2) sum_r kappa_r f^-2n X_r^2 dt.  Everything here is plain numpy;
this process is not on the hot path.
"""

import numpy as np

from ..liecore import LieData, FiniteRep, squared_table
from .laurent import LaurentState, NoisePath, ser_pow, step_f_theta


def hermitian_generators(L: LieData, rep: FiniteRep):
    """Complex matrices of the orthonormal generators in the given rep."""
    table = squared_table(L)
    out = []
    for combo in table.complex_combos:
        m = np.zeros((rep.dim, rep.dim), dtype=np.complex128)
        for coef, a in combo:
            m += coef * rep.mat[a]
        out.append(m)
    return out


def theta_initial(depth: int, dim: int):
    theta = np.zeros((depth + 1, dim, dim), dtype=np.complex128)
    theta[0] = np.eye(dim)
    return theta


def step_theta_group(theta, f_state: LaurentState, inc_row, dt, n, kappas_r, xr_mats):
    """One Euler-Maruyama step of Theta on the truncated z-window.

    inc_row holds the dB increments, column 0 for the f-direction (unused
    here) and columns 1.. for the generators.
    """
    depth = theta.shape[0] - 1
    dim = theta.shape[1]
    fn = ser_pow(f_state.fc, -n)      # weight -n
    f2n = ser_pow(f_state.fc, -2 * n)  # weight -2n
    op = np.zeros_like(theta)
    for j in range(n, depth + 1):
        coeff = fn[j - n]
        if coeff:
            for r, X in enumerate(xr_mats):
                op[j] += (inc_row[1 + r] * coeff) * X
    for j in range(2 * n, depth + 1):
        coeff = f2n[j - 2 * n]
        if coeff:
            for r, X in enumerate(xr_mats):
                op[j] += (0.5 * dt * float(kappas_r[r]) * coeff) * (X @ X)
    new = theta.copy()
    for j in range(depth + 1):
        for i in range(j + 1):
            if op[i].any():
                new[j] += op[i] @ theta[j - i]
    return new


def run_theta(L: LieData, rep: FiniteRep, noise: NoisePath, n, kappa0, kappas_r, depth=8):
    """Joint evolution of (f, Theta) on one noise path.

    Returns (theta trajectory as a list, final LaurentState, censored flag).
    """
    xr = hermitian_generators(L, rep)
    state = LaurentState.initial(depth, len(xr))
    theta = theta_initial(depth, rep.dim)
    traj = [theta]
    for s in range(noise.steps):
        theta = step_theta_group(theta, state, noise.increments[s], noise.dt, n, kappas_r, xr)
        try:
            state = step_f_theta(state, noise.increments[s], noise.dt, n, kappa0)
        except FloatingPointError:
            return traj, state, s
        traj.append(theta)
    return traj, state, -1


def deterministic_theta_mean(L: LieData, rep: FiniteRep, noise: NoisePath, n, kappa0, kappas_r, depth=8):
    """Conditional mean recursion M_{t+dt} = (I + (1/2) sum kappa_r f^-2n X_r^2 dt) M_t.

    Runs on the same grid and the same f path (column 0 of the noise);
    with kappa0 = 0 the f path is deterministic and this is the exact
    scheme expectation of Theta over the generator noise.
    """
    xr = hermitian_generators(L, rep)
    state = LaurentState.initial(depth, len(xr))
    mean = theta_initial(depth, rep.dim)
    for s in range(noise.steps):
        zero_inc = np.zeros(len(kappas_r) + 1)
        zero_inc[0] = noise.increments[s, 0]
        mean = step_theta_group(mean, state, zero_inc, noise.dt, n, kappas_r, xr)
        state = step_f_theta(state, noise.increments[s], noise.dt, n, kappa0)
    return mean
