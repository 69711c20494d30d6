"""Laurent-coefficient growth process: the f/theta system and the map g.

State convention: f_t(z) = sum_k fc[k] z^(1-k) with fc[0] = a_1 != 0,
truncated at depth K = D_z + 1; each theta_r lives in powers z^0..z^-D_z.
The Euler-Maruyama update is

    df     = (2 - kappa_0 (n-1)/2) f^(1-2n) dt - f^(1-n) dB0
    dtheta = f^(-n) dB_r

with every series power computed by exact truncated arithmetic, so the
retained window is closed under the dynamics.
"""

from dataclasses import dataclass, field

import numpy as np

from . import kernels


def path_seed(master_seed: int, index: int) -> int:
    return (int(master_seed) ^ int(index)) & (2**63 - 1)


@dataclass
class NoisePath:
    """Seeded Gaussian increments, one column per Brownian direction.

    Column 0 drives f (variance kappas[0] dt); columns 1.. drive the
    theta components.  Distinct columns are independent.
    """

    seed: int
    dt: float
    steps: int
    kappas: np.ndarray
    increments: np.ndarray = field(default=None)

    def __post_init__(self):
        self.kappas = np.asarray(self.kappas, dtype=np.float64)
        if (self.kappas < 0).any():
            raise ValueError("variances must be nonnegative")
        if self.increments is None:
            rng = np.random.Generator(np.random.Philox(key=self.seed))
            z = rng.standard_normal((self.steps, len(self.kappas)))
            self.increments = z * np.sqrt(self.kappas * self.dt)

    def coarsen(self, factor: int) -> "NoisePath":
        """Aggregate consecutive increments; same Brownian path, larger dt."""
        if self.steps % factor:
            raise ValueError("steps must be divisible by the coarsening factor")
        inc = self.increments.reshape(self.steps // factor, factor, -1).sum(axis=1)
        return NoisePath(self.seed, self.dt * factor, self.steps // factor, self.kappas, inc)


@dataclass
class LaurentState:
    """Truncated coefficients of f_t and the theta_r series at time t."""

    depth: int  # D_z
    fc: np.ndarray  # (depth+1,)
    theta: np.ndarray  # (ngen, depth+1)
    t: float = 0.0

    @classmethod
    def initial(cls, depth, ngen):
        fc = np.zeros(depth + 1)
        fc[0] = 1.0  # f_0(z) = z
        return cls(depth, fc, np.zeros((ngen, depth + 1)), 0.0)

    @property
    def a1(self):
        return self.fc[0]


def drift_coefficient(n: int, kappa0: float) -> float:
    return 2.0 - 0.5 * float(kappa0) * (n - 1)


def step_f_theta(state: LaurentState, inc_row, dt, n, kappa0, eps=1e-9, backend=None):
    """One Euler-Maruyama step; raises on a blown-up path."""
    fc = state.fc[None, :].copy()
    th = state.theta[None, :, :].copy()
    dB = np.asarray(inc_row, dtype=np.float64)[None, None, :]
    fc, th, censored = kernels.evolve_f_theta(
        fc, th, dB, dt, n, drift_coefficient(n, kappa0), eps=eps, backend=backend
    )
    if censored[0] >= 0:
        raise FloatingPointError("blow-up: |a_1| fell below the censoring threshold")
    return LaurentState(state.depth, fc[0], th[0], state.t + dt)


def run_f_theta(noise: NoisePath, n, kappa0, depth=12, record=False, eps=1e-9, backend=None):
    """Evolve the full path; optionally record the state after every step.

    Returns (states, censored_step) where states is the final LaurentState
    or, with record=True, the list of all states including the initial one.
    """
    ngen = len(noise.kappas) - 1
    state = LaurentState.initial(depth, ngen)
    if not record:
        fc = state.fc[None, :].copy()
        th = state.theta[None, :, :].copy()
        fc, th, censored = kernels.evolve_f_theta(
            fc,
            th,
            noise.increments[None, :, :],
            noise.dt,
            n,
            drift_coefficient(n, kappa0),
            eps=eps,
            backend=backend,
        )
        final = LaurentState(depth, fc[0], th[0], noise.dt * noise.steps)
        return final, int(censored[0])
    states = [state]
    for s in range(noise.steps):
        try:
            state = step_f_theta(
                state, noise.increments[s], noise.dt, n, kappa0, eps=eps, backend=backend
            )
        except FloatingPointError:
            return states, s
        states.append(state)
    return states, -1


# ---- series helpers (weighted truncated Laurent series) ------------------------
# A series of weight w with coefficient array c represents
# sum_k c[k] z^(w-k); arrays have a fixed length K = depth+1.


def ser_mul(a, b):
    K = len(a)
    out = np.zeros(K, dtype=np.result_type(a, b))
    for k in range(K):
        out[k] = np.dot(a[: k + 1], b[k::-1])
    return out


def ser_inv(a):
    """Reciprocal of a series with a[0] != 0 (weight negates)."""
    K = len(a)
    out = np.zeros(K, dtype=np.asarray(a).dtype)
    out[0] = 1.0 / a[0]
    for k in range(1, K):
        out[k] = -np.dot(a[1 : k + 1], out[k - 1 :: -1]) / a[0]
    return out


def ser_pow(a, p):
    """Integer power of a series with a[0] != 0."""
    K = len(a)
    base = a if p >= 0 else ser_inv(a)
    q = abs(p)
    out = np.zeros(K, dtype=np.asarray(base).dtype)
    out[0] = 1.0
    for _ in range(q):
        out = ser_mul(out, base)
    return out


def f_power(fc, p):
    """(coefficients, weight) of f^p from the weight-1 state array."""
    return ser_pow(fc, p), p


def g_from_f(state: LaurentState, n: int, b0: float):
    """g = f^n + n B0 as a weight-n coefficient array.

    The additive constant lands at z^0, i.e. array index n; depths
    below n would drop it, so depth >= n is required.
    """
    if state.depth < n:
        raise ValueError("depth must be at least n to represent g")
    g = ser_pow(state.fc, n)
    g[n] += n * b0
    return g


def integrate_g_direct(noise: NoisePath, n, depth=12):
    """Integrate dg = 2n/(g - n B0) dt on the shared path (Euler).

    Returns the list of weight-n coefficient arrays after every step,
    starting from g_0(z) = z^n.
    """
    K = depth + 1
    g = np.zeros(K)
    g[0] = 1.0
    out = [g.copy()]
    b0 = 0.0
    for s in range(noise.steps):
        core = g.copy()
        core[n] -= n * b0  # g - n B0 has weight n with unit leading coefficient
        inv = ser_inv(core)  # weight -n
        upd = np.zeros(K)
        for k in range(2 * n, K):
            upd[k] = 2 * n * inv[k - 2 * n]
        g = g + noise.dt * upd
        b0 += noise.increments[s, 0]
        out.append(g.copy())
    return out


def pathwise_g_residual(noise: NoisePath, n, kappa0, depth=12, backend=None):
    """Sup over steps of the coefficient gap between f^n + nB0 and direct g."""
    states, censored = run_f_theta(noise, n, kappa0, depth=depth, record=True, backend=backend)
    direct = integrate_g_direct(noise, n, depth=depth)
    b0 = np.concatenate([[0.0], np.cumsum(noise.increments[:, 0])])
    worst = 0.0
    for i, st in enumerate(states):
        resid = np.max(np.abs(g_from_f(st, n, b0[i]) - direct[i]))
        worst = max(worst, float(resid))
    return worst, censored


def strong_order_study(n, kappa0, T, exponents=range(8, 13), depth=12, seed=7, n_paths=24):
    """Fit the strong-order slope of the g residual across dt = 2^-e * T.

    The same Brownian path is refined across levels by aggregating the
    finest increments; a residual-vs-dt slope is fitted per path and the
    median over paths is reported (single near-blow-up paths otherwise
    dominate the coarse levels).  Returns (slope, dts, median residuals).
    """
    exponents = sorted(exponents)
    finest = exponents[-1]
    dts = np.array([T / 2**e for e in exponents])
    log_dts = np.log2(dts)
    slopes = []
    residuals = []
    for p in range(n_paths):
        base = NoisePath(path_seed(seed, p), T / 2**finest, 2**finest, [kappa0])
        rs = []
        for e in exponents:
            noise = base.coarsen(2 ** (finest - e)) if e != finest else base
            r, censored = pathwise_g_residual(noise, n, kappa0, depth=depth)
            rs.append(r if censored < 0 else np.nan)
        rs = np.array(rs)
        if np.isnan(rs).any() or (rs <= 0).any():
            continue
        residuals.append(rs)
        slopes.append(np.polyfit(log_dts, np.log2(rs), 1)[0])
    if not slopes:
        raise FloatingPointError("every sample path blew up during the study")
    med = np.median(np.array(residuals), axis=0)
    return float(np.median(slopes)), dts, med


def inverse_at_infinity(coeffs, weight):
    """1/s(1/w) for s(z) = sum coeffs[k] z^(weight-k), as (lead, array).

    The result is sum out[j] w^(lead+j) with lead = weight; out[0] != 0
    certifies the leading behavior (w^1 for group elements, w^n, n >= 2,
    for the rescaled map, which is therefore not invertible).
    """
    if coeffs[0] == 0:
        raise ValueError("leading coefficient vanishes")
    # s(1/w) = w^-weight * sum coeffs[k] w^k; reciprocal flips the sign
    return weight, ser_inv(np.asarray(coeffs, dtype=np.float64))
