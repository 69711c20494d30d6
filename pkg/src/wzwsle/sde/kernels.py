"""Hot inner loops for the path simulators, in numba and pure-numpy variants.

Backend selection: the WZWSLE_BACKEND environment variable may be set to
"numba", "numpy", or "auto" (default).  Under "auto" the jitted kernels
are used when numba imports cleanly.  Both variants implement the same
recurrences; they differ only in loop order, so results agree to
floating-point roundoff and each backend is deterministic on its own.
"""

import os

import numpy as np

_REQUESTED = os.environ.get("WZWSLE_BACKEND", "auto").lower()
if _REQUESTED not in ("auto", "numba", "numpy"):
    raise ValueError(f"WZWSLE_BACKEND must be auto|numba|numpy, got {_REQUESTED!r}")

_HAVE_NUMBA = False
if _REQUESTED in ("auto", "numba"):
    try:
        from numba import njit

        _HAVE_NUMBA = True
    except ImportError:
        if _REQUESTED == "numba":
            raise

BACKEND = "numba" if _HAVE_NUMBA else "numpy"


def active_backend():
    return BACKEND


# ---- module-path evolution ---------------------------------------------------
# One Euler-Maruyama step multiplies the group element on the right by
#   I + A dt + sum_i sigma_i dB_i,
# so the vector G_T w is accumulated by applying step factors to w in
# reverse time order; the factors are iid, which leaves every statistic
# of G_T w unchanged and keeps the loop a plain matvec recursion.


def _mc_numpy(w, b0, sigmas, dB, out):
    P, steps, nsig = dB.shape
    phi = np.broadcast_to(w, (P, w.shape[0])).copy()
    for s in range(steps):
        new = phi @ b0.T
        for i in range(nsig):
            new += dB[:, s, i : i + 1] * (phi @ sigmas[i].T)
        phi = new
    out[:] = phi


if _HAVE_NUMBA:

    @njit(cache=True)
    def _mc_numba(w, b0, sigmas, dB, out):  # pragma: no cover - exercised via wrapper
        P, steps, nsig = dB.shape
        dim = w.shape[0]
        for p in range(P):
            phi = w.copy()
            for s in range(steps):
                new = b0 @ phi
                for i in range(nsig):
                    new = new + dB[p, s, i] * (sigmas[i] @ phi)
                phi = new
            out[p] = phi


def evolve_module_paths(w, b0, sigmas, dB, backend=None):
    """Evolve a block of paths; returns the (P, dim) final-vector array.

    w: complex start vector; b0 = I + A dt; sigmas: (nsig, dim, dim);
    dB: (P, steps, nsig) float increments.
    """
    w = np.ascontiguousarray(w, dtype=np.complex128)
    b0 = np.ascontiguousarray(b0, dtype=np.complex128)
    sigmas = np.ascontiguousarray(sigmas, dtype=np.complex128)
    dB = np.ascontiguousarray(dB, dtype=np.float64)
    out = np.empty((dB.shape[0], w.shape[0]), dtype=np.complex128)
    use = backend or BACKEND
    if use == "numba" and _HAVE_NUMBA:
        _mc_numba(w, b0, sigmas, dB, out)
    else:
        _mc_numpy(w, b0, sigmas, dB, out)
    return out


# ---- truncated Laurent coefficient evolution ----------------------------------
# f is stored as f = sum_k fc[k] z^(1-k), theta_r as sum_j th[r,j] z^(-j).
# Retained coefficients of every update depend only on retained ones, so
# runs at different depths agree bit for bit on the shared window.


def _ftheta_numpy(fc, th, dB, dt, n, drift_c, eps, censored):
    P, K = fc.shape
    steps = dB.shape[1]
    R = th.shape[1]
    pmax = max(2 * n - 1, n)
    for s in range(steps):
        alive = censored < 0
        small = np.abs(fc[:, 0]) < eps
        newly = alive & small
        censored[newly] = s
        alive = censored < 0
        if not alive.any():
            break
        a1 = fc[alive, 0]
        u = fc[alive] / a1[:, None]
        inv = np.zeros_like(u)
        inv[:, 0] = 1.0
        for k in range(1, K):
            acc = np.zeros_like(a1)
            for j in range(1, k + 1):
                acc += u[:, j] * inv[:, k - j]
            inv[:, k] = -acc
        powers = [np.zeros_like(u) for _ in range(pmax + 1)]
        powers[0][:, 0] = 1.0
        for p in range(1, pmax + 1):
            prev = powers[p - 1]
            for k in range(K):
                acc = np.zeros_like(a1)
                for j in range(k + 1):
                    acc += prev[:, j] * inv[:, k - j]
                powers[p][:, k] = acc
        p1 = powers[2 * n - 1] * (a1 ** (1 - 2 * n))[:, None]
        p2 = powers[n - 1] * (a1 ** (1 - n))[:, None]
        p3 = powers[n] * (a1 ** (-n))[:, None]
        db0 = dB[alive, s, 0]
        newf = fc[alive].copy()
        for k in range(2 * n, K):
            newf[:, k] += dt * drift_c * p1[:, k - 2 * n]
        for k in range(n, K):
            newf[:, k] -= db0 * p2[:, k - n]
        fc[alive] = newf
        for r in range(R):
            dbr = dB[alive, s, 1 + r]
            for j in range(n, K):
                th[alive, r, j] += dbr * p3[:, j - n]


if _HAVE_NUMBA:

    @njit(cache=True)
    def _ftheta_numba(fc, th, dB, dt, n, drift_c, eps, censored):  # pragma: no cover
        P, K = fc.shape
        steps = dB.shape[1]
        R = th.shape[1]
        pmax = max(2 * n - 1, n)
        u = np.empty(K)
        inv = np.empty(K)
        pws = np.empty((pmax + 1, K))
        for p in range(P):
            for s in range(steps):
                a1 = fc[p, 0]
                if abs(a1) < eps:
                    if censored[p] < 0:
                        censored[p] = s
                    break
                for k in range(K):
                    u[k] = fc[p, k] / a1
                inv[0] = 1.0
                for k in range(1, K):
                    acc = 0.0
                    for j in range(1, k + 1):
                        acc += u[j] * inv[k - j]
                    inv[k] = -acc
                for k in range(K):
                    pws[0, k] = 0.0
                pws[0, 0] = 1.0
                for q in range(1, pmax + 1):
                    for k in range(K):
                        acc = 0.0
                        for j in range(k + 1):
                            acc += pws[q - 1, j] * inv[k - j]
                        pws[q, k] = acc
                s1 = a1 ** (1 - 2 * n)
                s2 = a1 ** (1 - n)
                s3 = a1 ** (-n)
                db0 = dB[p, s, 0]
                for k in range(K - 1, 2 * n - 1, -1):
                    fc[p, k] += dt * drift_c * s1 * pws[2 * n - 1, k - 2 * n]
                for k in range(K - 1, n - 1, -1):
                    fc[p, k] -= db0 * s2 * pws[n - 1, k - n]
                for r in range(R):
                    dbr = dB[p, s, 1 + r]
                    for j in range(n, K):
                        th[p, r, j] += dbr * s3 * pws[n, j - n]


def evolve_f_theta(fc, th, dB, dt, n, drift_c, eps=1e-9, backend=None):
    """Evolve f/theta coefficient arrays in place over the given increments.

    fc: (P, K) float64, th: (P, R, K) float64, dB: (P, steps, 1+R).
    Returns the censoring array: step index where |a_1| dropped below eps,
    or -1 for paths that stayed alive.
    """
    fc = np.ascontiguousarray(fc, dtype=np.float64)
    th = np.ascontiguousarray(th, dtype=np.float64)
    dB = np.ascontiguousarray(dB, dtype=np.float64)
    censored = np.full(fc.shape[0], -1, dtype=np.int64)
    use = backend or BACKEND
    if use == "numba" and _HAVE_NUMBA:
        _ftheta_numba(fc, th, dB, float(dt), int(n), float(drift_c), float(eps), censored)
    else:
        _ftheta_numpy(fc, th, dB, float(dt), int(n), float(drift_c), float(eps), censored)
    return fc, th, censored
