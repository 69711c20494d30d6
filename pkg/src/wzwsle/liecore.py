"""Finite-dimensional data for sl(n): Chevalley basis, trace form, weights.

Everything on the exact side is integer or Fraction valued.  The Hermitian
orthonormal basis (the X_r used by the growth processes) is never stored
entry-wise; only the rational quadratic expansions of the squares X_r^2
enter exact computations.  Complex-float combinations are exposed
separately for the numerical simulator.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np


class LieDataError(ValueError):
    pass


def _decompose(L, mat):
    """Write an n x n traceless integer matrix in the Chevalley basis."""
    out = {}
    n = L.n
    for (i, j), idx in L._offdiag_index.items():
        v = mat[i][j]
        if v:
            out[idx] = out.get(idx, 0) + int(v)
    # diagonal part: d = sum_i c_i (e_ii - e_{i+1,i+1}) with c_i = d_1 + ... + d_i
    acc = 0
    for i in range(n - 1):
        acc += int(mat[i][i])
        if acc:
            out[L.h_index[i]] = out.get(L.h_index[i], 0) + acc
    return out


class LieData:
    """Chevalley basis of sl(n) with exact structure constants and trace form.

    Basis order: E_a over positive roots a (sorted by height, then start),
    then H_1..H_l, then F_a in the same root order.  Positive roots are
    pairs (i, j) with 0 <= i < j < n meaning eps_i - eps_j.
    """

    def __init__(self, n):
        if n < 2:
            raise LieDataError(f"invalid rank: need n >= 2, got {n}")
        self.n = n
        self.rank = n - 1
        self.hdual = n
        self.positive_roots = sorted(
            ((i, j) for i in range(n) for j in range(i + 1, n)),
            key=lambda r: (r[1] - r[0], r[0]),
        )
        self.labels = (
            [("E",) + r for r in self.positive_roots]
            + [("H", i) for i in range(self.rank)]
            + [("F",) + r for r in self.positive_roots]
        )
        self.dim = len(self.labels)
        self.index = {lab: i for i, lab in enumerate(self.labels)}
        self.h_index = [self.index[("H", i)] for i in range(self.rank)]
        self.theta = self.index[("E", 0, n - 1)]

        mats = []
        for lab in self.labels:
            m = [[0] * n for _ in range(n)]
            if lab[0] == "E":
                m[lab[1]][lab[2]] = 1
            elif lab[0] == "F":
                m[lab[2]][lab[1]] = 1
            else:
                i = lab[1]
                m[i][i] = 1
                m[i + 1][i + 1] = -1
            mats.append(m)
        self.mats = mats
        self._offdiag_index = {}
        for idx, lab in enumerate(self.labels):
            if lab[0] == "E":
                self._offdiag_index[(lab[1], lab[2])] = idx
            elif lab[0] == "F":
                self._offdiag_index[(lab[2], lab[1])] = idx

        self._form = [[0] * self.dim for _ in range(self.dim)]
        for a in range(self.dim):
            for b in range(a, self.dim):
                t = _trace_prod(mats[a], mats[b])
                self._form[a][b] = t
                self._form[b][a] = t

        self._bracket = {}
        for a in range(self.dim):
            for b in range(self.dim):
                comm = _commutator(mats[a], mats[b])
                self._bracket[(a, b)] = tuple(sorted(_decompose(self, comm).items()))

        # Dynkin labels of each generator's h-weight: eigenvalues of ad(H_i)
        gw = []
        for a in range(self.dim):
            lab = []
            for i in range(self.rank):
                br = dict(self._bracket[(self.h_index[i], a)])
                lab.append(br.get(a, 0))
            gw.append(tuple(lab))
        self.gen_weight = gw

        # (Lambda_i | Lambda_j) on the weight lattice: inverse symmetric Cartan
        self.weight_form = [
            [Fraction(min(i, j) + 1) - Fraction((i + 1) * (j + 1), n) for j in range(self.rank)]
            for i in range(self.rank)
        ]

    def bracket(self, a, b):
        """[Y_a, Y_b] as ((index, integer coefficient), ...)."""
        return self._bracket[(a, b)]

    def form(self, a, b):
        """Trace form (Y_a | Y_b), an integer."""
        return self._form[a][b]

    def weight_ip(self, lam, mu):
        """(lam | mu) for weights given by integer Dynkin labels."""
        return sum(
            self.weight_form[i][j] * lam[i] * mu[j]
            for i in range(self.rank)
            for j in range(self.rank)
        )

    def rho(self):
        return (1,) * self.rank

    def is_dominant(self, lam):
        return len(lam) == self.rank and all(m >= 0 for m in lam)

    def weight_level(self, lam):
        # all marks of sl(n) are 1, so the level is the label sum
        return sum(lam)

    def casimir_eigenvalue(self, lam):
        """(lam | lam + 2 rho), the quadratic Casimir scalar on L(lam)."""
        two_rho = tuple(2 * r for r in self.rho())
        return self.weight_ip(lam, tuple(l + t for l, t in zip(lam, two_rho)))

    def __repr__(self):
        return f"LieData(sl{self.n})"


def _trace_prod(a, b):
    n = len(a)
    return sum(a[i][j] * b[j][i] for i in range(n) for j in range(n))


def _commutator(a, b):
    n = len(a)
    ab = [[sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    ba = [[sum(b[i][k] * a[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    return [[ab[i][j] - ba[i][j] for j in range(n)] for i in range(n)]


def build_sl(n: int) -> LieData:
    """Construct the sl(n) Chevalley data.  Raises LieDataError for n < 2."""
    return LieData(n)


@dataclass(frozen=True)
class SquaredGeneratorTable:
    """Rational expansions of the squares of a Hermitian orthonormal basis.

    entries[r] is a tuple of (coefficient, a, b) triples meaning
    X_r^2 = sum coeff * Y_a Y_b (product order matters); coefficients are
    Fractions even though the X_r themselves involve 1/sqrt(2) and i.
    complex_combos[r] gives X_r itself as (complex coefficient, index)
    pairs for float-side use.
    """

    entries: tuple
    complex_combos: tuple
    names: tuple


def squared_table(L: LieData) -> SquaredGeneratorTable:
    """Orthonormal-basis squares for sl(n) under the trace form.

    Cartan directions come from Gram-Schmidt on H_1..H_l in order; each
    positive root a contributes the pair (E_a+F_a)/sqrt(2) and
    i(E_a-F_a)/sqrt(2).
    """
    entries = []
    combos = []
    names = []
    # Gram-Schmidt over the Cartan: v_t = H_t - sum_{s<t} (H_t|u_s) u_s,
    # kept as rational coordinate vectors with squared norms d_t.
    basis_coords = []  # list of (coords over H_i, norm squared)
    A = [[Fraction(L.form(L.h_index[i], L.h_index[j])) for j in range(L.rank)] for i in range(L.rank)]
    for t in range(L.rank):
        coords = [Fraction(int(i == t)) for i in range(L.rank)]
        for prev_coords, prev_norm in basis_coords:
            ip = sum(
                coords[i] * prev_coords[j] * A[i][j]
                for i in range(L.rank)
                for j in range(L.rank)
            )
            coef = ip / prev_norm
            coords = [c - coef * p for c, p in zip(coords, prev_coords)]
        norm = sum(
            coords[i] * coords[j] * A[i][j] for i in range(L.rank) for j in range(L.rank)
        )
        basis_coords.append((coords, norm))
        terms = tuple(
            (coords[i] * coords[j] / norm, L.h_index[i], L.h_index[j])
            for i in range(L.rank)
            for j in range(L.rank)
            if coords[i] and coords[j]
        )
        entries.append(terms)
        inv_sqrt = 1.0 / float(norm) ** 0.5
        combos.append(
            tuple((complex(inv_sqrt * float(coords[i])), L.h_index[i]) for i in range(L.rank) if coords[i])
        )
        names.append(f"cartan{t + 1}")
    half = Fraction(1, 2)
    s = 2.0 ** -0.5
    for root in L.positive_roots:
        e = L.index[("E",) + root]
        f = L.index[("F",) + root]
        # ((E+F)/sqrt2)^2 = (E^2 + EF + FE + F^2)/2
        entries.append(((half, e, e), (half, e, f), (half, f, e), (half, f, f)))
        combos.append(((complex(s), e), (complex(s), f)))
        names.append(f"plus{root}")
        # (i(E-F)/sqrt2)^2 = -(E^2 - EF - FE + F^2)/2
        entries.append(((-half, e, e), (half, e, f), (half, f, e), (-half, f, f)))
        combos.append(((1j * s, e), (-1j * s, f)))
        names.append(f"minus{root}")
    return SquaredGeneratorTable(tuple(entries), tuple(combos), tuple(names))


def conformal_weight(L: LieData, lam, k) -> Fraction:
    """(lam | lam + 2 rho) / (2 (k + hdual))."""
    den = 2 * (Fraction(k) + L.hdual)
    if den == 0:
        raise ZeroDivisionError("level at the critical value -hdual")
    return L.casimir_eigenvalue(lam) / den


def central_charge(L: LieData, k) -> Fraction:
    """k dim(g) / (k + hdual)."""
    return Fraction(k) * L.dim / (Fraction(k) + L.hdual)


class FiniteRep:
    """Irreducible sl(n) representation realized on an exterior power.

    Covers the zero weight (trivial) and all fundamental weights, which is
    every dominant weight of level <= 1.  Matrices are integer numpy
    arrays indexed like LieData.labels.
    """

    def __init__(self, L, lam):
        if not L.is_dominant(lam):
            raise LieDataError(f"weight {lam} is not dominant")
        nz = [i for i, m in enumerate(lam) if m]
        if any(m not in (0, 1) for m in lam) or len(nz) > 1:
            raise LieDataError(
                f"unsupported weight {lam}: only 0 and fundamental weights are realized"
            )
        self.L = L
        self.weight = tuple(lam)
        p = nz[0] + 1 if nz else 0
        self.power = p
        self.basis = list(combinations(range(L.n), p))
        self.dim = len(self.basis)
        idx = {S: i for i, S in enumerate(self.basis)}
        mats = []
        for g, lab in enumerate(L.labels):
            M = np.zeros((self.dim, self.dim), dtype=np.int64)
            gm = L.mats[g]
            for col, S in enumerate(self.basis):
                for row_set, coef in _ext_action(gm, S).items():
                    M[idx[row_set], col] += coef
            mats.append(M)
        self.mat = mats
        self.basis_weight = [
            tuple(int(self.mat[L.h_index[i]][j, j]) for i in range(L.rank))
            for j in range(self.dim)
        ]
        self.hw_index = self.basis_weight.index(self.weight)

    def __repr__(self):
        return f"FiniteRep(sl{self.L.n}, weight={self.weight}, dim={self.dim})"


def _ext_action(gm, S):
    """Action of a gl matrix on a wedge basis element (sorted index tuple)."""
    out = {}
    n = len(gm)
    for pos, b in enumerate(S):
        for a in range(n):
            c = gm[a][b]
            if not c:
                continue
            if a == b:
                out[S] = out.get(S, 0) + c
                continue
            if a in S:
                continue
            rest = S[:pos] + S[pos + 1 :]
            ins = sum(1 for x in rest if x < a)
            sign = (-1) ** ((ins - pos) % 2)
            new = tuple(sorted(rest + (a,)))
            out[new] = out.get(new, 0) + sign * c
    return {k: v for k, v in out.items() if v}


def build_finite_rep(L: LieData, lam) -> FiniteRep:
    return FiniteRep(L, lam)
