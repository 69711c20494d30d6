"""Free-boson lattice realization of the level-1 basic representations.

A completely separate code path from the Weyl-module machinery: states
are (lattice point, Heisenberg occupation) pairs with exact rational
coefficients, vertex operators act by direct exponential-series
expansion, and the Virasoro modes come from the quadratic boson current.
Because this realization is already irreducible, a vector is null there
iff it is literally zero, which is what makes it a useful oracle.
"""

from dataclasses import dataclass
from fractions import Fraction

from . import exactla
from .liecore import LieData


class RootLattice:
    """Type-A root lattice of the given rank; points in simple-root coordinates."""

    def __init__(self, rank):
        if rank < 1:
            raise ValueError("rank must be >= 1")
        self.rank = rank
        self.gram = [
            [2 if i == j else (-1 if abs(i - j) == 1 else 0) for j in range(rank)]
            for i in range(rank)
        ]
        self.gram_inv = exactla.invert(self.gram)

    def ip(self, beta, gamma):
        return sum(
            self.gram[i][j] * beta[i] * gamma[j]
            for i in range(self.rank)
            for j in range(self.rank)
        )

    def norm2(self, beta):
        return self.ip(beta, beta)

    def points_up_to_norm(self, max_norm):
        """All lattice points with (beta|beta) <= max_norm."""
        # (beta|beta) >= (2 - 2cos(pi/(rank+1))) * |beta|^2 in coordinates;
        # a generous box suffices at the scales used here
        bound = max_norm
        out = []

        def rec(coords):
            if len(coords) == self.rank:
                if self.norm2(coords) <= max_norm:
                    out.append(tuple(coords))
                return
            for c in range(-bound, bound + 1):
                rec(coords + [c])

        rec([])
        return out


class Cocycle:
    """Bimultiplicative sign system on the lattice.

    eps(alpha_i, alpha_j) is +1 on one side of the diagonal and
    (-1)^(alpha_i|alpha_j) on the other; "upper" puts the +1 at i <= j,
    "lower" is the transpose convention.  Either choice satisfies
    eps(b,c) eps(c,b) = (-1)^(b|c).
    """

    CONVENTIONS = ("upper", "lower")

    def __init__(self, lattice: RootLattice, convention="upper"):
        if convention not in self.CONVENTIONS:
            raise ValueError(f"unknown cocycle convention {convention!r}")
        self.lattice = lattice
        self.convention = convention
        r = lattice.rank
        self.expo = [[0] * r for _ in range(r)]
        for i in range(r):
            for j in range(r):
                off = (i > j) if convention == "upper" else (i < j)
                if off:
                    self.expo[i][j] = lattice.gram[i][j] % 2

    def eps(self, beta, gamma):
        e = sum(
            self.expo[i][j] * beta[i] * gamma[j]
            for i in range(self.lattice.rank)
            for j in range(self.lattice.rank)
        )
        return -1 if e % 2 else 1


# a state is (beta, occ) with occ a sorted tuple of (level, direction, multiplicity)


def occ_degree(occ):
    return sum(n * mult for n, _, mult in occ)


def state_degree(lattice, state):
    beta, occ = state
    return lattice.norm2(beta) // 2 + occ_degree(occ)


def make_state(beta, occupations=()):
    """Build a canonical state from (level, direction) -> multiplicity data."""
    occ = {}
    for n, d in occupations:
        occ[(n, d)] = occ.get((n, d), 0) + 1
    return (tuple(beta), tuple(sorted((n, d, m) for (n, d), m in occ.items())))


def _occ_insert(occ, n, d, delta):
    items = {(a, b): m for a, b, m in occ}
    items[(n, d)] = items.get((n, d), 0) + delta
    return tuple(sorted((a, b, m) for (a, b), m in items.items() if m))


def vec_add(target, state, coeff):
    if coeff:
        cur = target.get(state, 0) + coeff
        if cur:
            target[state] = cur
        else:
            target.pop(state, None)


def vec_scale(vec, c):
    return {s: c * v for s, v in vec.items()} if c else {}


def vec_sub(u, v):
    out = dict(u)
    for s, c in v.items():
        vec_add(out, s, -c)
    return out


class LatticeModule:
    """Fock spaces over the root lattice with vertex-operator actions."""

    def __init__(self, rank, cocycle="upper"):
        self.lattice = RootLattice(rank)
        self.cocycle = Cocycle(self.lattice, cocycle)
        self.rank = rank

    def vacuum(self):
        return {((0,) * self.rank, ()): Fraction(1)}

    # ---- Heisenberg ------------------------------------------------------

    def heisenberg(self, i, m, vec):
        """Mode alpha_{i,m}: [a_{i,m}, a_{j,n}] = m (alpha_i|alpha_j) delta_{m+n,0}."""
        out = {}
        A = self.lattice.gram
        for (beta, occ), coeff in vec.items():
            if m == 0:
                s = sum(A[i][j] * beta[j] for j in range(self.rank))
                vec_add(out, (beta, occ), coeff * s)
            elif m < 0:
                vec_add(out, (beta, _occ_insert(occ, -m, i, +1)), coeff)
            else:
                for n, d, mult in occ:
                    if n == m and A[i][d]:
                        vec_add(
                            out,
                            (beta, _occ_insert(occ, n, d, -1)),
                            coeff * mult * m * A[i][d],
                        )
        return out

    def _beta_mode(self, beta, m, vec):
        out = {}
        for i, b in enumerate(beta):
            if b:
                for s, c in self.heisenberg(i, m, vec).items():
                    vec_add(out, s, b * c)
        return out

    # ---- vertex operators --------------------------------------------------

    def _exp_series(self, beta, vec, smax, side):
        """Degree-graded coefficients of the exponential of the half current.

        side "cre": exp(sum_n beta_{-n} z^n / n), returns E[s] at z^s.
        side "ann": exp(-sum_n beta_{n} z^-n / n), returns F[s] at z^-s.
        Both use s E_s = sum_n (+-beta_{-+n}) E_{s-n}, valid because the
        half modes commute among themselves.
        """
        série = [dict(vec)]
        for s in range(1, smax + 1):
            acc = {}
            for n in range(1, s + 1):
                mode = -n if side == "cre" else n
                sgn = 1 if side == "cre" else -1
                for st, c in self._beta_mode(beta, mode, série[s - n]).items():
                    vec_add(acc, st, sgn * c)
            série.append({st: Fraction(c, s) for st, c in acc.items()})
        return série

    def vertex(self, beta, m, vec):
        """Mode m of the charge-beta vertex operator, exact.

        Convention: Gamma_beta(z) = sum_m (Gamma_beta)_m z^(-m-1), which is
        the field normalization for (beta|beta) = 2.
        """
        beta = tuple(beta)
        out = {}
        for (gamma, occ), coeff in vec.items():
            ip = self.lattice.ip(beta, gamma)
            sign = self.cocycle.eps(beta, gamma)
            shifted = {(tuple(g + b for g, b in zip(gamma, beta)), occ): Fraction(1)}
            docc = occ_degree(occ)
            ann = self._exp_series(beta, shifted, docc, "ann")
            for s_ann in range(docc + 1):
                if not ann[s_ann]:
                    continue
                s_cre = -m - 1 - ip + s_ann
                if s_cre < 0:
                    continue
                cre = self._exp_series(beta, ann[s_ann], s_cre, "cre")
                for st, c in cre[s_cre].items():
                    vec_add(out, st, coeff * sign * c)
        return out

    # ---- Virasoro ----------------------------------------------------------

    def virasoro(self, m, vec):
        """Boson Sugawara mode: L_m = (1/2) sum G^{ij} :a_i a_j:_m."""
        out = {}
        Ginv = self.lattice.gram_inv
        for state, coeff in vec.items():
            docc = occ_degree(state[1])
            base = {state: coeff}
            for i in range(self.rank):
                for j in range(self.rank):
                    g = Ginv[i][j]
                    if not g:
                        continue
                    half = g * Fraction(1, 2)
                    # creation-ordered part: a_{i,p} a_{j,m-p}, p <= -1
                    for p in range(m - docc, 0):
                        t1 = self.heisenberg(j, m - p, base)
                        if not t1:
                            continue
                        for st, c in self.heisenberg(i, p, t1).items():
                            vec_add(out, st, half * c)
                    # annihilation-first part: a_{j,m-p} a_{i,p}, p >= 0
                    for p in range(0, docc + 1):
                        t1 = self.heisenberg(i, p, base)
                        if not t1:
                            continue
                        for st, c in self.heisenberg(j, m - p, t1).items():
                            vec_add(out, st, half * c)
        return out

    # ---- enumeration -------------------------------------------------------

    def states_of_degree(self, d):
        out = []
        for beta in self.lattice.points_up_to_norm(2 * d):
            rem = d - self.lattice.norm2(beta) // 2
            if rem < 0:
                continue
            for occ in self._occupations(rem):
                out.append((beta, occ))
        return sorted(out)

    def _occupations(self, d):
        # colored partitions of d: parts are (level, direction)
        parts = sorted(
            ((n, c) for n in range(1, d + 1) for c in range(self.rank)), reverse=True
        )

        def rec(start, remaining):
            if remaining == 0:
                yield ()
                return
            for idx in range(start, len(parts)):
                n, c = parts[idx]
                if n <= remaining:
                    for rest in rec(idx, remaining - n):
                        yield ((n, c),) + rest

        return [make_state((0,) * self.rank, occ)[1] for occ in rec(0, d)]

    def dim_of_degree(self, d):
        return len(self.states_of_degree(d))


class FKRealization:
    """Chevalley generators acting on the lattice module.

    Simple-root raising and lowering operators are vertex operators of
    charge +-alpha_i; Cartan modes are the free boson; all other root
    vectors are nested commutators with the zero-mode trick
    Z_m = [X_0, Y_m] for Z = [X, Y].
    """

    def __init__(self, L: LieData, cocycle="upper"):
        self.L = L
        self.module = LatticeModule(L.rank, cocycle)

    def apply(self, gen, m, vec):
        lab = self.L.labels[gen]
        mod = self.module
        if lab[0] == "H":
            return mod.heisenberg(lab[1], m, vec)
        kind, i, j = lab
        if j == i + 1:
            beta = tuple(1 if t == i else 0 for t in range(self.L.rank))
            if kind == "F":
                beta = tuple(-b for b in beta)
            return mod.vertex(beta, m, vec)
        if kind == "E":
            left = self.L.index[("E", i, j - 1)]
            right = self.L.index[("E", j - 1, j)]
        else:
            left = self.L.index[("F", j - 1, j)]
            right = self.L.index[("F", i, j - 1)]
        a = self.apply(left, 0, self.apply(right, m, vec))
        b = self.apply(right, m, self.apply(left, 0, vec))
        return vec_sub(a, b)

    def apply_word(self, word, vec):
        """Apply a PBW word (product of letters, leftmost acting last)."""
        for mode, gen in reversed(word):
            vec = self.apply(gen, mode, vec)
        return vec

    def monomial_image(self, mono):
        """Image of a vacuum-module PBW monomial in the lattice realization."""
        word, top = mono
        if top != 0:
            raise ValueError("lattice realization covers the basic (vacuum) module")
        return self.apply_word(word, self.module.vacuum())

    def vector_image(self, mvec):
        out = {}
        for mono, c in mvec.terms.items():
            for st, cc in self.monomial_image(mono).items():
                vec_add(out, st, Fraction(c) * cc)
        return out

    def verify_relations(self, max_mode=2, max_degree=2):
        """Exhaustive affine-bracket check on all states up to max_degree."""
        L = self.L
        states = self.module.states_of_degree(0)
        for d in range(1, max_degree + 1):
            states += self.module.states_of_degree(d)
        checked = 0
        failures = []
        for a in range(L.dim):
            for b in range(L.dim):
                for m in range(-max_mode, max_mode + 1):
                    for n in range(-max_mode, max_mode + 1):
                        for st in states:
                            v = {st: Fraction(1)}
                            lhs = vec_sub(
                                self.apply(a, m, self.apply(b, n, v)),
                                self.apply(b, n, self.apply(a, m, v)),
                            )
                            rhs = {}
                            for cidx, coef in L.bracket(a, b):
                                for s2, c2 in self.apply(cidx, m + n, v).items():
                                    vec_add(rhs, s2, coef * c2)
                            if m + n == 0:
                                z = m * L.form(a, b)  # level 1: K acts as 1
                                vec_add(rhs, st, Fraction(z))
                            checked += 1
                            if vec_sub(lhs, rhs):
                                failures.append((a, b, m, n, st))
                                if len(failures) >= 5:
                                    return {"checked": checked, "failures": failures, "ok": False}
        return {"checked": checked, "failures": failures, "ok": not failures}


# ---- identity reports -------------------------------------------------------


def _state_json(module, vec):
    return [
        {
            "point": list(beta),
            "occupation": [[n, d, m] for n, d, m in occ],
            "coefficient": exactla.frac_str(c),
        }
        for (beta, occ), c in sorted(vec.items())
    ]


def sl2_expected_states():
    """Closed-form degree-4 expansions used as frozen oracle values."""
    a4 = make_state((0,), ((4, 0),))
    a31 = make_state((0,), ((3, 0), (1, 0)))
    a22 = make_state((0,), ((2, 0), (2, 0)))
    a1111 = make_state((0,), ((1, 0),) * 4)
    f = Fraction
    return {
        "L-2^2": {a31: f(1, 2), a1111: f(1, 16)},
        "E-2F-2": {a4: f(1, 2), a31: f(1, 3), a22: f(1, 4), a1111: f(-1, 12)},
        "F-2E-2": {a4: f(-1, 2), a31: f(1, 3), a22: f(1, 4), a1111: f(-1, 12)},
        "H-2^2": {a22: f(1)},
    }


def candidate_image(fk: FKRealization, table, kappa0, kappa_r, n=2):
    """[-2 L_{-2n} + (kappa0/2) L_{-n}^2 + (1/2) sum_r kappa_r S_r^{(-n)}] |0>."""
    mod = fk.module
    vac = mod.vacuum()
    out = vec_scale(mod.virasoro(-2 * n, vac), Fraction(-2))
    l2 = mod.virasoro(-n, mod.virasoro(-n, vac))
    for st, c in vec_scale(l2, Fraction(kappa0) / 2).items():
        vec_add(out, st, c)
    for r, terms in enumerate(table.entries):
        kr = Fraction(kappa_r[r]) / 2
        if not kr:
            continue
        for c, a, b in terms:
            t = fk.apply(a, -n, fk.apply(b, -n, vac))
            for st, cc in t.items():
                vec_add(out, st, kr * c * cc)
    return out


def verify_state_identities(algebra, cocycle="upper", table=None):
    """State-level identity report for the basic representation.

    For sl2 this checks the four degree-4 operator-state expansions and
    the weighted vanishing sum at (kappa0, kappa_r) = (8/3, 1); for sl3
    it checks the vanishing sum at (12/5, 4/5).  Exact equality of
    rational state vectors throughout.
    """
    from .liecore import build_sl, squared_table

    if algebra not in ("sl2", "sl3"):
        raise ValueError(f"identities are defined for sl2 and sl3, got {algebra!r}")
    n_alg = int(algebra[2:])
    L = build_sl(n_alg)
    table = table or squared_table(L)
    fk = FKRealization(L, cocycle)
    mod = fk.module
    vac = mod.vacuum()
    identities = []

    def record(name, lhs, rhs):
        diff = vec_sub(lhs, rhs)
        identities.append(
            {
                "name": name,
                "holds": not diff,
                "lhs": _state_json(mod, lhs),
                "rhs": _state_json(mod, rhs),
            }
        )

    if algebra == "sl2":
        e, h, fgen = L.index[("E", 0, 1)], L.index[("H", 0)], L.index[("F", 0, 1)]
        expected = sl2_expected_states()
        record("L-2^2", mod.virasoro(-2, mod.virasoro(-2, vac)), dict(expected["L-2^2"]))
        record("E-2F-2", fk.apply(e, -2, fk.apply(fgen, -2, vac)), dict(expected["E-2F-2"]))
        record("F-2E-2", fk.apply(fgen, -2, fk.apply(e, -2, vac)), dict(expected["F-2E-2"]))
        record("H-2^2", fk.apply(h, -2, fk.apply(h, -2, vac)), dict(expected["H-2^2"]))
        null = candidate_image(fk, table, Fraction(8, 3), [Fraction(1)] * len(table.entries))
        record("null_sum", null, {})
    else:
        null = candidate_image(
            fk, table, Fraction(12, 5), [Fraction(4, 5)] * len(table.entries)
        )
        record("null_sum", null, {})
    return {
        "schema": "wzwsle.identities@1",
        "algebra": algebra,
        "cocycle": cocycle,
        "identities": identities,
        "ok": all(i["holds"] for i in identities),
    }


def render_proof_log(report):
    lines = [f"identity report: {report['algebra']} (cocycle {report['cocycle']})"]
    for ident in report["identities"]:
        status = "holds" if ident["holds"] else "FAILS"
        lines.append(f"  {ident['name']}: {status}")
        for side, key in (("lhs", "lhs"), ("rhs", "rhs")):
            terms = ident[key]
            if not terms:
                lines.append(f"    {side}: 0")
                continue
            body = " + ".join(
                f"{t['coefficient']} * (point={t['point']}, occ={t['occupation']})"
                for t in terms
            )
            lines.append(f"    {side}: {body}")
    return "\n".join(lines)
