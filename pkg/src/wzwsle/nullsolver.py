"""Null-vector candidates in Weyl modules and exact kappa solving.

A candidate is the affine-linear family

    v(kappa) = [-2 L_{-2n} + (kappa_0/2) L_{-n}^2
                + (1/2) sum_r kappa_r (X_r)_{-n}^2] w

over the degree-(2n + deg w) slice, with the squares (X_r)^2 expanded
through the rational table.  Nullity of v is equivalent to v pairing to
zero against the whole slice, so solving for kappa is an exact linear
system over the rationals, handled by fraction-free elimination.
"""

import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm

from . import exactla
from .liecore import build_sl
from .weylmod import ModuleVector, WeylModule, build_weyl

# reference solutions for the basic representations, used only to annotate
# reports; solving never consults them
REFERENCE_SOLUTIONS = {
    ("sl2", 2): {"kappa0": Fraction(8, 3), "tau": Fraction(1)},
    ("sl3", 2): {"kappa0": Fraction(12, 5), "tau": Fraction(4, 5)},
}


@dataclass
class NullCandidate:
    """Affine-linear family of degree-homogeneous vectors in kappa."""

    module: WeylModule
    w: ModuleVector
    n: int
    tie: str  # "per-generator" or "single-tau"
    v_const: ModuleVector
    unknowns: tuple  # names, aligned with family
    family: tuple  # ModuleVectors multiplying each unknown

    def at(self, values):
        """Evaluate the family at a kappa assignment (dict name -> rational)."""
        v = self.v_const
        for name, vec in zip(self.unknowns, self.family):
            v = v + vec.scale(Fraction(values[name]))
        return v

    @property
    def degree(self):
        return 2 * self.n


@dataclass
class SolveReport:
    status: str  # "unique-solution", "family", "infeasible"
    unknowns: tuple = ()
    values: dict = field(default_factory=dict)  # name -> Fraction (particular)
    kernel: list = field(default_factory=list)  # basis of homogeneous solutions
    positive: bool | None = None
    algebraic_only: bool = False
    residual_max: Fraction = Fraction(0)
    matches_reference: bool | None = None
    meta: dict = field(default_factory=dict)

    def to_json(self):
        out = {
            "schema": "wzwsle.solve_report@1",
            "status": self.status,
            "unknowns": list(self.unknowns),
            "values": {k: exactla.frac_str(v) for k, v in self.values.items()},
            "kernel": [[exactla.frac_str(x) for x in vec] for vec in self.kernel],
            "positive": self.positive,
            "algebraic_only": self.algebraic_only,
            "residual_max": exactla.frac_str(self.residual_max),
            "matches_reference": self.matches_reference,
        }
        out.update(self.meta)
        return out


def build_candidate(M: WeylModule, w: ModuleVector, n: int, tie="per-generator") -> NullCandidate:
    """Assemble the candidate family at mode depth n on top vector w."""
    if w.is_zero():
        raise ValueError("top vector w must be nonzero")
    if w.degree() != 0:
        raise ValueError("w must live in the top space (degree 0)")
    if 2 * n > M.D:
        raise ValueError(f"candidate degree {2 * n} exceeds build depth {M.D}")
    if tie not in ("per-generator", "single-tau"):
        raise ValueError(f"unknown tie {tie!r}")
    v_const = M.sugawara(-2 * n, w).scale(-2)
    v0 = M.sugawara(-n, M.sugawara(-n, w)).scale(Fraction(1, 2))
    per_gen = []
    for terms in M.table.entries:
        vr = ModuleVector()
        for c, a, b in terms:
            vr = vr + M.apply_gen(a, -n, M.apply_gen(b, -n, w)).scale(c)
        per_gen.append(vr.scale(Fraction(1, 2)))
    if tie == "per-generator":
        unknowns = ("kappa0",) + tuple(f"kappa{r + 1}" for r in range(len(per_gen)))
        family = (v0,) + tuple(per_gen)
    else:
        vtau = ModuleVector()
        for vr in per_gen:
            vtau = vtau + vr
        unknowns = ("kappa0", "tau")
        family = (v0, vtau)
    return NullCandidate(M, w, n, tie, v_const, unknowns, family)


def solve(C: NullCandidate) -> SolveReport:
    """Exact solution set of `v(kappa) is null` over the rationals."""
    M = C.module
    rows = M.dim[C.degree]
    den = lcm(
        *[Fraction(c).denominator for v in (C.v_const,) + C.family for c in v.terms.values()],
        1,
    )
    cols = []
    for vec in C.family:
        if vec.is_zero():
            cols.append([0] * rows)
            continue
        vals, vden = M.gram_pairings(vec.scale(den))
        assert vden == 1
        cols.append(vals)
    if C.v_const.is_zero():
        bvals = [0] * rows
    else:
        bvals, bden = M.gram_pairings(C.v_const.scale(den))
        assert bden == 1
    A = [[cols[j][i] for j in range(len(cols))] for i in range(rows)]
    b = [-x for x in bvals]
    status, particular, kernel = exactla.solve_affine(A, b)
    if status == "infeasible":
        return SolveReport(status="infeasible", unknowns=C.unknowns)
    values = dict(zip(C.unknowns, particular))
    v_at = C.at(values)
    pair_vals, pair_den = _pairings(M, v_at)
    residual = max((abs(Fraction(x, pair_den)) for x in pair_vals), default=Fraction(0))
    positive = all(v > 0 for v in values.values()) if status == "unique" else None
    report = SolveReport(
        status="unique-solution" if status == "unique" else "family",
        unknowns=C.unknowns,
        values=values,
        kernel=kernel,
        positive=positive,
        algebraic_only=(positive is False),
        residual_max=residual,
        matches_reference=_matches_reference(M, C, values) if status == "unique" else None,
    )
    return report


def _pairings(M, vec):
    if vec.is_zero():
        return [], 1
    den = lcm(*[Fraction(c).denominator for c in vec.terms.values()], 1)
    vals, vden = M.gram_pairings(vec.scale(den))
    return vals, den * vden


def _matches_reference(M, C, values):
    ref = REFERENCE_SOLUTIONS.get((f"sl{M.L.n}", C.n))
    if ref is None or M.weight != (0,) * M.L.rank:
        return None
    k0 = values.get("kappa0")
    rest = [v for k, v in values.items() if k != "kappa0"]
    tau_ok = all(v == ref["tau"] for v in rest)
    return k0 == ref["kappa0"] and tau_ok


def verify_null(M: WeylModule, v: ModuleVector):
    """True iff v pairs to zero with its entire degree slice.

    Returns (is_null, certificate); the certificate lists nonzero
    pairings as (basis monomial, value) pairs, or records the checked
    slice dimension when null.
    """
    if v.is_zero():
        return True, {"dimension": 0, "nonzero_pairings": []}
    d = v.degree()
    vals, den = _pairings(M, v)
    nonzero = [
        {"monomial": _mono_json(M.basis[d][i]), "value": exactla.frac_str(Fraction(x, den))}
        for i, x in enumerate(vals)
        if x
    ]
    return not nonzero, {"dimension": M.dim[d], "nonzero_pairings": nonzero[:20]}


def _mono_json(mono):
    word, top = mono
    return {"top": top, "word": [[m, a] for (m, a) in word]}


def conjecture_scan(ranks, n_mode=2, tie="single-tau", checkpoint_path=None):
    """Run the vacuum-module solve for sl(n), n in ranks; returns a table.

    Results are checkpointed per algebra so an interrupted scan resumes.
    No outcome is assumed in advance; each row records what the exact
    solver found.
    """
    done = {}
    if checkpoint_path:
        try:
            with open(checkpoint_path) as fh:
                done = json.load(fh).get("rows", {})
        except (OSError, json.JSONDecodeError):
            done = {}
    rows = dict(done)
    for n in ranks:
        key = f"sl{n}"
        if key in rows:
            continue
        t0 = time.time()
        L = build_sl(n)
        M = build_weyl(L, 1, (0,) * L.rank, 2 * n_mode)
        cand = build_candidate(M, M.vacuum(), n_mode, tie=tie)
        rep = solve(cand)
        rep.meta["algebra"] = key
        rep.meta["wall_seconds"] = round(time.time() - t0, 3)
        rows[key] = rep.to_json()
        if checkpoint_path:
            with open(checkpoint_path, "w") as fh:
                json.dump({"schema": "wzwsle.scan@1", "rows": rows}, fh, indent=2, sort_keys=True)
    return {"schema": "wzwsle.scan@1", "rows": rows}
