"""Exact rational linear algebra over Python integers and Fractions.

All solvers here are fraction-free: forward elimination runs on integer
matrices (Bareiss one-step scheme, exact divisions only), and Fractions
appear only during back substitution.  Inputs are lists of lists or numpy
integer arrays; entries must be exact integers.
"""

from fractions import Fraction


def _to_rows(mat):
    return [[int(x) for x in row] for row in mat]


def row_echelon(mat):
    """Fraction-free row echelon form of an integer matrix.

    Returns (rows, pivot_cols) where rows is the echelonized integer
    matrix (Bareiss scheme, so entries are minors of the input) and
    pivot_cols[i] is the pivot column of row i.
    """
    rows = _to_rows(mat)
    if not rows:
        return rows, []
    ncols = len(rows[0])
    pivot_cols = []
    prev = 1
    r = 0
    for c in range(ncols):
        pivot_row = None
        for i in range(r, len(rows)):
            if rows[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        piv = rows[r][c]
        # every row below must be rescaled each step, even at a zero entry;
        # skipping breaks the minor structure that makes divisions exact
        for i in range(r + 1, len(rows)):
            a = rows[i][c]
            ri, rr = rows[i], rows[r]
            rows[i] = [(piv * ri[j] - a * rr[j]) // prev for j in range(ncols)]
        prev = piv
        pivot_cols.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r] + [[0] * ncols for _ in range(len(rows) - r)], pivot_cols


def rank(mat):
    """Exact rank of an integer matrix."""
    _, pivots = row_echelon(mat)
    return len(pivots)


def nullspace(mat):
    """Exact kernel basis of an integer matrix, as lists of Fractions.

    One basis vector per free column; the free coordinate is set to 1.
    """
    rows, pivot_cols = row_echelon(mat)
    if not rows:
        return []
    ncols = len(rows[0])
    pivset = set(pivot_cols)
    free_cols = [c for c in range(ncols) if c not in pivset]
    basis = []
    for fc in free_cols:
        vec = [Fraction(0)] * ncols
        vec[fc] = Fraction(1)
        for i in range(len(pivot_cols) - 1, -1, -1):
            pc = pivot_cols[i]
            s = sum(Fraction(rows[i][j]) * vec[j] for j in range(pc + 1, ncols) if rows[i][j])
            vec[pc] = -s / rows[i][pc]
        basis.append(vec)
    return basis


def solve_affine(A, b):
    """Exact solution set of A x = b over the rationals.

    A is an integer matrix (rows x unknowns), b an integer vector.
    Returns (status, particular, kernel_basis) with status one of
    "unique", "family", "infeasible"; particular is a Fraction vector
    (None when infeasible) and kernel_basis spans the homogeneous
    solutions.
    """
    rows = _to_rows(A)
    nun = len(rows[0]) if rows else 0
    aug = [row + [int(bv)] for row, bv in zip(rows, b)]
    ech, pivot_cols = row_echelon(aug)
    if nun in pivot_cols:
        return "infeasible", None, []
    sol = [Fraction(0)] * nun
    for i in range(len(pivot_cols) - 1, -1, -1):
        pc = pivot_cols[i]
        s = sum(Fraction(ech[i][j]) * sol[j] for j in range(pc + 1, nun) if ech[i][j])
        sol[pc] = (Fraction(ech[i][nun]) - s) / ech[i][pc]
    kern = nullspace(rows) if len(pivot_cols) < nun else []
    status = "unique" if not kern else "family"
    return status, sol, kern


def invert(mat):
    """Exact inverse of a square integer/Fraction matrix (Gauss-Jordan)."""
    n = len(mat)
    aug = [[Fraction(mat[i][j]) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)]
           for i in range(n)]
    for c in range(n):
        piv = next((i for i in range(c, n) if aug[i][c] != 0), None)
        if piv is None:
            raise ValueError("matrix is singular")
        aug[c], aug[piv] = aug[piv], aug[c]
        pv = aug[c][c]
        aug[c] = [x / pv for x in aug[c]]
        for i in range(n):
            if i != c and aug[i][c]:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[c])]
    return [row[n:] for row in aug]


def frac_str(q):
    """Render a rational as a canonical "p/q" string."""
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def parse_frac(s):
    """Parse a "p/q" (or plain integer) string into a Fraction."""
    return Fraction(s.strip())
