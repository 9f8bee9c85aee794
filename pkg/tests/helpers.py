"""Test-side generators and oracles, independent of the solver under test."""

import random
from fractions import Fraction
from itertools import combinations

from kore.lp import RationalLP, Sense, Sign


def random_lp(rng: random.Random, max_vars=12, max_rows=8) -> RationalLP:
    n = rng.randint(1, max_vars)
    m = rng.randint(1, max_rows)
    signs = [rng.choice([Sign.NONNEG, Sign.NONNEG, Sign.FREE]) for _ in range(n)]
    rows = [[rng.choice([0, 0, 1, -1, 2, -2, 3]) * Fraction(1, rng.choice([1, 1, 2, 3]))
             for _ in range(n)] for _ in range(m)]
    if rng.random() < 0.6:
        x0 = [Fraction(rng.randint(0, 3), rng.choice([1, 2])) for _ in range(n)]
        x0 = [v if s is Sign.NONNEG else v * rng.choice([1, -1]) for v, s in zip(x0, signs)]
        rhs = [sum(a * x for a, x in zip(r, x0)) for r in rows]
    else:
        rhs = [Fraction(rng.randint(-4, 4)) for _ in range(m)]
    objective = [Fraction(rng.randint(-3, 3)) for _ in range(n)]
    sense = rng.choice([Sense.MAXIMIZE, Sense.MINIMIZE])
    return RationalLP.build([(f"x{j}", s) for j, s in enumerate(signs)], rows, rhs, objective, sense)


def explicit_dual(lp: RationalLP) -> RationalLP:
    """The dual written out as its own LP: free row multipliers y, one slack per sign constraint."""
    m, n = lp.num_rows, lp.num_vars
    nonneg = [j for j in range(n) if lp.signs[j] is Sign.NONNEG]
    variables = [(f"y{i}", Sign.FREE) for i in range(m)] + [(f"s{j}", Sign.NONNEG) for j in nonneg]
    slack_sign = -1 if lp.sense is Sense.MAXIMIZE else 1
    rows, rhs = [], []
    for j in range(n):
        row = [lp.rows[i][j] for i in range(m)] + [0] * len(nonneg)
        if j in nonneg:
            row[m + nonneg.index(j)] = slack_sign
        rows.append(row)
        rhs.append(lp.objective[j])
    objective = list(lp.rhs) + [0] * len(nonneg)
    sense = Sense.MINIMIZE if lp.sense is Sense.MAXIMIZE else Sense.MAXIMIZE
    return RationalLP.build(variables, rows, rhs, objective, sense)


def _solve_square(cols, b):
    """Gaussian elimination over Fractions; None when singular."""
    r = len(b)
    mat = [[cols[j][i] for j in range(r)] + [b[i]] for i in range(r)]
    for c in range(r):
        piv = next((i for i in range(c, r) if mat[i][c] != 0), None)
        if piv is None:
            return None
        mat[c], mat[piv] = mat[piv], mat[c]
        for i in range(r):
            if i != c and mat[i][c]:
                f = mat[i][c] / mat[c][c]
                mat[i] = [a - f * b_ for a, b_ in zip(mat[i], mat[c])]
    return [mat[i][r] / mat[i][i] for i in range(r)]


def _row_basis(rows):
    basis, reduced = [], []
    for idx, row in enumerate(rows):
        v = list(row)
        for piv_col, br in reduced:
            if v[piv_col]:
                f = v[piv_col] / br[piv_col]
                v = [a - f * b for a, b in zip(v, br)]
        nz = next((j for j, a in enumerate(v) if a), None)
        if nz is not None:
            basis.append(idx)
            reduced.append((nz, v))
    return basis


def vertex_max(columns, rows_rhs):
    """Max objective over basic feasible solutions of {A x = b, x >= 0}.

    ``columns`` is a list of (objective, column) pairs. Returns None when no
    vertex exists. Only meaningful for bounded problems.
    """
    columns = [(Fraction(c), [Fraction(v) for v in col]) for c, col in columns]
    rows_rhs = [Fraction(b) for b in rows_rhs]
    rows = [list(r) for r in zip(*[c for _, c in columns])] if columns else []
    keep = _row_basis([r + [b] for r, b in zip(rows, rows_rhs)])
    rank = len(_row_basis(rows))
    if len(keep) != rank:
        return None  # inconsistent
    keep = _row_basis(rows)
    best = None
    for subset in combinations(range(len(columns)), rank):
        cols = [[columns[j][1][i] for i in keep] for j in subset]
        x = _solve_square(cols, [rows_rhs[i] for i in keep])
        if x is None or any(v < 0 for v in x):
            continue
        val = sum(columns[j][0] * v for j, v in zip(subset, x))
        best = val if best is None else max(best, val)
    return best


def random_game(rng: random.Random, max_n=4):
    """A random restricted-cooperation game with small rational worths."""
    from kore.core import FiniteGame
    from kore.setalgebra import Coalition

    n = rng.randint(1, max_n)
    grand = (1 << n) - 1
    bits = set(rng.sample(range(1, grand), k=rng.randint(0, grand - 1))) if grand > 1 else set()
    values = {Coalition(n, grand): Fraction(rng.randint(-2, 6), rng.choice([1, 2, 3]))}
    for b in bits:
        values[Coalition(n, b)] = Fraction(rng.randint(-3, 5), rng.choice([1, 2, 3, 4]))
    return FiniteGame.from_values(n, values)


def brute_supervalue(game, grand_free=False):
    """Max of sum lam_S v(S) over vertices of the balancing polytope.

    With a free grand weight the grand column is split in two; the caller
    must only use it when the program is bounded.
    """
    members = [s for s in game.system.members if not s.is_empty]
    columns = []
    for s in members:
        col = [1 if i in s else 0 for i in range(1, game.n + 1)]
        columns.append((game.value(s), col))
        if grand_free and s.is_grand:
            columns.append((-game.value(s), [-c for c in col]))
    return vertex_max(columns, [1] * game.n)


def closure_by_frozensets(n, sets):
    """Field generated by ``sets`` over 1..n, via plain frozensets."""
    universe = frozenset(range(1, n + 1))
    family = {frozenset(s) for s in sets} | {frozenset(), universe}
    while True:
        bigger = family | {universe - a for a in family} | {a | b for a in family for b in family}
        if bigger == family:
            return family
        family = bigger
