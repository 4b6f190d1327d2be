"""Brute-force oracles that share no code with the library's algorithms.

Polynomials enter these helpers as plain dicts {exponent tuple: int} over F_p,
read off ``MultiPoly.coeffs``; nothing here calls the Gröbner engine.
"""

from itertools import combinations_with_replacement, permutations

import numpy as np


def monomials_up_to(nvars, degree):
    out = []
    for d in range(degree + 1):
        for combo in combinations_with_replacement(range(nvars), d):
            m = [0] * nvars
            for k in combo:
                m[k] += 1
            out.append(tuple(m))
    return out


def _row_reduce_mod(mat, p):
    """Row echelon form mod p; returns the list of nonzero rows (numpy int64)."""
    mat = mat.copy() % p
    rows, cols = mat.shape
    r = 0
    pivots = []
    for c in range(cols):
        if r >= rows:
            break
        nz = np.nonzero(mat[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + nz[0]
        if k != r:
            mat[[r, k]] = mat[[k, r]]
        inv = pow(int(mat[r, c]), -1, p)
        mat[r] = (mat[r] * inv) % p
        others = np.nonzero(mat[:, c])[0]
        for o in others:
            if o != r:
                mat[o] = (mat[o] - mat[o, c] * mat[r]) % p
        pivots.append(c)
        r += 1
    return mat[:r], pivots


def macaulay_member(f, gens, p, degree):
    """Is f in the span of {m * g : deg(m * g) <= degree}?  Exact over F_p.

    ``True`` is a proof of membership; ``False`` only says no certificate of
    that degree exists.
    """
    nvars = len(next(iter(f))) if f else len(next(iter(gens[0])))
    cols = monomials_up_to(nvars, degree)
    index = {m: k for k, m in enumerate(cols)}
    rows = []
    for g in gens:
        dg = max(sum(m) for m in g)
        for mult in monomials_up_to(nvars, degree - dg):
            row = np.zeros(len(cols), dtype=np.int64)
            for m, c in g.items():
                row[index[tuple(a + b for a, b in zip(m, mult))]] = c % p
            rows.append(row)
    target = np.zeros(len(cols), dtype=np.int64)
    for m, c in f.items():
        if sum(m) > degree:
            return False
        target[index[m]] = c % p
    if not rows:
        return not target.any()
    ech, pivots = _row_reduce_mod(np.array(rows), p)
    for r, c in zip(ech, pivots):
        if target[c]:
            target = (target - target[c] * r) % p
    return not target.any()


def evaluate(coeffs, point, p):
    """Naive evaluation of {monomial: coefficient} at an F_p point."""
    total = 0
    for m, c in coeffs.items():
        term = c
        for v, e in zip(point, m):
            term = term * pow(v, e, p)
        total += term
    return total % p


def evaluate_q(coeffs, point):
    """Evaluation over Q with Fraction coefficients and point."""
    total = 0
    for m, c in coeffs.items():
        term = c
        for v, e in zip(point, m):
            term = term * v ** e
        total += term
    return total


def permutation_sign(perm):
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def leibniz_det(matrix):
    """Determinant as the signed sum over permutations (works for MultiPoly entries)."""
    n = len(matrix)
    total = None
    for perm in permutations(range(n)):
        term = matrix[0][perm[0]]
        for i in range(1, n):
            term = term * matrix[i][perm[i]]
        if permutation_sign(perm) < 0:
            term = -term
        total = term if total is None else total + term
    return total


def binomial_expand(a, b, n):
    """(a + b)^n by the binomial theorem with integer binomials (no repeated squaring)."""
    from math import comb

    total = None
    for k in range(n + 1):
        term = a ** k * b ** (n - k) * comb(n, k)
        total = term if total is None else total + term
    return total


def random_poly_dict(rng, nvars, max_degree, p, terms):
    """Random {monomial: coefficient} with total degree <= max_degree."""
    monos = monomials_up_to(nvars, max_degree)
    out = {}
    for _ in range(terms):
        m = monos[rng.randrange(len(monos))]
        out[m] = (out.get(m, 0) + rng.randrange(1, p)) % p
    return {m: c for m, c in out.items() if c}


def mul_dicts(a, b, p):
    out = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            m = tuple(x + y for x, y in zip(ma, mb))
            out[m] = (out.get(m, 0) + ca * cb) % p
    return {m: c for m, c in out.items() if c}


def add_dicts(a, b, p):
    out = dict(a)
    for m, c in b.items():
        out[m] = (out.get(m, 0) + c) % p
    return {m: c for m, c in out.items() if c}


def membership_instances(seed, count, p=5, nvars=3):
    """Deterministic (generators, query) pairs: half combinations of the generators, half random.

    Generators have degree <= 4 and queries degree <= 6.
    """
    import random

    rng = random.Random(seed)
    out = []
    while len(out) < count:
        ngens = rng.randint(1, 3)
        gens = [random_poly_dict(rng, nvars, rng.randint(1, 4), p, rng.randint(1, 3)) for _ in range(ngens)]
        gens = [g for g in gens if g]
        if not gens:
            continue
        if len(out) % 2 == 0:
            q = {}
            for g in gens:
                dg = max(sum(m) for m in g)
                if dg <= 6:
                    h = random_poly_dict(rng, nvars, 6 - dg, p, rng.randint(1, 3))
                    q = add_dicts(q, mul_dicts(h, g, p), p)
        else:
            q = random_poly_dict(rng, nvars, rng.randint(0, 6), p, rng.randint(1, 4))
        out.append((gens, q))
    return out
