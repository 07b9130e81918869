"""Small integer matrix routines: Smith normal form and congruence solving."""

from __future__ import annotations

Matrix = list[list[int]]


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    cols = len(b[0]) if b else 0
    return [[sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(cols)] for i in range(len(a))]


def _egcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, x, y) with g = x a + y b = gcd(a, b) >= 0; y = 0 whenever a | b."""
    if a and b % a == 0:
        return abs(a), (1 if a > 0 else -1), 0
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def smith_normal_form(a: Matrix) -> tuple[Matrix, Matrix, Matrix]:
    """Return (U, S, V) with U*A*V = S diagonal, U and V unimodular.

    Diagonal entries are nonnegative and each divides the next.  Pivots are
    combined through 2x2 extended-gcd moves, which keeps entries small.
    """
    m = len(a)
    n = len(a[0]) if m else 0
    s = [row[:] for row in a]
    u = identity(m)
    v = identity(n)

    def rows_combine(t, i, x, y, c, d):
        # (row_t, row_i) <- (x row_t + y row_i, c row_t + d row_i)
        for mat in (s, u):
            rt, ri = mat[t], mat[i]
            mat[t] = [x * p + y * q for p, q in zip(rt, ri)]
            mat[i] = [c * p + d * q for p, q in zip(rt, ri)]

    def cols_combine(t, j, x, y, c, d):
        for mat in (s, v):
            for row in mat:
                a_, b_ = row[t], row[j]
                row[t], row[j] = x * a_ + y * b_, c * a_ + d * b_

    for t in range(min(m, n)):
        nz = [(abs(s[i][j]), i, j) for i in range(t, m) for j in range(t, n) if s[i][j]]
        if not nz:
            break
        _, bi, bj = min(nz)
        s[t], s[bi] = s[bi], s[t]
        u[t], u[bi] = u[bi], u[t]
        for mat in (s, v):
            for row in mat:
                row[t], row[bj] = row[bj], row[t]
        while True:
            for i in range(t + 1, m):
                if s[i][t]:
                    a_, b_ = s[t][t], s[i][t]
                    g, x, y = _egcd(a_, b_)
                    rows_combine(t, i, x, y, -b_ // g, a_ // g)
            for j in range(t + 1, n):
                if s[t][j]:
                    a_, b_ = s[t][t], s[t][j]
                    g, x, y = _egcd(a_, b_)
                    cols_combine(t, j, x, y, -b_ // g, a_ // g)
            if any(s[i][t] for i in range(t + 1, m)):
                continue
            piv = s[t][t]
            bad = next((i for i in range(t + 1, m) for j in range(t + 1, n) if s[i][j] % piv), None)
            if bad is None:
                break
            for k in range(n):
                s[t][k] += s[bad][k]
            for k in range(m):
                u[t][k] += u[bad][k]
        if s[t][t] < 0:
            s[t] = [-x for x in s[t]]
            u[t] = [-x for x in u[t]]
    return u, s, v


def inverse_unimodular(a: Matrix) -> Matrix:
    """Exact integer inverse of a unimodular matrix."""
    n = len(a)
    aug = [list(row) + identity(n)[i] for i, row in enumerate(a)]
    for col in range(n):
        # Euclid down the column until a unit pivot sits at (col, col)
        while True:
            rows = [r for r in range(col, n) if aug[r][col]]
            if not rows:
                raise ValueError("matrix is singular")
            piv = min(rows, key=lambda r: abs(aug[r][col]))
            aug[col], aug[piv] = aug[piv], aug[col]
            clean = True
            for r in range(col + 1, n):
                if aug[r][col]:
                    q = aug[r][col] // aug[col][col]
                    aug[r] = [x - q * y for x, y in zip(aug[r], aug[col])]
                    if aug[r][col]:
                        clean = False
            if clean:
                break
        if abs(aug[col][col]) != 1:
            raise ValueError("matrix is not unimodular")
    for col in range(n - 1, -1, -1):
        if aug[col][col] == -1:
            aug[col] = [-x for x in aug[col]]
        for r in range(col):
            c = aug[r][col]
            if c:
                aug[r] = [x - c * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def solve_mod(a: Matrix, b: list[int], modulus: int) -> list[int] | None:
    """One solution x of A x = b (mod modulus), or None if inconsistent."""
    m = len(a)
    n = len(a[0]) if m else 0
    if m == 0:
        return [0] * n
    u, s, v = smith_normal_form(a)
    ub = [sum(u[i][k] * b[k] for k in range(m)) % modulus for i in range(m)]
    z = [0] * n
    for i in range(m):
        d = s[i][i] if i < n else 0
        if d % modulus == 0:
            if ub[i] % modulus:
                return None
            continue
        # d * z = ub (mod modulus)
        from math import gcd

        g = gcd(d, modulus)
        if ub[i] % g:
            return None
        mm = modulus // g
        z[i] = (ub[i] // g) * pow(d // g, -1, mm) % mm
    return [sum(v[i][k] * z[k] for k in range(n)) % modulus for i in range(n)]


def inverse_mod_matrix(a: Matrix, modulus: int) -> Matrix:
    """Inverse of a square matrix whose determinant is a unit mod modulus."""
    n = len(a)
    aug = [[x % modulus for x in row] + identity(n)[i] for i, row in enumerate(a)]
    for col in range(n):
        piv = None
        for r in range(col, n):
            try:
                inv = pow(aug[r][col], -1, modulus)
            except ValueError:
                continue
            piv = r
            break
        if piv is None:
            raise ValueError("matrix is not invertible modulo the given modulus")
        aug[col], aug[piv] = aug[piv], aug[col]
        aug[col] = [x * inv % modulus for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                c = aug[r][col]
                aug[r] = [(x - c * y) % modulus for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]
