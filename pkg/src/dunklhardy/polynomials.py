"""Sparse multivariate polynomials with exact rational coefficients.

Coefficients are ``Fraction`` for exact work.  Floats are accepted as well
(dihedral systems and orthonormalised bases need them); arithmetic is generic
and only the divisibility check becomes tolerance based.
"""
from __future__ import annotations

import json
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Iterable, Mapping, Sequence

import numpy as np

FLOAT_DIV_TOL = 1e-9


def _is_zero(c) -> bool:
    return c == 0


class MultiPoly:
    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms: Mapping[tuple, object] | None = None):
        self.dim = dim
        clean = {}
        if terms:
            for exp, c in terms.items():
                if len(exp) != dim:
                    raise ValueError(f"exponent {exp} does not match dimension {dim}")
                if not _is_zero(c):
                    clean[tuple(int(e) for e in exp)] = c
        self.terms = clean

    # construction -----------------------------------------------------------
    @classmethod
    def constant(cls, dim: int, c=1) -> "MultiPoly":
        return cls(dim, {(0,) * dim: Fraction(c) if isinstance(c, int) else c})

    @classmethod
    def variable(cls, dim: int, i: int) -> "MultiPoly":
        exp = [0] * dim
        exp[i] = 1
        return cls(dim, {tuple(exp): Fraction(1)})

    @classmethod
    def monomial(cls, exp: Sequence[int], c=1) -> "MultiPoly":
        return cls(len(exp), {tuple(exp): Fraction(c) if isinstance(c, int) else c})

    @classmethod
    def linear(cls, coeffs: Sequence) -> "MultiPoly":
        dim = len(coeffs)
        terms = {}
        for i, c in enumerate(coeffs):
            exp = [0] * dim
            exp[i] = 1
            terms[tuple(exp)] = c
        return cls(dim, terms)

    @classmethod
    def from_coefficients(cls, basis: Sequence[tuple], coeffs: Iterable) -> "MultiPoly":
        basis = list(basis)
        dim = len(basis[0]) if basis else 0
        return cls(dim, dict(zip(basis, coeffs)))

    # structure --------------------------------------------------------------
    @property
    def degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_homogeneous(self) -> bool:
        degs = {sum(e) for e in self.terms}
        return len(degs) <= 1

    def homogeneous_part(self, n: int) -> "MultiPoly":
        return MultiPoly(self.dim, {e: c for e, c in self.terms.items() if sum(e) == n})

    def is_exact(self) -> bool:
        return all(isinstance(c, (Fraction, int)) for c in self.terms.values())

    def coefficient_vector(self, basis: Sequence[tuple]) -> list:
        return [self.terms.get(e, 0) for e in basis]

    def max_abs_coefficient(self) -> float:
        return max((abs(float(c)) for c in self.terms.values()), default=0.0)

    # arithmetic -------------------------------------------------------------
    def _check(self, other: "MultiPoly"):
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")

    def __add__(self, other):
        if not isinstance(other, MultiPoly):
            other = MultiPoly.constant(self.dim, other)
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return MultiPoly(self.dim, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.dim, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, MultiPoly):
            other = MultiPoly.constant(self.dim, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            if _is_zero(other):
                return MultiPoly(self.dim)
            return MultiPoly(self.dim, {e: c * other for e, c in self.terms.items()})
        self._check(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return MultiPoly(self.dim, out)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return MultiPoly(self.dim, {e: c / scalar for e, c in self.terms.items()})

    def __pow__(self, n: int):
        out = MultiPoly.constant(self.dim, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            other = MultiPoly.constant(self.dim, other)
        return self.dim == other.dim and self.terms == other.terms

    def __hash__(self):
        return hash((self.dim, frozenset(self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in sorted(self.terms.items(), key=lambda t: (-sum(t[0]), t[0]), reverse=False):
            mono = "*".join(f"x{i}^{p}" if p > 1 else f"x{i}" for i, p in enumerate(e) if p)
            parts.append(f"{c}" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)

    # calculus ---------------------------------------------------------------
    def diff(self, i: int) -> "MultiPoly":
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                out[tuple(ne)] = c * e[i]
        return MultiPoly(self.dim, out)

    def gradient(self) -> list:
        return [self.diff(i) for i in range(self.dim)]

    def laplacian(self) -> "MultiPoly":
        out = MultiPoly(self.dim)
        for i in range(self.dim):
            out = out + self.diff(i).diff(i)
        return out

    def compose_linear(self, matrix: Sequence[Sequence]) -> "MultiPoly":
        """p(M x) for a square matrix given row by row."""
        forms = [MultiPoly.linear(row) for row in matrix]
        cache: dict = {}

        def power(i, n):
            key = (i, n)
            if key not in cache:
                cache[key] = forms[i] ** n
            return cache[key]

        out = MultiPoly(self.dim)
        for e, c in self.terms.items():
            term = MultiPoly.constant(self.dim, c)
            for i, p in enumerate(e):
                if p:
                    term = term * power(i, p)
            out = out + term
        return out

    def divide_linear(self, direction: Sequence) -> "MultiPoly":
        """Exact quotient by the linear form <direction, x>.

        Raises ``ArithmeticError`` if the division leaves a remainder.
        """
        direction = list(direction)
        j = max(i for i, d in enumerate(direction) if d != 0)
        dj = direction[j]
        exact = self.is_exact() and all(isinstance(d, (Fraction, int)) for d in direction)
        drop = 0.0 if exact else 1e-14 * max(self.max_abs_coefficient(), 1e-300)
        rem = dict(self.terms)
        quot: dict = {}
        while rem:
            # highest power of x_j first
            e = max(rem, key=lambda t: (t[j], t))
            if e[j] == 0:
                if exact or max(abs(float(v)) for v in rem.values()) > FLOAT_DIV_TOL * max(
                    self.max_abs_coefficient(), 1.0
                ):
                    raise ArithmeticError("polynomial is not divisible by the linear form")
                break
            qe = list(e)
            qe[j] -= 1
            qe = tuple(qe)
            qc = rem[e] / dj
            quot[qe] = quot.get(qe, 0) + qc
            for i, d in enumerate(direction):
                if d == 0:
                    continue
                te = list(qe)
                te[i] += 1
                te = tuple(te)
                nv = rem.get(te, 0) - qc * d
                if i == j or nv == 0 or abs(nv) <= drop:
                    rem.pop(te, None)
                else:
                    rem[te] = nv
        return MultiPoly(self.dim, quot)

    # evaluation -------------------------------------------------------------
    def __call__(self, point: Sequence):
        """Exact evaluation at one point (term-wise Horner in each variable)."""
        total = 0
        for e, c in self.terms.items():
            v = c
            for xi, p in zip(point, e):
                if p:
                    v = v * xi**p
            total = total + v
        return total

    def horner(self, point: Sequence):
        """Recursive Horner evaluation, nested in x_0, x_1, ..."""
        return _horner(self.terms, list(point), 0)

    @property
    def _arrays(self):
        exps = np.array(list(self.terms.keys()), dtype=float).reshape(-1, self.dim)
        coef = np.array([float(c) for c in self.terms.values()], dtype=float)
        return exps, coef

    def evaluate(self, x) -> np.ndarray:
        """Vectorised float evaluation; ``x`` has shape (..., N)."""
        x = np.asarray(x, dtype=float)
        if not self.terms:
            return np.zeros(x.shape[:-1])
        exps, coef = self._arrays
        exps = exps.astype(int)
        mon = np.ones(x.shape[:-1] + (len(coef),))
        for j in range(self.dim):
            col = exps[:, j]
            top = int(col.max())
            if top == 0:
                continue
            # x_j^0 .. x_j^top by repeated multiplication, then gathered per term
            pw = np.empty((top + 1,) + x.shape[:-1])
            pw[0] = 1.0
            for e in range(1, top + 1):
                pw[e] = pw[e - 1] * x[..., j]
            mon *= np.moveaxis(pw[col], 0, -1)
        return mon @ coef

    def to_float(self) -> "MultiPoly":
        return MultiPoly(self.dim, {e: float(c) for e, c in self.terms.items()})

    # serialisation ----------------------------------------------------------
    def to_dict(self) -> dict:
        terms = []
        for e, c in sorted(self.terms.items()):
            if isinstance(c, (Fraction, int)):
                c = Fraction(c)
                terms.append({"exp": list(e), "num": c.numerator, "den": c.denominator})
            else:
                terms.append({"exp": list(e), "value": float(c)})
        return {"dim": self.dim, "terms": terms}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, doc: dict) -> "MultiPoly":
        terms = {}
        for t in doc["terms"]:
            if "num" in t:
                terms[tuple(t["exp"])] = Fraction(t["num"], t["den"])
            else:
                terms[tuple(t["exp"])] = float(t["value"])
        return cls(int(doc["dim"]), terms)

    @classmethod
    def from_json(cls, text: str) -> "MultiPoly":
        return cls.from_dict(json.loads(text))


def _horner(terms: dict, point: list, var: int):
    if var == len(point) or not terms:
        return sum(terms.values(), 0) if terms else 0
    by_power: dict = {}
    for e, c in terms.items():
        by_power.setdefault(e[var], {})[e] = c
    acc = 0
    for p in range(max(by_power), -1, -1):
        inner = _horner(by_power.get(p, {}), point, var + 1)
        acc = acc * point[var] + inner
    return acc


def monomial_basis(dim: int, degree: int) -> list:
    """Exponents of the homogeneous monomials of one degree, in a fixed order."""
    out = []
    for combo in combinations_with_replacement(range(dim), degree):
        e = [0] * dim
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    return sorted(out, reverse=True)


def random_poly(dim: int, degree: int, rng: np.random.Generator, homogeneous: bool = False,
                max_coeff: int = 5, density: float = 0.6) -> MultiPoly:
    """Random polynomial with small integer coefficients."""
    degrees = [degree] if homogeneous else range(degree + 1)
    terms = {}
    for d in degrees:
        for e in monomial_basis(dim, d):
            if rng.random() < density:
                terms[e] = Fraction(int(rng.integers(-max_coeff, max_coeff + 1)))
    return MultiPoly(dim, terms)


# exact linear algebra --------------------------------------------------------

def rref(rows: list) -> tuple[list, list]:
    """Reduced row echelon form over the rationals (or floats with pivoting)."""
    a = [list(r) for r in rows]
    if not a:
        return a, []
    n_rows, n_cols = len(a), len(a[0])
    exact = all(isinstance(v, (Fraction, int)) for r in a for v in r)
    pivots = []
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        if exact:
            piv = next((i for i in range(r, n_rows) if a[i][c] != 0), None)
        else:
            best = max(range(r, n_rows), key=lambda i: abs(a[i][c]))
            piv = best if abs(a[best][c]) > 1e-11 else None
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        pv = a[r][c]
        a[r] = [v / pv for v in a[r]]
        for i in range(n_rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [vi - f * vr for vi, vr in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return a, pivots


def nullspace(rows: list, n_cols: int) -> list:
    """Basis of {v : A v = 0}; exact when the entries are rational."""
    if not rows:
        return [[Fraction(int(i == j)) for i in range(n_cols)] for j in range(n_cols)]
    red, pivots = rref(rows)
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    one = Fraction(1) if all(isinstance(v, (Fraction, int)) for r in rows for v in r) else 1.0
    for f in free:
        v = [0 * one] * n_cols
        v[f] = one
        for row, pc in zip(red, pivots):
            v[pc] = -row[f]
        basis.append(v)
    return basis


def solve_columns(a_rows: list, rhs_rows: list) -> list:
    """Solve A X = B for a consistent system with full column rank."""
    n_cols = len(a_rows[0])
    aug = [list(ar) + list(br) for ar, br in zip(a_rows, rhs_rows)]
    red, pivots = rref(aug)
    if any(p >= n_cols for p in pivots):
        raise ArithmeticError("inconsistent linear system")
    if len(pivots) < n_cols:
        raise ArithmeticError("singular linear system")
    n_rhs = len(rhs_rows[0])
    x = [[0] * n_rhs for _ in range(n_cols)]
    for row, pc in zip(red, pivots):
        x[pc] = row[n_cols:]
    return x
