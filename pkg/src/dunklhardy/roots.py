"""Root systems, reflection groups and multiplicity functions.

Every root is normalised to squared length 2, so a reflection reads
``sigma_a(x) = x - <a, x> a``.  For the crystallographic families (A, B, D and
the orthogonal family Z2^N) each root also carries a primitive rational
direction; the exact polynomial calculus works with those directions, since
every exact formula used there is invariant under rescaling a root.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Sequence

import numpy as np

# Membership tolerance for floating root sets (dihedral family).
SET_TOL = 1e-12
DEFAULT_GROUP_CAP = 200_000


def as_fraction(value) -> Fraction:
    """Exact rational view of a number; floats go through their shortest repr."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    return Fraction(repr(float(value)))


def _generic_vector(n: int) -> np.ndarray:
    return np.array([math.pi ** (-i) for i in range(n)])


@dataclass(frozen=True)
class RootSystem:
    """A reduced root system with a fixed positive subsystem.

    ``roots`` holds the positive roots first (in construction order) followed
    by their negatives in the same order, so ``roots[i + m] == -roots[i]``
    where ``m = len(positive)``.
    """

    family: str
    dim: int
    coords: tuple  # tuple of float tuples, |a|^2 = 2
    directions: tuple | None  # rational primitive directions, or None
    positive: tuple
    orbits: tuple

    @cached_property
    def roots(self) -> np.ndarray:
        return np.array(self.coords, dtype=float).reshape(-1, self.dim)

    @cached_property
    def positive_roots(self) -> np.ndarray:
        return self.roots[list(self.positive)]

    @property
    def n_positive(self) -> int:
        return len(self.positive)

    @property
    def exact(self) -> bool:
        return self.directions is not None

    @cached_property
    def orbit_of(self) -> tuple:
        """Orbit id for every root index."""
        out = [0] * len(self.coords)
        for oid, members in enumerate(self.orbits):
            for i in members:
                out[i] = oid
        return tuple(out)

    @cached_property
    def positive_orbit(self) -> tuple:
        return tuple(self.orbit_of[i] for i in self.positive)

    def positive_directions(self) -> list:
        """Rational directions of the positive roots (exact systems only)."""
        if self.directions is None:
            raise ValueError(f"root system {self.family} has no rational form")
        return [self.directions[i] for i in self.positive]

    def reflection_matrix(self, index: int) -> np.ndarray:
        a = self.roots[index]
        return np.eye(self.dim) - np.outer(a, a)

    def to_json(self, k: Sequence[float] | None = None) -> str:
        doc = {
            "family": self.family,
            "N": self.dim,
            "roots": [list(r) for r in self.coords],
            "positive_indices": list(self.positive),
            "orbits": [list(o) for o in self.orbits],
            "k_per_orbit": None if k is None else [float(v) for v in k],
        }
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> tuple["RootSystem", tuple | None]:
        doc = json.loads(text)
        coords = tuple(tuple(float(c) for c in r) for r in doc["roots"])
        directions = _rational_directions(coords)
        system = cls(
            family=doc["family"],
            dim=int(doc["N"]),
            coords=coords,
            directions=directions,
            positive=tuple(doc["positive_indices"]),
            orbits=tuple(tuple(o) for o in doc["orbits"]),
        )
        _validate(system)
        k = doc.get("k_per_orbit")
        return system, (None if k is None else tuple(k))


def reflect(root, x):
    """Reflect ``x`` (shape (..., N)) in the hyperplane orthogonal to ``root``.

    Works for any nonzero root; no normalisation is assumed.
    """
    a = np.asarray(root, dtype=float)
    x = np.asarray(x, dtype=float)
    return x - (2.0 * (x @ a) / (a @ a))[..., None] * a


def _primitive(vec: Sequence[Fraction]) -> tuple:
    dens = [v.denominator for v in vec]
    lcm = 1
    for d in dens:
        lcm = lcm * d // math.gcd(lcm, d)
    ints = [int(v * lcm) for v in vec]
    g = 0
    for v in ints:
        g = math.gcd(g, abs(v))
    return tuple(Fraction(v // g) for v in ints)


def _rational_directions(coords) -> tuple | None:
    """Primitive integer directions when every root is a multiple of one."""
    out = []
    for r in coords:
        nz = [abs(c) for c in r if abs(c) > SET_TOL]
        if not nz:
            return None
        scale = min(nz)
        cand = [Fraction(c / scale).limit_denominator(64) for c in r]
        if any(abs(float(q) * scale - c) > 1e-10 for q, c in zip(cand, r)):
            return None
        out.append(_primitive(cand))
    return tuple(out)


def _find(roots: np.ndarray, v: np.ndarray) -> int:
    d = np.max(np.abs(roots - v), axis=1)
    i = int(np.argmin(d))
    return i if d[i] < 1e-9 else -1


def _orbits(roots: np.ndarray) -> tuple:
    n = len(roots)
    parent = list(range(n))

    def root_of(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        a = roots[i]
        for j in range(n):
            img = _find(roots, reflect(a, roots[j]))
            ri, rj = root_of(img), root_of(j)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)
    groups: dict = {}
    for i in range(n):
        groups.setdefault(root_of(i), []).append(i)
    return tuple(tuple(g) for _, g in sorted(groups.items()))


def _validate(system: RootSystem) -> None:
    roots = system.roots
    if len(roots) == 0:
        raise ValueError("empty root system")
    if not np.allclose(np.sum(roots**2, axis=1), 2.0, atol=1e-12):
        raise ValueError("roots must have squared length 2")
    for i, a in enumerate(roots):
        if _find(roots, -a) < 0:
            raise ValueError(f"-root {i} missing")
        for j, b in enumerate(roots):
            cross = abs(a @ b) / 2.0
            if j != i and abs(cross - 1.0) < 1e-12 and _find(roots, -a) != j:
                raise ValueError("root system is not reduced")
            if _find(roots, reflect(a, b)) < 0:
                raise ValueError("root set is not closed under its reflections")
    pos = set(system.positive)
    m = len(pos)
    neg = {_find(roots, -roots[i]) for i in pos}
    if pos & neg or len(pos | neg) != len(roots) or 2 * m != len(roots):
        raise ValueError("positive subsystem does not split R")


def _assemble(family: str, dim: int, vectors: list) -> RootSystem:
    """Normalise, choose positives by the generic vector, sort and validate."""
    v = _generic_vector(dim)
    pos = []
    for vec in vectors:
        arr = np.asarray(vec, dtype=float)
        arr = arr * math.sqrt(2.0 / float(arr @ arr))
        if arr @ v < 0:
            arr = -arr
        if all(np.max(np.abs(arr - p)) > 1e-9 for p in pos):
            pos.append(arr)
    roots = np.array(pos + [-p for p in pos])
    coords = tuple(tuple(float(c) for c in r) for r in roots)
    system = RootSystem(
        family=family,
        dim=dim,
        coords=coords,
        directions=_rational_directions(coords),
        positive=tuple(range(len(pos))),
        orbits=_orbits(roots),
    )
    _validate(system)
    return system


def build_root_system(family: str, n: int) -> RootSystem:
    """Construct a normalised root system.

    Parameters
    ----------
    family : {"A", "B", "D", "Z2", "I2"}
        ``A`` gives A_n in R^(n+1); ``B`` and ``D`` give B_n, D_n in R^n;
        ``Z2`` gives the orthogonal system {+-sqrt(2) e_i} in R^n;
        ``I2`` gives the dihedral system with ``n`` positive roots in R^2.
    n : int
        Rank index (for ``I2``, the dihedral parameter m >= 2).
    """
    fam = family.upper()
    if n < 1:
        raise ValueError("rank must be at least 1")
    if fam == "A":
        dim = n + 1
        e = np.eye(dim)
        vecs = [e[i] - e[j] for i, j in combinations(range(dim), 2)]
        return _assemble(f"A{n}", dim, vecs)
    if fam == "B":
        e = np.eye(n)
        vecs = [e[i] for i in range(n)]
        for i, j in combinations(range(n), 2):
            vecs += [e[i] - e[j], e[i] + e[j]]
        return _assemble(f"B{n}", n, vecs)
    if fam == "D":
        if n < 2:
            raise ValueError("D_n needs n >= 2")
        e = np.eye(n)
        vecs = []
        for i, j in combinations(range(n), 2):
            vecs += [e[i] - e[j], e[i] + e[j]]
        return _assemble(f"D{n}", n, vecs)
    if fam in ("Z2", "Z2^N"):
        return _assemble(f"Z2^{n}", n, list(np.eye(n)))
    if fam == "I2":
        if n < 2:
            raise ValueError("dihedral parameter m must be >= 2")
        vecs = [np.array([math.cos(j * math.pi / n), math.sin(j * math.pi / n)]) for j in range(n)]
        # exact zeros keep the hyperplane geometry clean
        vecs = [np.where(np.abs(v) < 1e-15, 0.0, v) for v in vecs]
        return _assemble(f"I2({n})", 2, vecs)
    raise ValueError(f"unsupported root system family {family!r}")


def product_system(*systems: RootSystem) -> RootSystem:
    """Orthogonal direct sum of root systems."""
    if not systems:
        raise ValueError("need at least one factor")
    dim = sum(s.dim for s in systems)
    vecs = []
    offset = 0
    for s in systems:
        for a in s.positive_roots:
            v = np.zeros(dim)
            v[offset:offset + s.dim] = a
            vecs.append(v)
        offset += s.dim
    return _assemble("x".join(s.family for s in systems), dim, vecs)


def embed_system(system: RootSystem, extra_dims: int) -> RootSystem:
    """The same roots seen in R^(N + extra_dims) (a nontrivial fixed subspace)."""
    vecs = [np.concatenate([a, np.zeros(extra_dims)]) for a in system.positive_roots]
    return _assemble(f"{system.family}+R{extra_dims}", system.dim + extra_dims, vecs)


@dataclass(frozen=True)
class ReflectionGroup:
    elements: tuple  # tuple of (N, N) arrays
    generators: tuple

    @property
    def order(self) -> int:
        return len(self.elements)

    @cached_property
    def matrices(self) -> np.ndarray:
        return np.array(self.elements)


def _key(m: np.ndarray) -> bytes:
    return np.round(m, 12).tobytes()


def generate_group(system: RootSystem, cap: int = DEFAULT_GROUP_CAP) -> ReflectionGroup:
    """Close the reflections under multiplication (breadth first)."""
    gens = [system.reflection_matrix(i) for i in system.positive]
    ident = np.eye(system.dim)
    seen = {_key(ident): ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for g in frontier:
            for s in gens:
                h = s @ g
                h[np.abs(h) < 1e-14] = 0.0
                key = _key(h)
                if key not in seen:
                    seen[key] = h
                    nxt.append(h)
                    if len(seen) > cap:
                        raise RuntimeError(
                            f"group closure exceeded {cap} elements; root set is corrupted"
                        )
        frontier = nxt
    return ReflectionGroup(elements=tuple(seen.values()), generators=tuple(gens))


@dataclass(frozen=True)
class DunklContext:
    """A root system together with a multiplicity value per orbit."""

    system: RootSystem
    k: tuple
    gamma: float = field(init=False)

    def __post_init__(self):
        k = tuple(self.k)
        if len(k) != len(self.system.orbits):
            raise ValueError(
                f"expected {len(self.system.orbits)} multiplicities (one per orbit), got {len(k)}"
            )
        if any(float(v) < 0 for v in k):
            raise ValueError("multiplicities must be nonnegative")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "gamma", self._gamma())

    def _gamma(self) -> float:
        return float(sum(self.k_exact_positive, Fraction(0)))

    @cached_property
    def k_exact_positive(self) -> tuple:
        return tuple(as_fraction(self.k[o]) for o in self.system.positive_orbit)

    @cached_property
    def k_positive(self) -> np.ndarray:
        return np.array([float(self.k[o]) for o in self.system.positive_orbit])

    @property
    def dim(self) -> int:
        return self.system.dim

    @property
    def homogeneous_dim(self) -> float:
        """N + 2 gamma, the dimension seen by radial calculus."""
        return self.dim + 2.0 * self.gamma

    @property
    def descriptor(self) -> str:
        """Short stable label such as ``A2;k=0.5`` used in reports."""
        return f"{self.system.family};k=" + ",".join(f"{float(v):.12g}" for v in self.k)

    @cached_property
    def group(self) -> ReflectionGroup:
        return generate_group(self.system)

    def weight(self, x) -> np.ndarray:
        return weight(self, x)


def make_context(family: str, n: int, k) -> DunklContext:
    """Shortcut: ``k`` is a scalar (same on every orbit) or one value per orbit."""
    system = build_root_system(family, n)
    if np.ndim(k) == 0:
        k = (k,) * len(system.orbits)
    return DunklContext(system, tuple(k))


def weight(ctx: DunklContext, x) -> np.ndarray:
    """w_k(x) = prod over positive roots of |<a, x>|^(2 k_a); vectorised over x."""
    x = np.asarray(x, dtype=float)
    dots = np.abs(x @ ctx.system.positive_roots.T)
    with np.errstate(divide="ignore"):
        out = np.prod(dots ** (2.0 * ctx.k_positive), axis=-1)
    return out


def chamber_info(system: RootSystem, x) -> tuple[np.ndarray, np.ndarray]:
    """Sign vector over the positive roots and distance to the nearest wall."""
    x = np.asarray(x, dtype=float)
    dots = x @ system.positive_roots.T
    signs = np.sign(dots).astype(int)
    dist = np.min(np.abs(dots), axis=-1) / math.sqrt(2.0)
    return signs, dist


def count_chambers(system: RootSystem, samples: int = 20000, seed: int = 0) -> int:
    """Distinct sign vectors realised by Gaussian samples."""
    rng = np.random.default_rng(seed)
    signs, _ = chamber_info(system, rng.standard_normal((samples, system.dim)))
    return len({tuple(s) for s in signs})
