"""Bounded complexes of free modules over one ring.

A complex is stored as a degree interval, per-degree free ranks, and one
matrix per differential (column-action: d(x) = M x, shape
rank[i+1] x rank[i]).  Operations: validation, canonical minimization by
unit-pivot cancellation, rank profiles of the minimal form, exact
cohomology over finite rings (through scalar expansion), base change
along ring maps, and dualization.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    NotAComplex,
    ShapeMismatch,
    SpecMismatch,
    UnsupportedRing,
)
from .linalg import (
    HowellCore,
    Matrix,
    elementary_divisors,
    expand_scalars,
    multiplication_matrix,
    smith_quotient,
    smith_transforms,
)
from .rings import RingMap, RingSpec, RingTowerElement


class FreeComplex:
    """A validated bounded cochain complex of free modules."""

    __slots__ = ("spec", "lo", "ranks", "diffs")

    def __init__(self, spec: RingSpec, lo: int, ranks, diffs, *, _checked: bool = False):
        ranks = tuple(int(r) for r in ranks)
        diffs = tuple(diffs)
        if any(r < 0 for r in ranks):
            raise ShapeMismatch("negative rank")
        if ranks and len(diffs) != len(ranks) - 1:
            raise ShapeMismatch("need exactly one differential per adjacent pair")
        if not ranks and diffs:
            raise ShapeMismatch("empty complex cannot carry differentials")
        for i, d in enumerate(diffs):
            if d.spec != spec:
                raise SpecMismatch("differential over the wrong ring")
            if d.rows != ranks[i + 1] or d.cols != ranks[i]:
                raise ShapeMismatch(
                    f"differential {i}: expected {ranks[i+1]}x{ranks[i]}, got {d.rows}x{d.cols}"
                )
        if not _checked:
            for i in range(len(diffs) - 1):
                if not (diffs[i + 1] @ diffs[i]).is_zero():
                    raise NotAComplex(f"d at degree {lo+i+1} composed with d at {lo+i} is nonzero")
        object.__setattr__(self, "spec", spec)
        object.__setattr__(self, "lo", lo if ranks else 0)
        object.__setattr__(self, "ranks", ranks)
        object.__setattr__(self, "diffs", diffs)

    def __setattr__(self, *_):
        raise AttributeError("FreeComplex is immutable")

    @property
    def hi(self) -> int:
        return self.lo + len(self.ranks) - 1

    @property
    def degrees(self) -> range:
        return range(self.lo, self.lo + len(self.ranks))

    def is_empty(self) -> bool:
        return not self.ranks

    def rank(self, degree: int) -> int:
        if degree in self.degrees:
            return self.ranks[degree - self.lo]
        return 0

    def differential(self, degree: int) -> Matrix:
        """The map leaving ``degree``; zero-shaped outside the stored range."""
        idx = degree - self.lo
        if 0 <= idx < len(self.diffs):
            return self.diffs[idx]
        return Matrix.zero(self.spec, self.rank(degree + 1), self.rank(degree))

    def euler_characteristic(self) -> int:
        return sum((-1) ** d * self.rank(d) for d in self.degrees)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FreeComplex)
            and self.spec == other.spec
            and self.lo == other.lo
            and self.ranks == other.ranks
            and self.diffs == other.diffs
        )

    def __hash__(self):
        return hash((self.spec, self.lo, self.ranks, self.diffs))

    def __repr__(self):
        return f"FreeComplex(degrees [{self.lo},{self.hi}], ranks {self.ranks})"


def make_complex(spec: RingSpec, lo: int, ranks, diffs) -> FreeComplex:
    """Validate and build; raises NotAComplex unless every d∘d vanishes."""
    return FreeComplex(spec, lo, ranks, diffs)


def empty_complex(spec: RingSpec) -> FreeComplex:
    return FreeComplex(spec, 0, (), ())


def direct_sum(a: FreeComplex, b: FreeComplex) -> FreeComplex:
    if a.spec != b.spec:
        raise SpecMismatch("direct sum across different rings")
    if a.is_empty():
        return b
    if b.is_empty():
        return a
    lo = min(a.lo, b.lo)
    hi = max(a.hi, b.hi)
    ranks = [a.rank(d) + b.rank(d) for d in range(lo, hi + 1)]
    zero = RingTowerElement.zero(a.spec)
    diffs = []
    for d in range(lo, hi):
        da, db = a.differential(d), b.differential(d)
        rows = ranks[d - lo + 1]
        cols = ranks[d - lo]
        ent = [[zero] * cols for _ in range(rows)]
        for i in range(da.rows):
            for j in range(da.cols):
                ent[i][j] = da.entries[i][j]
        for i in range(db.rows):
            for j in range(db.cols):
                ent[da.rows + i][da.cols + j] = db.entries[i][j]
        m = Matrix(a.spec, ent)
        if rows == 0:
            m = Matrix.zero(a.spec, 0, cols)
        diffs.append(m)
    return FreeComplex(a.spec, lo, ranks, diffs, _checked=True)


def shift(c: FreeComplex, by: int) -> FreeComplex:
    if c.is_empty():
        return c
    return FreeComplex(c.spec, c.lo + by, c.ranks, c.diffs, _checked=True)


# ---------------------------------------------------------------------------
# minimization and rank profiles
# ---------------------------------------------------------------------------


def _cancellable(x: RingTowerElement) -> bool:
    # Over the graded model only scalar pivots admit exact elimination.
    if x.spec.kind == "graded":
        return x.is_constant() and not x.is_zero()
    return x.is_unit()


def minimize(c: FreeComplex) -> FreeComplex:
    """Canonical quasi-isomorphic complex with no unit differential entries.

    Gaussian elimination on complexes: a unit pivot at (a, b) of d^i
    removes one rank from degrees i and i+1, replaces d^i by the Schur
    complement, deletes row b of d^(i-1) and column a of d^(i+1).  The
    pivot scan (degree order, then row-major) is fixed, so identical
    inputs give bit-identical outputs.
    """
    ranks = list(c.ranks)
    diffs = [[list(row) for row in d.entries] for d in c.diffs]

    def find_pivot():
        for idx, mat in enumerate(diffs):
            for a, row in enumerate(mat):
                for b, x in enumerate(row):
                    if _cancellable(x):
                        return idx, a, b
        return None

    while True:
        hit = find_pivot()
        if hit is None:
            break
        idx, a, b = hit
        mat = diffs[idx]
        uinv = mat[a][b].invert()
        new = []
        for k, row in enumerate(mat):
            if k == a:
                continue
            coef = row[b] * uinv
            new.append(
                [x - coef * mat[a][l] for l, x in enumerate(row) if l != b]
            )
        diffs[idx] = new
        ranks[idx] -= 1
        ranks[idx + 1] -= 1
        if idx > 0:
            diffs[idx - 1] = [row for k, row in enumerate(diffs[idx - 1]) if k != b]
        if idx + 1 < len(diffs):
            diffs[idx + 1] = [[x for l, x in enumerate(row) if l != a] for row in diffs[idx + 1]]

    if c.spec.kind == "graded":
        for mat in diffs:
            for row in mat:
                for x in row:
                    if x.is_unit():
                        raise UnsupportedRing(
                            "minimization over the graded model hit a non-scalar unit entry"
                        )

    lo = c.lo
    while ranks and ranks[0] == 0:
        ranks.pop(0)
        lo += 1
        if diffs:
            diffs.pop(0)
    while ranks and ranks[-1] == 0:
        ranks.pop()
        if diffs:
            diffs.pop()
    if not ranks:
        return empty_complex(c.spec)
    out = []
    for i, mat in enumerate(diffs):
        m = Matrix(c.spec, mat)
        if ranks[i + 1] == 0:
            m = Matrix.zero(c.spec, 0, ranks[i])
        elif ranks[i] == 0:
            m = Matrix.zero(c.spec, ranks[i + 1], 0)
        out.append(m)
    return FreeComplex(c.spec, lo, ranks, out)


@dataclass(frozen=True)
class TauProfile:
    """Per-degree ranks of the canonical minimal form, with derived bounds."""

    taus: dict[int, int] = field(default_factory=dict)

    @property
    def d_minus(self) -> int | None:
        return min(self.taus) if self.taus else None

    @property
    def d_plus(self) -> int | None:
        return max(self.taus) if self.taus else None

    @property
    def amplitude(self) -> int | None:
        if not self.taus:
            return None
        return self.d_plus - self.d_minus

    def is_zero(self) -> bool:
        return not self.taus

    def supported_in(self, lo: int, hi: int) -> bool:
        return all(lo <= d <= hi for d in self.taus)

    def __eq__(self, other):
        return isinstance(other, TauProfile) and self.taus == other.taus

    def __hash__(self):
        return hash(tuple(sorted(self.taus.items())))


def tau_profile(c: FreeComplex) -> TauProfile:
    """Ranks of minimize(c) in each degree (zero entries omitted)."""
    m = minimize(c)
    return TauProfile({d: m.rank(d) for d in m.degrees if m.rank(d)})


# ---------------------------------------------------------------------------
# base change and duality
# ---------------------------------------------------------------------------


def tensor_along(c: FreeComplex, f: RingMap) -> FreeComplex:
    """Apply a ring map to every differential entry; d∘d = 0 survives."""
    if c.is_empty():
        return empty_complex(f.target)
    if f.source != c.spec:
        raise SpecMismatch("map source does not match the complex")
    return FreeComplex(
        f.target, c.lo, c.ranks, tuple(d.apply_map(f) for d in c.diffs), _checked=True
    )


def dual(c: FreeComplex) -> FreeComplex:
    """Degrees negated, differentials transposed; an involution."""
    if c.is_empty():
        return c
    ranks = tuple(reversed(c.ranks))
    diffs = tuple(d.transpose() for d in reversed(c.diffs))
    return FreeComplex(c.spec, -c.hi, ranks, diffs, _checked=True)


def koszul_complex(
    spec: RingSpec, elements, lo: int = 0
) -> FreeComplex:
    """Cochain complex of exterior powers built from a list of elements.

    Rank in degree lo+i is C(c, i); the differential sends the basis
    subset S to the signed sum over f_j wedge S.  Useful both over the
    graded model and over finite tower rings.
    """
    elems = list(elements)
    cdeg = len(elems)
    from itertools import combinations

    zero = RingTowerElement.zero(spec)
    bases = [list(combinations(range(cdeg), i)) for i in range(cdeg + 1)]
    diffs = []
    for i in range(cdeg):
        src, tgt = bases[i], bases[i + 1]
        index = {s: k for k, s in enumerate(tgt)}
        ent = [[zero] * len(src) for _ in range(len(tgt))]
        for col, s in enumerate(src):
            for j in range(cdeg):
                if j in s:
                    continue
                t = tuple(sorted(s + (j,)))
                sign = (-1) ** sum(1 for x in s if x < j)
                val = elems[j] if sign > 0 else -elems[j]
                ent[index[t]][col] = ent[index[t]][col] + val
        diffs.append(Matrix(spec, ent))
    return FreeComplex(spec, lo, [len(b) for b in bases], diffs)


# ---------------------------------------------------------------------------
# cohomology over finite rings
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FiniteModulePresentation:
    """A subquotient of a free module over a finite tower ring.

    Stored with a minimal generating set: ``generators`` holds expanded
    Z/p^m coordinates (one column per generator, in the ambient free
    module), ``relations`` the coefficient columns cutting out the
    module, ``actions`` one matrix per ring variable.  ``divisors`` is
    the elementary-divisor profile of the underlying Z/p^m-module.
    """

    spec: RingSpec
    ambient_rank: int
    generators: np.ndarray
    relations: np.ndarray
    divisors: tuple[int, ...]
    actions: tuple[np.ndarray, ...]

    @property
    def num_generators(self) -> int:
        return int(self.generators.shape[1])

    @property
    def cardinality(self) -> int:
        out = 1
        for d in self.divisors:
            out *= int(d)
        return out

    def is_zero(self) -> bool:
        return self.num_generators == 0

    def quotient_divisors(self, extra_action_cols) -> tuple[int, ...]:
        """Divisor profile after adding the given coordinate relations."""
        blocks = [self.relations] + [np.asarray(c) for c in extra_action_cols]
        blocks = [b for b in blocks if b.size]
        rel = np.hstack(blocks) if blocks else np.zeros((self.num_generators, 0), dtype=np.int64)
        return elementary_divisors(rel, self.num_generators, self.spec.p, self.spec.m)

    def augmentation_divisors(self) -> tuple[int, ...]:
        """Profile of the quotient by the variable ideal (all T_i set to act as zero)."""
        return self.quotient_divisors(list(self.actions))

    def fingerprint(self) -> tuple:
        """Isomorphism-invariant summary used for oracle comparisons."""
        pcols = [(self.spec.p * np.eye(self.num_generators, dtype=np.int64))]
        return (
            self.cardinality,
            self.divisors,
            self.augmentation_divisors(),
            self.quotient_divisors(pcols),
        )


_COHOMOLOGY_CACHE: dict[FreeComplex, dict[int, FiniteModulePresentation]] = {}


def cohomology(c: FreeComplex, degree: int) -> FiniteModulePresentation:
    """Exact cohomology at one degree over a finite tower ring.

    Works through scalar expansion: one diagonalization per expanded
    differential serves the kernel on one side and canonical quotient
    coordinates on the other, so generators, relations, divisor profile
    and variable actions all come out of small solves.  All degrees of a
    complex are computed together and cached.
    """
    spec = c.spec
    if spec.kind == "graded":
        raise UnsupportedRing("use the graded-module cohomology for polynomial rings")
    table = _COHOMOLOGY_CACHE.get(c)
    if table is None:
        table = _all_cohomology(c)
        if len(_COHOMOLOGY_CACHE) > 64:
            _COHOMOLOGY_CACHE.clear()
        _COHOMOLOGY_CACHE[c] = table
    if degree in table:
        return table[degree]
    return _empty_presentation(spec)


def _empty_presentation(spec: RingSpec) -> FiniteModulePresentation:
    return FiniteModulePresentation(
        spec, 0,
        np.zeros((0, 0), dtype=np.int64),
        np.zeros((0, 0), dtype=np.int64),
        (),
        tuple(np.zeros((0, 0), dtype=np.int64) for _ in range(spec.q)),
    )


def _all_cohomology(c: FreeComplex) -> dict[int, FiniteModulePresentation]:
    spec = c.spec
    p, m = spec.p, spec.m
    N = p**m
    rho = spec.coefficient_rank

    smiths: dict[int, object] = {}
    for idx, d in enumerate(c.diffs):
        deg = c.lo + idx
        if d.rows and d.cols:
            smiths[deg] = smith_transforms(expand_scalars(d), d.rows * rho, p, m, track_v=True)

    mult_cache: list[np.ndarray] | None = None
    out: dict[int, FiniteModulePresentation] = {}
    for degree in c.degrees:
        rk = c.rank(degree)
        amb = rk * rho
        if amb == 0:
            out[degree] = _empty_presentation(spec)
            continue

        sm_out = smiths.get(degree)
        if sm_out is None or c.rank(degree + 1) == 0:
            kernel = np.eye(amb, dtype=np.int64)
        else:
            kernel = sm_out.column_kernel()

        sm_in = smiths.get(degree - 1)
        if sm_in is None or c.rank(degree - 1) == 0:
            exponents = (m,) * amb
            scales = np.ones(amb, dtype=np.int64)
            proj = None
        else:
            qs = sm_in.quotient()
            exponents = qs.exponents
            scales = np.array([p ** (m - e) for e in exponents], dtype=np.int64)
            proj = qs.projection

        def embed(cols: np.ndarray) -> np.ndarray:
            if cols.size == 0:
                return np.zeros((len(exponents), cols.shape[1] if cols.ndim == 2 else 0), dtype=np.int64)
            w = cols % N if proj is None else (proj @ cols) % N
            return (w * scales[:, None]) % N

        ek = embed(kernel)
        base = (p * ek) % N
        if base.any():
            # residue coordinates modulo p * span(kernel) as well: the
            # Nakayama test then needs only a tiny incremental echelon
            qs2 = smith_quotient(base, len(exponents), p, m)
            ek2 = (qs2.projection @ ek) % N
            for i, e in enumerate(qs2.exponents):
                ek2[i] = (ek2[i] * p ** (m - e)) % N
        else:
            ek2 = ek
        chosen: list[int] = []
        rows: list[np.ndarray] = []
        core = None
        for l in range(kernel.shape[1]):
            w = ek2[:, l]
            rem = core.reduce(w) if core is not None else w
            if not rem.any():
                continue
            chosen.append(l)
            rows.append(w)
            core = HowellCore(np.array(rows), p, m, carry=False)
        gens = kernel[:, chosen] if chosen else np.zeros((amb, 0), dtype=np.int64)
        g = gens.shape[1]

        if g:
            e_chosen = ek[:, chosen]
            solver = HowellCore(e_chosen.T, p, m)
            rel_rows = solver.kernel_rows()
            relations = rel_rows.T if rel_rows.size else np.zeros((g, 0), dtype=np.int64)
        else:
            solver = None
            relations = np.zeros((0, 0), dtype=np.int64)

        divisors = elementary_divisors(relations, g, p, m)

        if mult_cache is None:
            mult_cache = [
                multiplication_matrix(RingTowerElement.variable(spec, j))
                for j in range(spec.q)
            ]
        actions = []
        for j in range(spec.q):
            if not g:
                actions.append(np.zeros((0, 0), dtype=np.int64))
                continue
            big = np.kron(np.eye(rk, dtype=np.int64), mult_cache[j])
            targets = embed((big @ gens) % N)
            cols = []
            for l in range(g):
                x = solver.solve(targets[:, l])
                if x is None:
                    raise AssertionError("variable action left the cohomology span")
                cols.append(x[:g])
            actions.append(np.array(cols, dtype=np.int64).T % N)

        out[degree] = FiniteModulePresentation(spec, rk, gens, relations, divisors, tuple(actions))
    return out
