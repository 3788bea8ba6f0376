"""Deterministic exact linear algebra over Z/p^m and finite tower rings.

Two layers:

* an exact ``Matrix`` of ring elements (any spec) with ring-level
  products, transposes and entrywise maps;
* a numpy int64 core over the chain ring Z/p^m implementing Howell
  canonical forms, row/column kernels, solving, and elementary
  divisors.  Patch-ring matrices enter this layer through
  ``expand_scalars`` (the regular representation on the monomial
  basis).

Everything is integer arithmetic; numpy only supplies array storage and
vectorised modular row operations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NoSolution, ShapeMismatch, SpecMismatch
from .rings import RingMap, RingSpec, RingTowerElement, coefficient_ring


class Matrix:
    """Dense matrix of ring elements sharing one spec.

    Column-action convention throughout the package: a matrix of shape
    (rows, cols) maps column vectors of length ``cols`` to column
    vectors of length ``rows``.
    """

    __slots__ = ("spec", "rows", "cols", "entries")

    def __init__(self, spec: RingSpec, entries):
        rows = tuple(tuple(row) for row in entries)
        for row in rows:
            for x in row:
                if x.spec != spec:
                    raise SpecMismatch("matrix entries must share the spec")
        widths = {len(row) for row in rows}
        if len(widths) > 1:
            raise ShapeMismatch("ragged matrix rows")
        object.__setattr__(self, "spec", spec)
        object.__setattr__(self, "rows", len(rows))
        object.__setattr__(self, "cols", widths.pop() if widths else 0)
        object.__setattr__(self, "entries", rows)

    def __setattr__(self, *_):
        raise AttributeError("Matrix is immutable")

    # -- constructors --------------------------------------------------

    @classmethod
    def zero(cls, spec: RingSpec, rows: int, cols: int) -> "Matrix":
        z = RingTowerElement.zero(spec)
        m = cls(spec, [[z] * cols for _ in range(rows)])
        if rows == 0:
            object.__setattr__(m, "cols", cols)
        return m

    @classmethod
    def identity(cls, spec: RingSpec, size: int) -> "Matrix":
        z = RingTowerElement.zero(spec)
        o = RingTowerElement.one(spec)
        return cls(spec, [[o if i == j else z for j in range(size)] for i in range(size)])

    @classmethod
    def from_int_rows(cls, spec: RingSpec, rows) -> "Matrix":
        return cls(spec, [[RingTowerElement.constant(spec, int(x)) for x in row] for row in rows])

    # -- structure -----------------------------------------------------

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Matrix)
            and self.spec == other.spec
            and self.rows == other.rows
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.spec, self.rows, self.cols, self.entries))

    def __repr__(self):
        return f"Matrix({self.rows}x{self.cols} over {self.spec.kind})"

    def is_zero(self) -> bool:
        return all(x.is_zero() for row in self.entries for x in row)

    def transpose(self) -> "Matrix":
        out = [[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)]
        m = Matrix(self.spec, out)
        if self.cols == 0:
            object.__setattr__(m, "cols", self.rows)
        return m

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.spec != other.spec:
            raise SpecMismatch("matrix product across different rings")
        if self.cols != other.rows:
            raise ShapeMismatch(f"{self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        zero = RingTowerElement.zero(self.spec)
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = zero
                for k in range(self.cols):
                    a = self.entries[i][k]
                    b = other.entries[k][j]
                    if not (a.is_zero() or b.is_zero()):
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        m = Matrix(self.spec, out)
        if self.rows == 0 or other.cols == 0:
            return Matrix.zero(self.spec, self.rows, other.cols)
        return m

    def map_entries(self, fn, spec: RingSpec | None = None) -> "Matrix":
        if self.rows == 0:
            return Matrix.zero(spec or self.spec, 0, self.cols)
        return Matrix(spec or self.spec, [[fn(x) for x in row] for row in self.entries])

    def apply_map(self, f: RingMap) -> "Matrix":
        if f.source != self.spec:
            raise SpecMismatch("map source does not match matrix spec")
        return self.map_entries(f.apply, f.target)


# ---------------------------------------------------------------------------
# numpy core over Z/p^m
# ---------------------------------------------------------------------------


def _as_array(rows, cols_hint=0) -> np.ndarray:
    a = np.asarray(rows, dtype=np.int64)
    if a.size == 0:
        a = a.reshape(0, cols_hint)
    return a


def _valuations(col: np.ndarray, p: int, m: int) -> np.ndarray:
    """p-adic valuation of each entry, with val(0) = m."""
    val = np.zeros(col.shape, dtype=np.int64)
    cur = col.copy()
    nonzero = col != 0
    for _ in range(m - 1):
        div = nonzero & (cur % p == 0) & (val < m)
        val += div
        cur = np.where(div, cur // p, cur)
    val[~nonzero] = m
    return val


def _echelon(work: np.ndarray, active: int, p: int, m: int):
    """In-place echelon over active columns; returns pivot list (row, col, val).

    Updates touch only the rows with a nonzero entry in the pivot column
    and only columns from the pivot rightward (everything to the left of
    the pivot is already zero below the previous pivot row).
    """
    N = p**m
    nrows = work.shape[0]
    pivots = []
    r = 0
    for j in range(active):
        if r >= nrows:
            break
        col = work[r:, j]
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            continue
        vals = _valuations(col[nz], p, m)
        k = int(np.argmin(vals))
        vmin = int(vals[k])
        i = r + int(nz[k])
        if i != r:
            work[[r, i]] = work[[i, r]]
        pv = p**vmin
        unit = int(work[r, j]) // pv
        if unit % N != 1:
            uinv = pow(unit % N, -1, N)
            work[r, j:] = (work[r, j:] * uinv) % N
        sub = work[r + 1 :, j:]
        nzb = np.nonzero(work[r + 1 :, j])[0]
        if nzb.size:
            t = work[r + 1 + nzb, j] // pv
            sub[nzb] = (sub[nzb] - np.outer(t, work[r, j:])) % N
        pivots.append((r, j, vmin))
        r += 1
    return pivots


def _reduce_row(vec: np.ndarray, work: np.ndarray, pivots, p: int, m: int) -> np.ndarray:
    N = p**m
    vec = vec % N
    for r, j, v in pivots:
        e = int(vec[j])
        if e == 0:
            continue
        pv = p**v
        if e % pv == 0:
            vec = (vec - (e // pv) * work[r]) % N
    return vec


class HowellCore:
    """Howell canonical form of an integer matrix over Z/p^m.

    Carries a companion block so that row operations are witnessed:
    ``transform @ original == howell`` mod p^m.  Pivoting happens on the
    first ``active`` columns only; rows whose active part vanishes
    collect span elements of the active-block kernel (complete by the
    Howell span property).
    """

    def __init__(self, a: np.ndarray, p: int, m: int, carry: bool = True):
        self.p, self.m = p, m
        self.N = p**m
        a = _as_array(a)
        self.active = a.shape[1]
        self.orig_rows = a.shape[0]
        if carry:
            work = np.hstack([a % self.N, np.eye(a.shape[0], dtype=np.int64)])
        else:
            work = a % self.N
        self.work, self.pivots = self._howellize(work)

    def _howellize(self, work):
        p, m, N = self.p, self.m, self.N
        while True:
            pivots = _echelon(work, self.active, p, m)
            grew = False
            tails = []
            for r, j, v in pivots:
                if v == 0:
                    continue
                cand = (work[r] * (p ** (m - v))) % N
                cand = _reduce_row(cand, work, pivots, p, m)
                if cand[: self.active].any():
                    work = np.vstack([work, cand[None, :]])
                    grew = True
                elif cand.any():
                    # pure-carry remainder: a kernel witness, kept as a tail row
                    tails.append(cand)
            if grew:
                continue
            npiv = len(pivots)
            old_tails = [row for row in work[npiv:] if row.any()]
            rows = [work[:npiv]]
            if old_tails:
                rows.append(np.array(old_tails))
            if tails:
                rows.append(np.array(tails))
            work = np.vstack(rows) if len(rows) > 1 else work[:npiv].copy()
            break
        # reduce entries above each pivot into [0, p^v)
        for r, j, v in pivots:
            if r == 0:
                continue
            pv = p**v
            t = work[:r, j] // pv
            nza = np.nonzero(t)[0]
            if nza.size:
                sub = work[:r, j:]
                sub[nza] = (sub[nza] - np.outer(t[nza], work[r, j:])) % N
        return work, pivots

    # -- views ----------------------------------------------------------

    def howell_rows(self) -> np.ndarray:
        return self.work[: len(self.pivots), : self.active].copy()

    def transform_rows(self) -> np.ndarray:
        return self.work[: len(self.pivots), self.active :].copy()

    def kernel_rows(self) -> np.ndarray:
        """Generators of {x : x A = 0} as rows (Howell-canonical)."""
        tail = self.work[len(self.pivots) :, self.active :]
        if tail.size == 0:
            return np.zeros((0, self.orig_rows), dtype=np.int64)
        inner = HowellCore(tail, self.p, self.m, carry=False)
        return inner.howell_rows()

    def reduce(self, vec: np.ndarray) -> np.ndarray:
        return _reduce_row(np.asarray(vec, dtype=np.int64), self.work[:, : self.active], self.pivots, self.p, self.m)

    def solve(self, b: np.ndarray) -> np.ndarray | None:
        """Some x with x A = b, or None."""
        N = self.N
        vec = np.asarray(b, dtype=np.int64) % N
        acc = np.zeros(self.work.shape[1] - self.active, dtype=np.int64)
        for r, j, v in self.pivots:
            e = int(vec[j])
            if e == 0:
                continue
            pv = self.p**v
            if e % pv:
                return None
            t = e // pv
            vec = (vec - t * self.work[r, : self.active]) % N
            acc = (acc + t * self.work[r, self.active :]) % N
        if vec.any():
            return None
        return acc

    def contains(self, b: np.ndarray) -> bool:
        return not self.reduce(b).any()

    def span_log_size(self) -> int:
        """log_p of the cardinality of the row span."""
        return sum(self.m - v for _, _, v in self.pivots)


def row_kernel(a: np.ndarray, p: int, m: int, nrows_hint: int | None = None) -> np.ndarray:
    a = _as_array(a)
    if a.shape[0] == 0:
        return np.zeros((0, nrows_hint or 0), dtype=np.int64)
    return HowellCore(a, p, m).kernel_rows()


def column_kernel(a: np.ndarray, p: int, m: int, ncols: int) -> np.ndarray:
    """Generators of {v : A v = 0} as columns."""
    a = _as_array(a, cols_hint=ncols)
    if a.shape[1] == 0:
        return np.zeros((0, 0), dtype=np.int64)
    if a.shape[0] == 0:
        return np.eye(a.shape[1], dtype=np.int64)
    return row_kernel(a.T, p, m).T


def elementary_divisors(rel: np.ndarray, ambient: int, p: int, m: int) -> tuple[int, ...]:
    """Divisor profile of (Z/p^m)^ambient modulo the column span of ``rel``.

    Returned as a sorted tuple of prime powers p^e, 1 <= e <= m, one per
    nontrivial cyclic summand.
    """
    N = p**m
    a = _as_array(rel, cols_hint=0) % N
    if a.size == 0:
        return tuple(sorted([N] * ambient))
    a = a.copy()
    divisors = []
    pivot_vals = []
    while a.size and a.any():
        vals = _valuations(a.reshape(-1), p, m)
        k = int(np.argmin(vals))
        v = int(vals[k])
        i, j = divmod(k, a.shape[1])
        a[[0, i]] = a[[i, 0]]
        a[:, [0, j]] = a[:, [j, 0]]
        pv = p**v
        unit = int(a[0, 0]) // pv
        a[0] = (a[0] * pow(unit % N, -1, N)) % N
        while True:
            colv = a[1:, 0]
            if colv.any():
                t = colv // pv
                a[1:] = (a[1:] - np.outer(t, a[0])) % N
            roww = a[0, 1:]
            if roww.any():
                t = roww // pv
                a[:, 1:] = (a[:, 1:] - np.outer(a[:, 0], t)) % N
            if not a[1:, 0].any() and not a[0, 1:].any():
                break
        pivot_vals.append(v)
        a = a[1:, 1:]
    for v in pivot_vals:
        if v > 0:
            divisors.append(p**v)
    divisors.extend([N] * (ambient - len(pivot_vals)))
    return tuple(sorted(divisors))


@dataclass(frozen=True)
class QuotientStructure:
    """Canonical coordinates on (Z/p^m)^ambient modulo a column span.

    ``projection @ x`` are the coordinates of x in the quotient, one per
    cyclic summand; coordinate i is taken modulo p**exponents[i].
    """

    p: int
    m: int
    exponents: tuple[int, ...]
    projection: np.ndarray

    @property
    def summands(self) -> int:
        return len(self.exponents)

    def coords(self, x: np.ndarray) -> np.ndarray:
        N = self.p**self.m
        if self.summands == 0:
            return np.zeros(0, dtype=np.int64)
        out = (self.projection @ (np.asarray(x, dtype=np.int64) % N)) % N
        for i, e in enumerate(self.exponents):
            out[i] %= self.p**e
        return out

    def divisors(self) -> tuple[int, ...]:
        return tuple(sorted(self.p**e for e in self.exponents))


@dataclass(frozen=True)
class SmithData:
    """U A V = D with D diagonal of prime powers; pivot_vals lists the exponents."""

    p: int
    m: int
    rows: int
    cols: int
    pivot_vals: tuple[int, ...]
    U: np.ndarray
    V: np.ndarray | None

    def quotient(self) -> QuotientStructure:
        """Canonical coordinates of (Z/p^m)^rows modulo the column span."""
        exponents = []
        kept = []
        for idx, v in enumerate(self.pivot_vals):
            if v > 0:
                exponents.append(v)
                kept.append(idx)
        for idx in range(len(self.pivot_vals), self.rows):
            exponents.append(self.m)
            kept.append(idx)
        proj = (
            self.U[kept]
            if kept
            else np.zeros((0, self.rows), dtype=np.int64)
        )
        return QuotientStructure(self.p, self.m, tuple(exponents), proj % (self.p**self.m))

    def column_kernel(self) -> np.ndarray:
        """Columns generating {v : A v = 0}, from the diagonal form."""
        if self.V is None:
            raise ValueError("column transform was not tracked")
        N = self.p**self.m
        cols = []
        for idx, v in enumerate(self.pivot_vals):
            if v > 0:
                cols.append((self.V[:, idx] * self.p ** (self.m - v)) % N)
        for idx in range(len(self.pivot_vals), self.cols):
            cols.append(self.V[:, idx] % N)
        if not cols:
            return np.zeros((self.cols, 0), dtype=np.int64)
        return np.array(cols, dtype=np.int64).T


def smith_transforms(rel_cols: np.ndarray, ambient: int, p: int, m: int, track_v: bool = False) -> SmithData:
    """Diagonalize over Z/p^m, tracking the row (and optionally column) transform.

    Pivots are taken by increasing valuation layer, so every division is
    exact; clears touch only the nonzero rows and columns.
    """
    N = p**m
    a = _as_array(rel_cols, cols_hint=0) % N
    if a.ndim != 2 or a.shape[1] == 0:
        a = np.zeros((ambient, 0), dtype=np.int64)
    a = a.copy()
    ncols = a.shape[1]
    U = np.eye(ambient, dtype=np.int64)
    V = np.eye(ncols, dtype=np.int64) if track_v else None
    pivot_vals: list[int] = []
    k = 0
    for v in range(m):
        pv = p**v
        pmod = p ** (v + 1)
        while k < min(a.shape):
            sub = a[k:, k:]
            hits = np.argwhere(sub % pmod != 0)
            if hits.size == 0:
                break
            i, j = int(hits[0][0]) + k, int(hits[0][1]) + k
            if i != k:
                a[[k, i]] = a[[i, k]]
                U[[k, i]] = U[[i, k]]
            if j != k:
                a[:, [k, j]] = a[:, [j, k]]
                if V is not None:
                    V[:, [k, j]] = V[:, [j, k]]
            unit = int(a[k, k]) // pv
            if unit % N != 1:
                uinv = pow(unit % N, -1, N)
                a[k, k:] = (a[k, k:] * uinv) % N
                U[k] = (U[k] * uinv) % N
            colnz = np.nonzero(a[k + 1 :, k])[0]
            if colnz.size:
                rows = colnz + k + 1
                t = a[rows, k] // pv
                a[rows[:, None], np.arange(k, a.shape[1])[None, :]] = (
                    a[rows][:, k:] - np.outer(t, a[k, k:])
                ) % N
                U[rows] = (U[rows] - np.outer(t, U[k])) % N
            rownz = np.nonzero(a[k, k + 1 :])[0]
            if rownz.size:
                cols = rownz + k + 1
                t = a[k, cols] // pv
                a[:, cols] = (a[:, cols] - np.outer(a[:, k], t)) % N
                if V is not None:
                    V[:, cols] = (V[:, cols] - np.outer(V[:, k], t)) % N
            pivot_vals.append(v)
            k += 1
    return SmithData(p, m, ambient, ncols, tuple(pivot_vals), U, V)


def smith_quotient(rel_cols: np.ndarray, ambient: int, p: int, m: int) -> QuotientStructure:
    """Canonical coordinates for (Z/p^m)^ambient / colspan(rel)."""
    return smith_transforms(rel_cols, ambient, p, m).quotient()


# ---------------------------------------------------------------------------
# public operations on exact matrices over Z/p^m
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HowellForm:
    """Canonical row form H with a witness U satisfying U @ A = H."""

    H: Matrix
    U: Matrix


def _require_coefficient(a: Matrix) -> None:
    if a.spec.kind != "coefficient":
        raise SpecMismatch(
            "operation needs a matrix over Z/p^m; expand patch-ring scalars first"
        )


def to_int_array(a: Matrix) -> np.ndarray:
    _require_coefficient(a)
    out = np.zeros((a.rows, a.cols), dtype=np.int64)
    for i in range(a.rows):
        for j in range(a.cols):
            out[i, j] = a.entries[i][j].constant_term()
    return out


def from_int_array(spec: RingSpec, arr: np.ndarray) -> Matrix:
    arr = np.asarray(arr)
    m = Matrix.from_int_rows(spec, arr.tolist())
    if arr.shape[0] == 0:
        return Matrix.zero(spec, 0, arr.shape[1] if arr.ndim == 2 else 0)
    return m


def howell_form(a: Matrix) -> HowellForm:
    """Howell canonical form over Z/p^m; unique for the row span."""
    _require_coefficient(a)
    spec = a.spec
    core = HowellCore(to_int_array(a), spec.p, spec.m)
    return HowellForm(
        H=from_int_array(spec, core.howell_rows()),
        U=from_int_array(spec, core.transform_rows()),
    )


def kernel_and_solve(a: Matrix, b: Matrix | None = None):
    """Row kernel generators of A, plus one solution of x A = b when asked.

    The kernel rows span {x : x A = 0} exactly.  Raises NoSolution when
    b lies outside the row span of A.
    """
    _require_coefficient(a)
    spec = a.spec
    core = HowellCore(to_int_array(a), spec.p, spec.m)
    kernel = from_int_array(spec, core.kernel_rows())
    if b is None:
        return kernel, None
    bvec = to_int_array(b)
    if bvec.shape != (1, a.cols):
        raise ShapeMismatch("right-hand side must be a 1 x cols matrix")
    x = core.solve(bvec[0])
    if x is None:
        raise NoSolution("b is not in the row span of A")
    return kernel, from_int_array(spec, x.reshape(1, -1))


def multiplication_matrix(x: RingTowerElement) -> np.ndarray:
    """Matrix of multiplication by x on the monomial basis, over Z/p^m."""
    spec = x.spec
    basis = spec.monomial_basis()
    index = {e: k for k, e in enumerate(basis)}
    rho = len(basis)
    out = np.zeros((rho, rho), dtype=np.int64)
    for col, e in enumerate(basis):
        prod = x * RingTowerElement(spec, {e: 1})
        for exps, c in prod.coeffs.items():
            out[index[exps], col] = c
    return out


def expand_scalars(a: Matrix) -> np.ndarray:
    """Regular representation of a patch-ring matrix over Z/p^m.

    Returns the (rows*rho) x (cols*rho) integer matrix of the same map
    on underlying free Z/p^m-modules, rho = p^(n q).  Functorial:
    expand(AB) = expand(A) @ expand(B) mod p^m.
    """
    spec = a.spec
    if spec.kind == "graded":
        raise SpecMismatch("graded matrices have no finite expansion")
    rho = spec.coefficient_rank
    out = np.zeros((a.rows * rho, a.cols * rho), dtype=np.int64)
    for i in range(a.rows):
        for j in range(a.cols):
            x = a.entries[i][j]
            if not x.is_zero():
                out[i * rho : (i + 1) * rho, j * rho : (j + 1) * rho] = multiplication_matrix(x)
    return out
