"""Homological invariants over the graded polynomial model F_p[T_1..T_q].

A module is a cokernel presentation (generators and a relation matrix).
The machinery is globally exact over the polynomial ring: resolutions
are built by iterated syzygies, with cancellations and generator drops
performed only against nonzero scalar coefficients, which are honest
units.  On presentations with entries in the irrelevant maximal ideal
(the intended inputs) this coincides with local minimality, so ranks of
the resolution are Betti numbers and its length is projective
dimension.

Support is measured through duals: the h-codimensional part of the
support shows up as the top-dimensional part of the h-th dual module,
cross-checked by a brute-force monomial oracle in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from . import groebner as gb
from .complexes import FreeComplex, empty_complex
from .errors import InvalidParameter, NotMinimalInput, SpecMismatch, UnsupportedRing
from .linalg import Matrix
from .rings import RingSpec, RingTowerElement

Vec = gb.Vec


# ---------------------------------------------------------------------------
# bridges between exact matrices and engine vectors
# ---------------------------------------------------------------------------


def poly_to_vec(x: RingTowerElement) -> Vec:
    return {(0, e): c for e, c in x.coeffs.items()}


def vec_to_poly(spec: RingSpec, v: Vec) -> RingTowerElement:
    return RingTowerElement(spec, {e: c for (_, e), c in v.items()})


def matrix_columns(a: Matrix) -> list[Vec]:
    cols = []
    for j in range(a.cols):
        col: Vec = {}
        for i in range(a.rows):
            for e, c in a.entries[i][j].coeffs.items():
                col[(i, e)] = c
        cols.append(col)
    return cols


def columns_to_matrix(spec: RingSpec, cols: list[Vec], rows: int) -> Matrix:
    zero = RingTowerElement.zero(spec)
    ent = [[zero] * len(cols) for _ in range(rows)]
    for j, col in enumerate(cols):
        per_row: dict[int, dict] = {}
        for (pos, e), c in col.items():
            per_row.setdefault(pos, {})[e] = c
        for pos, coeffs in per_row.items():
            ent[pos][j] = RingTowerElement(spec, coeffs)
    m = Matrix(spec, ent)
    if rows == 0:
        m = Matrix.zero(spec, 0, len(cols))
    return m


def _constant_at(v: Vec, pos: int, q: int) -> int:
    return v.get((pos, (0,) * q), 0)


# ---------------------------------------------------------------------------
# presentations
# ---------------------------------------------------------------------------


class GradedModule:
    """Cokernel of a relation matrix over the graded polynomial ring."""

    __slots__ = ("ring", "gens", "relations", "_cache")

    def __init__(self, ring: RingSpec, gens: int, relations: Matrix):
        if ring.kind != "graded":
            raise SpecMismatch("GradedModule needs a graded ring spec")
        if relations.spec != ring:
            raise SpecMismatch("relations over the wrong ring")
        if relations.rows != gens:
            raise SpecMismatch(
                f"relation matrix has {relations.rows} rows for {gens} generators"
            )
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "gens", int(gens))
        object.__setattr__(self, "relations", relations)
        object.__setattr__(self, "_cache", {})

    def __setattr__(self, *_):
        raise AttributeError("GradedModule is immutable")

    @classmethod
    def free(cls, ring: RingSpec, rank: int) -> "GradedModule":
        return cls(ring, rank, Matrix.zero(ring, rank, 0))

    @classmethod
    def quotient_by_ideal(cls, ring: RingSpec, gens) -> "GradedModule":
        elems = list(gens)
        m = Matrix(ring, [[x for x in elems]]) if elems else Matrix.zero(ring, 1, 0)
        return cls(ring, 1, m)

    def relation_columns(self) -> list[Vec]:
        return matrix_columns(self.relations)

    def __repr__(self):
        return f"GradedModule({self.gens} gens, {self.relations.cols} relations, q={self.ring.q})"


def _prune_presentation(gens: int, cols: list[Vec], p: int, q: int) -> tuple[int, list[Vec], list[int]]:
    """Cancel relation entries that are nonzero scalars.

    Each cancellation removes one generator and one relation through an
    exact change of presentation (the pivot coefficient is a unit of
    the polynomial ring itself).  Returns the surviving generator count,
    columns, and the surviving original generator indices.
    """
    cols = [dict(c) for c in cols]
    alive = list(range(gens))
    while True:
        hit = None
        for j, col in enumerate(cols):
            for idx, pos in enumerate(alive):
                c0 = _constant_at(col, pos, q)
                if c0 and all(e == (0,) * q for (pp, e) in col if pp == pos):
                    hit = (j, idx, pos, c0)
                    break
            if hit:
                break
        if hit is None:
            return len(alive), [
                { (alive.index(pos), e): c for (pos, e), c in col.items() }
                for col in cols
            ], alive
        j, idx, pos, c0 = hit
        pivot_col = cols[j]
        cinv = pow(c0, -1, p)
        new_cols = []
        for l, col in enumerate(cols):
            if l == j:
                continue
            factor = {e: c for (pp, e), c in col.items() if pp == pos}
            out = dict(col)
            for t in [t for t in out if t[0] == pos]:
                del out[t]
            if factor:
                # col -= (col_pos / pivot) * pivot_col, with scalar pivot
                for (pp, e), c in pivot_col.items():
                    if pp == pos:
                        continue
                    for ef, cf in factor.items():
                        t = (pp, tuple(a + b for a, b in zip(e, ef)))
                        acc = (out.get(t, 0) - cinv * cf * c) % p
                        if acc:
                            out[t] = acc
                        else:
                            out.pop(t, None)
            if out:
                new_cols.append(out)
        cols = new_cols
        alive.remove(pos)


def _min_gens_scalar(vectors: list[Vec], t: int, p: int, q: int) -> tuple[list[Vec], list[Vec]]:
    """Drop generators admitting a relation with a nonzero scalar coefficient.

    Returns the surviving vectors and the syzygies of that surviving
    family.  On homogeneous input this is exactly graded Nakayama
    minimality; it is always an exact operation over the polynomial
    ring.
    """
    vectors = [dict(v) for v in vectors if v]
    while True:
        syz = gb.syzygy_generators(vectors, t, p, q)
        drop = None
        for s in syz:
            for pos in sorted({pp for pp, _ in s}):
                sc = _constant_at(s, pos, q)
                if sc and all(e == (0,) * q for (pp, e) in s if pp == pos):
                    drop = pos
                    break
            if drop is not None:
                break
        if drop is None:
            return vectors, syz
        del vectors[drop]


def presentation_data(m: GradedModule) -> tuple[int, list[Vec]]:
    """Pruned generator count and relation columns (cached)."""
    if "pres" not in m._cache:
        p, q = m.ring.p, m.ring.q
        gens, cols, _ = _prune_presentation(m.gens, m.relation_columns(), p, q)
        m._cache["pres"] = (gens, cols)
    return m._cache["pres"]


def module_is_zero(m: GradedModule) -> bool:
    gens, cols = presentation_data(m)
    if gens == 0:
        return True
    return gb.module_is_zero(cols, gens, m.ring.p, m.ring.q)


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------


def groebner_basis(generators, order: str = "grevlex") -> list[RingTowerElement]:
    """Reduced basis of the ideal the generators span; unique per order."""
    elems = [x for x in generators if not x.is_zero()]
    if not elems:
        return []
    spec = elems[0].spec
    if spec.kind != "graded":
        raise UnsupportedRing("Groebner bases live over the graded model")
    if order not in gb.MONOMIAL_ORDERS:
        raise InvalidParameter(f"unknown monomial order {order!r}")
    basis = gb.buchberger(
        [poly_to_vec(x) for x in elems], spec.p, gb.ModuleOrder(gb.MONOMIAL_ORDERS[order])
    )
    return [vec_to_poly(spec, v) for v in basis]


def minimal_graded_resolution(m: GradedModule) -> tuple[FreeComplex, tuple[int, ...]]:
    """Free resolution by iterated syzygies with scalar-unit pruning.

    Returned as a cochain complex in degrees [-length, 0] whose degree-0
    term covers the module; the rank vector is the Betti sequence.  For
    presentations with entries in the maximal ideal every differential
    entry has zero constant term.
    """
    if "resolution" in m._cache:
        return m._cache["resolution"]
    ring = m.ring
    p, q = ring.p, ring.q
    gens, cols = presentation_data(m)
    if gens == 0:
        out = (empty_complex(ring), ())
        m._cache["resolution"] = out
        return out
    ranks = [gens]
    steps: list[list[Vec]] = []
    current = cols
    guard = 0
    while current:
        current, syz = _min_gens_scalar(current, ranks[-1], p, q)
        if not current:
            break
        steps.append(current)
        ranks.append(len(current))
        current = syz
        guard += 1
        if guard > q + 12:
            raise AssertionError("resolution failed to terminate")
    length = len(steps)
    diffs = [columns_to_matrix(ring, step, ranks[k]) for k, step in enumerate(steps)]
    # cochain layout: degree -k has rank ranks[k], differentials run upward
    complex_ranks = list(reversed(ranks))
    complex_diffs = list(reversed(diffs))
    cx = FreeComplex(ring, -length, complex_ranks, complex_diffs)
    out = (cx, tuple(ranks))
    m._cache["resolution"] = out
    return out


def _resolution_steps(m: GradedModule) -> tuple[tuple[int, ...], list[list[Vec]]]:
    cx, betti = minimal_graded_resolution(m)
    if not betti:
        return (), []
    steps = []
    for k in range(len(betti) - 1):
        d = cx.diffs[len(cx.diffs) - 1 - k]
        steps.append(matrix_columns(d))
    return betti, steps


def _transpose_cols(cols: list[Vec], rows: int) -> list[Vec]:
    """Columns of the transposed matrix, given columns of the original."""
    out: list[Vec] = [dict() for _ in range(rows)]
    for j, col in enumerate(cols):
        for (pos, e), c in col.items():
            out[pos][(j, e)] = c
    return out


def ext_module(m: GradedModule, i: int) -> GradedModule:
    """The i-th right derived dual, presented from the resolution."""
    ring = m.ring
    p, q = ring.p, ring.q
    if i < 0:
        raise InvalidParameter("negative dual index")
    key = ("ext", i)
    if key in m._cache:
        return m._cache[key]
    betti, steps = _resolution_steps(m)
    if not betti:
        out = GradedModule(ring, 0, Matrix.zero(ring, 0, 0))
        m._cache[key] = out
        return out
    length = len(steps)
    if i > length:
        out = GradedModule(ring, 0, Matrix.zero(ring, 0, 0))
        m._cache[key] = out
        return out
    # dual differential into homological spot k is the transpose of step k
    rank_i = betti[i]
    if i == length:
        kernel = [{(l, (0,) * q): 1} for l in range(rank_i)]
    else:
        # transpose of step i maps R^{betti[i]} -> R^{betti[i+1]}; its
        # betti[i] columns live in R^{betti[i+1]}
        dual_out = _transpose_cols(steps[i], betti[i])
        kernel = gb.kernel_of_columns(dual_out, betti[i + 1], p, q)
    if i == 0:
        image_cols: list[Vec] = []
    else:
        image_cols = _transpose_cols(steps[i - 1], betti[i - 1])
    rel = gb.relations_modulo(kernel, image_cols, rank_i, p, q) if kernel else []
    out = GradedModule(ring, len(kernel), columns_to_matrix(ring, rel, len(kernel)))
    m._cache[key] = out
    return out


def annihilator_ideal(m: GradedModule) -> list[RingTowerElement]:
    if "ann" not in m._cache:
        gens, cols = presentation_data(m)
        basis = gb.annihilator(cols, gens, m.ring.p, m.ring.q)
        m._cache["ann"] = [vec_to_poly(m.ring, v) for v in basis]
    return m._cache["ann"]


def fitting_ideal(m: GradedModule) -> list[RingTowerElement] | None:
    """Generators of the 0th Fitting ideal, or None when too many minors."""
    gens, cols = presentation_data(m)
    t, s = gens, len(cols)
    if t == 0:
        return [RingTowerElement.one(m.ring)]
    if s < t:
        return []
    from math import comb

    if comb(s, t) > 120:
        return None
    rows_of = [[{} for _ in range(s)] for _ in range(t)]
    for j, col in enumerate(cols):
        for (pos, e), c in col.items():
            rows_of[pos][j][(0, e)] = c
    out = []
    for subset in combinations(range(s), t):
        sub = [[rows_of[i][j] for j in subset] for i in range(t)]
        det = gb.poly_determinant(sub, m.ring.p)
        if det:
            out.append(vec_to_poly(m.ring, det))
    return out


def module_dimension(m: GradedModule) -> int:
    """Krull dimension of the support, via the initial ideal of a defining ideal.

    Uses the 0th Fitting ideal when its minor count is small, otherwise
    the annihilator; both have the same radical, hence the same
    dimension.
    """
    if "dim" in m._cache:
        return m._cache["dim"]
    p, q = m.ring.p, m.ring.q
    fit = fitting_ideal(m)
    if fit is not None:
        dim = gb.ideal_dimension([poly_to_vec(x) for x in fit], p, q)
    else:
        dim = gb.ideal_dimension([poly_to_vec(x) for x in annihilator_ideal(m)], p, q)
    m._cache["dim"] = dim
    return dim


def _koszul_block_columns(step_cols: list[Vec], copies_src: int, copies_tgt: int, gens: int):
    """Kronecker expansion of a Koszul differential against a module cover."""
    # step_cols: columns of the Koszul map R^{copies_src} -> R^{copies_tgt}
    out = []
    for j, col in enumerate(step_cols):
        for l in range(gens):
            big: Vec = {}
            for (pos, e), c in col.items():
                big[(pos * gens + l, e)] = c
            out.append(big)
    return out


def module_depth(m: GradedModule) -> int | None:
    """Depth along (T_1..T_q), read from Koszul homology of the cover."""
    if "depth" in m._cache:
        return m._cache["depth"]
    ring = m.ring
    p, q = ring.p, ring.q
    gens, rel_cols = presentation_data(m)
    if gens == 0 or gb.module_is_zero(rel_cols, gens, p, q):
        m._cache["depth"] = None
        return None
    subsets = [list(combinations(range(q), i)) for i in range(q + 1)]

    def boundary(i: int) -> list[Vec]:
        # chain map from i-subsets to (i-1)-subsets
        tgt_index = {s: k for k, s in enumerate(subsets[i - 1])}
        cols = []
        for s in subsets[i]:
            col: Vec = {}
            for a, var in enumerate(s):
                rest = tuple(x for x in s if x != var)
                sign = 1 if a % 2 == 0 else p - 1
                exps = tuple(1 if k == var else 0 for k in range(q))
                col[(tgt_index[rest], exps)] = sign
            cols.append(col)
        return cols

    def block_rel(i: int) -> list[Vec]:
        copies = len(subsets[i])
        out = []
        for b in range(copies):
            for col in rel_cols:
                out.append({(b * gens + pos, e): c for (pos, e), c in col.items()})
        return out

    depth = None
    for i in range(q, -1, -1):
        copies = len(subsets[i])
        amb = copies * gens
        if i == 0:
            cycles = [{(l, (0,) * q): 1} for l in range(amb)]
        else:
            bnd_out = _koszul_block_columns(boundary(i), copies, len(subsets[i - 1]), gens)
            lower_amb = len(subsets[i - 1]) * gens
            cycles = _koszul_cycles(bnd_out, block_rel(i - 1), amb, lower_amb, p, q)
        if i == q:
            bnd_in: list[Vec] = []
        else:
            bnd_in = _koszul_block_columns(boundary(i + 1), len(subsets[i + 1]), copies, gens)
        span = bnd_in + block_rel(i)
        basis = gb.prepared_basis(gb.buchberger(span, p), p)
        if any(gb.normal_form(v, basis) for v in cycles):
            depth = q - i
            break
    # exhaustion means the variable ideal acts invertibly; depth along it
    # is undefined, which only happens off the intended input domain
    m._cache["depth"] = depth
    return depth


def _koszul_cycles(bnd_out_cols: list[Vec], lower_rel: list[Vec], amb: int, lower_amb: int, p: int, q: int) -> list[Vec]:
    """Vectors in the i-th cover whose boundary lands in the relation span."""
    merged = bnd_out_cols + lower_rel
    syz = gb.syzygy_generators(merged, lower_amb, p, q)
    k = len(bnd_out_cols)
    out = []
    for s in syz:
        proj = {(pos, e): c for (pos, e), c in s.items() if pos < k}
        if proj:
            out.append(proj)
    return out


def module_grade(m: GradedModule) -> int | None:
    """Least index with a nonzero right derived dual."""
    if "grade" in m._cache:
        return m._cache["grade"]
    if module_is_zero(m):
        m._cache["grade"] = None
        return None
    betti, _ = _resolution_steps(m)
    length = len(betti) - 1
    grade = None
    for i in range(length + 1):
        if not module_is_zero(ext_module(m, i)):
            grade = i
            break
    m._cache["grade"] = grade
    return grade


def module_invariants(m: GradedModule) -> dict:
    """Dimension, depth, grade, projective dimension, perfection, amplitude.

    Zero modules report dim -1 and None for the rest; ``amplitude`` is
    the rank-profile width of the resolution and always matches
    projdim.
    """
    if module_is_zero(m):
        return {
            "dim": -1,
            "depth": None,
            "grade": None,
            "projdim": None,
            "perfect": None,
            "amplitude": None,
            "betti": (),
        }
    cx, betti = minimal_graded_resolution(m)
    from .complexes import tau_profile

    projdim = len(betti) - 1
    amplitude = tau_profile(cx).amplitude
    grade = module_grade(m)
    depth = module_depth(m)
    return {
        "dim": module_dimension(m),
        "depth": depth,
        "grade": grade,
        "projdim": projdim,
        "perfect": grade == projdim,
        "amplitude": amplitude,
        "betti": betti,
    }


# ---------------------------------------------------------------------------
# support-height profiles
# ---------------------------------------------------------------------------


def _vec_ideal(elems: list[RingTowerElement]) -> list[Vec]:
    return [poly_to_vec(x) for x in elems if not x.is_zero()]


def support_components(m: GradedModule) -> dict[int, list[Vec]]:
    """Level ideals of the minimal support components, keyed by height.

    Level h survives when the h-th dual has dimension exactly q-h after
    saturating away everything inside lower-height components.
    """
    ring = m.ring
    p, q = ring.p, ring.q
    if module_is_zero(m):
        return {}
    betti, _ = _resolution_steps(m)
    length = len(betti) - 1
    components: dict[int, list[Vec]] = {}
    for h in range(min(q, length) + 1):
        ext = ext_module(m, h)
        if module_is_zero(ext):
            continue
        ann = _vec_ideal(annihilator_ideal(ext))
        level = gb.ideal_gb(ann, p)
        for h2, lower in sorted(components.items()):
            level = gb.saturate(level, lower, p, q)
        if gb.ideal_dimension(level, p, q) == q - h:
            components[h] = level
    return components


def support_height_profile(m: GradedModule) -> set[int]:
    """Heights of the minimal primes of the support; empty for the zero module."""
    return set(support_components(m))


def monomial_minimal_prime_heights(ring: RingSpec, monomials) -> set[int]:
    """Brute-force oracle: minimal variable covers of a monomial ideal."""
    supports = []
    for x in monomials:
        (exps,) = x.coeffs.keys()
        supports.append(frozenset(i for i, e in enumerate(exps) if e))
    if not supports:
        return set()
    if frozenset() in supports:
        return set()
    q = ring.q
    covers = []
    for size in range(q + 1):
        for subset in combinations(range(q), size):
            sset = frozenset(subset)
            if all(sup & sset for sup in supports):
                covers.append(sset)
    minimal = [c for c in covers if not any(o < c for o in covers)]
    return {len(c) for c in minimal}


# ---------------------------------------------------------------------------
# the height-amplitude verifier
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HAReport:
    """Verdict object for the height-amplitude checks on one complex."""

    amplitude: int | None
    height_profile: frozenset[int]
    part_i: dict
    part_ii: dict
    part_iii: dict
    duality: dict | None
    cohomology_zero: dict[int, bool] = field(default_factory=dict)

    @property
    def all_pass(self) -> bool:
        ok = self.part_i["pass"]
        if self.part_ii["applicable"]:
            ok = ok and self.part_ii["pass"]
        if self.part_iii["applicable"]:
            ok = ok and self.part_iii["lower_vanishing"] and self.part_iii["top_perfect"]
            if self.duality is not None:
                ok = ok and self.duality["radical_match"]
                if self.duality["graded"]:
                    ok = ok and self.duality["hilbert_match"]
        return ok

    def to_obj(self) -> dict:
        return {
            "amplitude": self.amplitude,
            "height_profile": sorted(self.height_profile),
            "part_i": self.part_i,
            "part_ii": self.part_ii,
            "part_iii": self.part_iii,
            "duality": self.duality,
            "cohomology_zero": {str(k): v for k, v in sorted(self.cohomology_zero.items())},
            "all_pass": self.all_pass,
        }

    def to_text(self) -> str:
        lines = [
            f"amplitude        : {self.amplitude}",
            f"height profile   : {sorted(self.height_profile)}",
            f"part i  (heights <= amplitude)         : {'pass' if self.part_i['pass'] else 'FAIL'}",
        ]
        if self.part_ii["applicable"]:
            lines.append(
                f"part ii (top components off low degrees): {'pass' if self.part_ii['pass'] else 'FAIL'}"
            )
        else:
            lines.append("part ii (top components off low degrees): not applicable")
        if self.part_iii["applicable"]:
            lines.append(
                "part iii (concentration + perfection)   : "
                + ("pass" if self.part_iii["lower_vanishing"] and self.part_iii["top_perfect"] else "FAIL")
            )
            if self.duality is not None:
                lines.append(
                    "duality (dual top vs derived dual)      : "
                    + ("pass" if self.duality["hilbert_match"] and self.duality["radical_match"] else "FAIL")
                )
        else:
            lines.append("part iii (concentration + perfection)   : not applicable")
        lines.append(f"overall: {'pass' if self.all_pass else 'FAIL'}")
        return "\n".join(lines)


def complex_cohomology_module(c: FreeComplex, degree: int) -> GradedModule:
    """Cohomology of a graded free complex at one degree, as a presentation."""
    ring = c.spec
    p, q = ring.p, ring.q
    rk = c.rank(degree)
    if rk == 0:
        return GradedModule(ring, 0, Matrix.zero(ring, 0, 0))
    d_out = c.differential(degree)
    d_in = c.differential(degree - 1)
    image = matrix_columns(d_in) if d_in.cols else []
    if d_out.rows == 0:
        # full kernel: the presentation is just the cokernel of the
        # incoming differential, on the original basis
        return GradedModule(ring, rk, d_in if d_in.cols else Matrix.zero(ring, rk, 0))
    kernel = gb.kernel_of_columns(matrix_columns(d_out), d_out.rows, p, q)
    rel = gb.relations_modulo(kernel, image, rk, p, q) if kernel else []
    return GradedModule(ring, len(kernel), columns_to_matrix(ring, rel, len(kernel)))


def _combined_support(modules: dict[int, GradedModule], p: int, q: int):
    """Support components of the direct sum, merged across degrees."""
    per_degree = {d: support_components(mod) for d, mod in modules.items()}
    merged: dict[int, list[Vec]] = {}
    heights = sorted({h for comp in per_degree.values() for h in comp})
    for h in heights:
        pieces = []
        for d, comp in per_degree.items():
            if h not in comp:
                continue
            level = comp[h]
            for h2 in sorted(merged):
                if h2 < h:
                    level = gb.saturate(level, merged[h2], p, q)
            if gb.ideal_dimension(level, p, q) == q - h:
                pieces.append(level)
        if not pieces:
            continue
        total = pieces[0]
        for extra in pieces[1:]:
            total = gb.ideal_product(total, extra, p, q)
        merged[h] = total
    return merged, per_degree


def verify_height_amplitude(c: FreeComplex) -> HAReport:
    """Height bound, localization vanishing, and concentration checks.

    The input must be a minimal graded complex: every differential
    entry with nonzero constant term is rejected, since such an entry is
    a unit of the local model and the rank profile would lie.
    """
    ring = c.spec
    if ring.kind != "graded":
        raise SpecMismatch("height-amplitude verification runs over the graded model")
    p, q = ring.p, ring.q
    for d in c.diffs:
        for row in d.entries:
            for x in row:
                if x.constant_term():
                    raise NotMinimalInput(
                        "differential entry has a unit constant term; minimize first"
                    )
    degrees = [d for d in c.degrees if c.rank(d)]
    if not degrees:
        report_empty = {"applicable": False, "pass": True, "witnesses": []}
        return HAReport(
            amplitude=None,
            height_profile=frozenset(),
            part_i={"pass": True, "max_height": None},
            part_ii=report_empty,
            part_iii={"applicable": False, "lower_vanishing": True, "top_perfect": True},
            duality=None,
        )
    d_minus, d_plus = min(degrees), max(degrees)
    amplitude = d_plus - d_minus

    modules = {d: complex_cohomology_module(c, d) for d in c.degrees}
    zero_flags = {d: module_is_zero(modules[d]) for d in c.degrees}
    nonzero = {d: m for d, m in modules.items() if not zero_flags[d]}

    merged, per_degree = _combined_support(nonzero, p, q)
    profile = frozenset(merged)
    max_height = max(profile) if profile else None
    part_i = {"pass": max_height is None or max_height <= amplitude, "max_height": max_height}

    # part ii: no top-height component may meet the support of a low degree
    if amplitude in merged:
        witnesses = []
        top_level = merged[amplitude]
        for d, mod in nonzero.items():
            if d == d_plus:
                continue
            ann = _vec_ideal(annihilator_ideal(mod))
            meet = gb.ideal_sum(top_level, ann, p)
            if gb.ideal_dimension(meet, p, q) == q - amplitude:
                witnesses.append(d)
        part_ii = {"applicable": True, "pass": not witnesses, "witnesses": witnesses}
    else:
        part_ii = {"applicable": False, "pass": True, "witnesses": []}

    # part iii: when every component height equals the amplitude
    applicable = bool(profile) and profile == frozenset({amplitude})
    duality = None
    if applicable:
        lower_vanishing = all(zero_flags[d] for d in c.degrees if d < d_plus)
        top = modules[d_plus]
        inv = module_invariants(top)
        top_perfect = (
            inv["grade"] is not None
            and inv["grade"] == inv["projdim"]
        )
        duality = _duality_check(c, top, amplitude)
        part_iii = {
            "applicable": True,
            "lower_vanishing": lower_vanishing,
            "top_perfect": top_perfect,
        }
    else:
        part_iii = {"applicable": False, "lower_vanishing": True, "top_perfect": True}

    return HAReport(
        amplitude=amplitude,
        height_profile=profile,
        part_i=part_i,
        part_ii=part_ii,
        part_iii=part_iii,
        duality=duality,
        cohomology_zero=zero_flags,
    )


HILBERT_DEGREE = 6


def infer_twists(c: FreeComplex) -> dict[int, list[int]] | None:
    """Consistent generator degrees for a graded complex, or None.

    Every nonzero differential entry must be homogeneous, and the degree
    constraints deg(target) = deg(source) + deg(entry) must be solvable;
    each connected component of generators is anchored at degree zero
    for its first generator (lowest complex degree, lowest index).
    """
    if c.is_empty():
        return {}
    nodes = [(deg, j) for deg in c.degrees for j in range(c.rank(deg))]
    adj: dict[tuple[int, int], list[tuple[tuple[int, int], int]]] = {v: [] for v in nodes}
    for idx, d in enumerate(c.diffs):
        deg = c.lo + idx
        for k in range(d.rows):
            for l in range(d.cols):
                x = d.entries[k][l]
                if x.is_zero():
                    continue
                degs = {sum(e) for e in x.coeffs}
                if len(degs) != 1:
                    return None
                (e_deg,) = degs
                # degree-preserving maps: entry degree = source - target
                src, tgt = (deg, l), (deg + 1, k)
                adj[src].append((tgt, -e_deg))
                adj[tgt].append((src, e_deg))
    twists: dict[tuple[int, int], int] = {}
    for root in nodes:
        if root in twists:
            continue
        twists[root] = 0
        stack = [root]
        while stack:
            v = stack.pop()
            for w, delta in adj[v]:
                want = twists[v] + delta
                if w in twists:
                    if twists[w] != want:
                        return None
                else:
                    twists[w] = want
                    stack.append(w)
    return {deg: [twists[(deg, j)] for j in range(c.rank(deg))] for deg in c.degrees}


def _vector_degree(v: Vec, shifts: list[int]) -> int | None:
    """Uniform degree of a vector relative to generator shifts, or None."""
    degs = {sum(e) + shifts[pos] for (pos, e) in v}
    if len(degs) != 1:
        return None
    return degs.pop()


def _shifted_hilbert(rel_cols: list[Vec], gens: int, shifts: list[int], p: int, q: int) -> dict[int, int]:
    """Filtration dimensions by total degree, generators shifted.

    Counts standard monomial-position pairs at each absolute degree up
    to HILBERT_DEGREE; degrees may be negative when shifts are.
    """
    if gens == 0:
        return {}
    basis = gb.buchberger(rel_cols, p) if rel_cols else []
    order = gb.ModuleOrder()
    leads_by_pos: dict[int, list[tuple[int, ...]]] = {}
    for g in basis:
        pos, e = gb.lead(g, order)
        leads_by_pos.setdefault(pos, []).append(e)
    out: dict[int, int] = {}
    for j in range(gens):
        depth = HILBERT_DEGREE - shifts[j]
        if depth < 0:
            continue
        leads = leads_by_pos.get(j, [])

        def rec(prefix, remaining, slots):
            if slots == 0:
                yield prefix
                return
            for k in range(remaining + 1):
                yield from rec(prefix + (k,), remaining - k, slots - 1)

        for e in rec((), depth, q):
            if not any(all(x >= y for x, y in zip(e, le)) for le in leads):
                d = sum(e) + shifts[j]
                out[d] = out.get(d, 0) + 1
    return {d: n for d, n in sorted(out.items()) if n}


def _resolution_twists(m: GradedModule, start: list[int]) -> list[list[int]] | None:
    """Generator degrees of every resolution step, or None if not graded."""
    betti, steps = _resolution_steps(m)
    if not betti:
        return []
    twists = [list(start)]
    for step in steps:
        nxt = []
        for col in step:
            d = _vector_degree(col, twists[-1])
            if d is None:
                return None
            nxt.append(d)
        twists.append(nxt)
    return twists


def _duality_check(c: FreeComplex, top: GradedModule, amplitude: int) -> dict:
    """Compare the dual complex's top cohomology against the derived dual.

    When the complex carries a consistent grading the two sides are
    compared through honest twisted Hilbert functions up to total degree
    six; otherwise only the annihilator radicals are compared and the
    report says so.
    """
    ring = c.spec
    p, q = ring.p, ring.q
    degrees = [d for d in c.degrees if c.rank(d)]
    lo, hi = min(degrees), max(degrees)
    d_bottom = c.differential(lo)
    left = GradedModule(ring, c.rank(lo), d_bottom.transpose())
    right = ext_module(top, amplitude)
    ann_l = _vec_ideal(annihilator_ideal(left))
    ann_r = _vec_ideal(annihilator_ideal(right))
    radical_match = gb.radical_equal(ann_l, ann_r, p, q)

    twists = infer_twists(c)
    betti, _ = _resolution_steps(top)
    res_twists = (
        _resolution_twists(top, twists[hi]) if twists is not None else None
    )
    graded = (
        twists is not None
        and res_twists is not None
        and len(betti) - 1 == amplitude
    )
    if not graded:
        return {
            "graded": False,
            "hilbert_left": None,
            "hilbert_right": None,
            "hilbert_match": None,
            "radical_match": radical_match,
        }

    left_shifts = [-w for w in twists[lo]]
    gens_l, cols_l = presentation_data(left)
    right_shifts = [-w for w in res_twists[amplitude]]
    gens_r, cols_r = presentation_data(right)
    # minimal input means no scalar entries anywhere, so pruning never
    # drops generators and the shift lists stay aligned
    if gens_l != len(left_shifts) or gens_r != len(right_shifts):
        return {
            "graded": False,
            "hilbert_left": None,
            "hilbert_right": None,
            "hilbert_match": None,
            "radical_match": radical_match,
        }
    hl = _shifted_hilbert(cols_l, gens_l, left_shifts, p, q)
    hr = _shifted_hilbert(cols_r, gens_r, right_shifts, p, q)
    return {
        "graded": True,
        "hilbert_left": {str(k): v for k, v in hl.items()},
        "hilbert_right": {str(k): v for k, v in hr.items()},
        "hilbert_match": hl == hr,
        "radical_match": radical_match,
    }
