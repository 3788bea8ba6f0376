"""Groebner machinery for submodules of free modules over F_p[T_1..T_q].

Vectors are dicts mapping ``(position, exponent-tuple)`` to nonzero
residues mod p; ideals are the one-position case.  Buchberger with the
graded reverse lexicographic order by default, full reductions, and
canonical reduced bases (monic, interreduced, sorted by leading term),
so equal submodules produce identical bases.

Syzygies come from the block-order elimination trick: embed each
generator g_i as g_i + e_i in a larger free module whose first block
dominates; basis elements supported on the second block generate the
syzygy module exactly.
"""

from __future__ import annotations

from itertools import combinations

Term = tuple[int, tuple[int, ...]]
Vec = dict[Term, int]


def grevlex_key(e: tuple[int, ...]):
    return (sum(e), tuple(-x for x in reversed(e)))


def lex_key(e: tuple[int, ...]):
    return tuple(e)


MONOMIAL_ORDERS = {"grevlex": grevlex_key, "lex": lex_key}


class ModuleOrder:
    """Term order on a free module; ``cut`` makes positions < cut dominant."""

    __slots__ = ("mkey", "cut")

    def __init__(self, mkey=grevlex_key, cut: int | None = None):
        self.mkey = mkey
        self.cut = cut

    def key(self, term: Term):
        pos, e = term
        block = 1 if (self.cut is not None and pos < self.cut) else 0
        return (block, self.mkey(e), -pos)


def lead(vec: Vec, order: ModuleOrder) -> Term:
    return max(vec, key=order.key)


def vec_scale(vec: Vec, c: int, p: int) -> Vec:
    c %= p
    if c == 1:
        return dict(vec)
    return {t: (v * c) % p for t, v in vec.items()}


def vec_sub_shifted(target: Vec, src: Vec, c: int, shift: tuple[int, ...], p: int) -> None:
    """target -= c * x^shift * src, in place."""
    for (pos, e), v in src.items():
        t = (pos, tuple(a + b for a, b in zip(e, shift)))
        acc = (target.get(t, 0) - c * v) % p
        if acc:
            target[t] = acc
        else:
            target.pop(t, None)


def _divides(a: Term, b: Term) -> bool:
    return a[0] == b[0] and all(x <= y for x, y in zip(a[1], b[1]))


class _Basis:
    """Monic basis elements bucketed by lead position for fast reduction."""

    __slots__ = ("order", "p", "items", "by_pos")

    def __init__(self, order: ModuleOrder, p: int):
        self.order = order
        self.p = p
        self.items: list[tuple[Term, Vec]] = []
        self.by_pos: dict[int, list[int]] = {}

    def add(self, vec: Vec) -> None:
        lt = lead(vec, self.order)
        inv = pow(vec[lt], -1, self.p)
        vec = vec_scale(vec, inv, self.p)
        self.by_pos.setdefault(lt[0], []).append(len(self.items))
        self.items.append((lt, vec))

    def reduce_lead(self, work: Vec) -> tuple[Vec, bool]:
        lt = lead(work, self.order)
        for idx in self.by_pos.get(lt[0], ()):
            blt, bvec = self.items[idx]
            if _divides(blt, lt):
                shift = tuple(x - y for x, y in zip(lt[1], blt[1]))
                vec_sub_shifted(work, bvec, work[lt], shift, self.p)
                return work, True
        return work, False


def normal_form(vec: Vec, basis: _Basis) -> Vec:
    """Full reduction: every term of the remainder escapes all lead terms."""
    work = dict(vec)
    rem: Vec = {}
    while work:
        work, hit = basis.reduce_lead(work)
        if not work:
            break
        if not hit:
            lt = lead(work, basis.order)
            rem[lt] = work.pop(lt)
    return rem


def buchberger(gens, p: int, order: ModuleOrder | None = None) -> list[Vec]:
    """Reduced Groebner basis of the submodule generated by ``gens``."""
    order = order or ModuleOrder()
    basis = _Basis(order, p)
    seeds = [dict(g) for g in gens if g]
    # deterministic seeding: largest leads first keeps reductions short
    seeds.sort(key=lambda v: order.key(lead(v, order)), reverse=True)
    for g in seeds:
        g = normal_form(g, basis)
        if g:
            basis.add(g)
    is_ideal = all(pos == 0 for _, vec in basis.items for (pos, _) in vec)

    pairs = []

    def push_pairs(new_idx: int) -> None:
        nlt, _ = basis.items[new_idx]
        for idx in range(new_idx):
            blt, _ = basis.items[idx]
            if blt[0] != nlt[0]:
                continue
            lcm = tuple(max(x, y) for x, y in zip(blt[1], nlt[1]))
            if is_ideal and all(x + y == z for x, y, z in zip(blt[1], nlt[1], lcm)):
                continue  # coprime leads, S-vector reduces to zero
            pairs.append((order.mkey(lcm), idx, new_idx, (nlt[0], lcm)))

    for i in range(len(basis.items)):
        push_pairs(i)

    while pairs:
        pairs.sort(key=lambda x: x[0])
        _, i, j, (pos, lcm) = pairs.pop(0)
        (lti, vi), (ltj, vj) = basis.items[i], basis.items[j]
        s: Vec = {}
        vec_sub_shifted(s, vi, p - 1, tuple(a - b for a, b in zip(lcm, lti[1])), p)
        vec_sub_shifted(s, vj, 1, tuple(a - b for a, b in zip(lcm, ltj[1])), p)
        s = normal_form(s, basis)
        if s:
            basis.add(s)
            push_pairs(len(basis.items) - 1)

    return _reduce_basis(basis)


def _reduce_basis(basis: _Basis) -> list[Vec]:
    order, p = basis.order, basis.p
    # drop elements whose lead is divisible by another surviving lead
    items = sorted(basis.items, key=lambda it: order.key(it[0]))
    kept: list[tuple[Term, Vec]] = []
    for lt, vec in items:
        if any(_divides(klt, lt) for klt, _ in kept):
            continue
        kept.append((lt, vec))
    out = []
    for i, (lt, vec) in enumerate(kept):
        small = _Basis(order, p)
        for j, (_, other) in enumerate(kept):
            if j != i:
                small.add(dict(other))
        red = normal_form(vec, small)
        if red:
            inv = pow(red[lead(red, order)], -1, p)
            out.append(vec_scale(red, inv, p))
    out.sort(key=lambda v: order.key(lead(v, order)), reverse=True)
    return out


def prepared_basis(gb: list[Vec], p: int, order: ModuleOrder | None = None) -> _Basis:
    order = order or ModuleOrder()
    basis = _Basis(order, p)
    for g in gb:
        basis.add(dict(g))
    return basis


# ---------------------------------------------------------------------------
# syzygies and derived module operations
# ---------------------------------------------------------------------------


def syzygy_generators(vectors: list[Vec], t: int, p: int, q: int) -> list[Vec]:
    """Generators of the relation module of ``vectors`` inside R^t."""
    s = len(vectors)
    zero_e = (0,) * q
    embedded = []
    live = []
    for i, v in enumerate(vectors):
        h = dict(v)
        h[(t + i, zero_e)] = 1
        embedded.append(h)
        live.append(i)
    gb = buchberger(embedded, p, ModuleOrder(grevlex_key, cut=t))
    out = []
    for g in gb:
        if all(pos >= t for pos, _ in g):
            out.append({(pos - t, e): c for (pos, e), c in g.items()})
    return out


def kernel_of_columns(cols: list[Vec], t: int, p: int, q: int) -> list[Vec]:
    """Kernel of the map R^s -> R^t sending e_l to cols[l]."""
    return syzygy_generators(cols, t, p, q)


def relations_modulo(gens: list[Vec], modulus_cols: list[Vec], t: int, p: int, q: int) -> list[Vec]:
    """Coefficient vectors c with sum c_l * gens[l] inside span(modulus_cols)."""
    merged = list(gens) + list(modulus_cols)
    k = len(gens)
    syz = syzygy_generators(merged, t, p, q)
    out = []
    for s in syz:
        proj = {(pos, e): c for (pos, e), c in s.items() if pos < k}
        if proj:
            out.append(proj)
    return out


def module_is_zero(rel_cols: list[Vec], t: int, p: int, q: int) -> bool:
    """Is R^t equal to the column span, i.e. the cokernel zero?"""
    if t == 0:
        return True
    gb = buchberger(rel_cols, p)
    basis = prepared_basis(gb, p)
    zero_e = (0,) * q
    return all(not normal_form({(i, zero_e): 1}, basis) for i in range(t))


def annihilator(rel_cols: list[Vec], t: int, p: int, q: int) -> list[Vec]:
    """The ideal of ring elements acting as zero on coker(rel_cols in R^t).

    One syzygy computation: f annihilates iff f * (e_1,...,e_t), viewed
    inside the t-fold block sum, falls in the blockwise relation span.
    """
    zero_e = (0,) * q
    if t == 0:
        return [{(0, zero_e): 1}]
    big_t = t * t
    diag: Vec = {(i * t + i, zero_e): 1 for i in range(t)}
    blocks = []
    for i in range(t):
        for col in rel_cols:
            blocks.append({(i * t + pos, e): c for (pos, e), c in col.items()})
    syz = syzygy_generators([diag] + blocks, big_t, p, q)
    out = []
    for s in syz:
        f = {(0, e): c for (pos, e), c in s.items() if pos == 0}
        if f:
            out.append(f)
    return ideal_gb(out, p)


def ideal_gb(gens: list[Vec], p: int, mkey=grevlex_key) -> list[Vec]:
    return buchberger(gens, p, ModuleOrder(mkey))


def ideal_quotient(i_gens: list[Vec], j_gens: list[Vec], p: int, q: int) -> list[Vec]:
    """(I : J) = {f : f*g in I for all g in J}, via one block syzygy run."""
    j_gens = [g for g in j_gens if g]
    if not j_gens:
        return [{(0, (0,) * q): 1}]
    s = len(j_gens)
    diag: Vec = {}
    for jdx, g in enumerate(j_gens):
        for (pos, e), c in g.items():
            diag[(jdx, e)] = c
    blocks = []
    for jdx in range(s):
        for f in i_gens:
            blocks.append({(jdx, e): c for (pos, e), c in f.items()})
    syz = syzygy_generators([diag] + blocks, s, p, q)
    out = []
    for vec in syz:
        f = {(0, e): c for (pos, e), c in vec.items() if pos == 0}
        if f:
            out.append(f)
    return ideal_gb(out, p)


def saturate(i_gens: list[Vec], j_gens: list[Vec], p: int, q: int) -> list[Vec]:
    """(I : J^infinity), iterating quotients until the basis stabilizes."""
    cur = ideal_gb(i_gens, p)
    while True:
        nxt = ideal_quotient(cur, j_gens, p, q)
        if nxt == cur:
            return cur
        cur = nxt


def ideal_sum(i_gens: list[Vec], j_gens: list[Vec], p: int) -> list[Vec]:
    return ideal_gb(list(i_gens) + list(j_gens), p)


def ideal_product(i_gens: list[Vec], j_gens: list[Vec], p: int, q: int) -> list[Vec]:
    out = []
    for f in i_gens:
        for g in j_gens:
            prod: Vec = {}
            for (_, e1), c1 in f.items():
                for (_, e2), c2 in g.items():
                    t = (0, tuple(a + b for a, b in zip(e1, e2)))
                    prod[t] = (prod.get(t, 0) + c1 * c2) % p
            prod = {k: v for k, v in prod.items() if v}
            if prod:
                out.append(prod)
    if not out:
        return []
    return ideal_gb(out, p)


def radical_member(f: Vec, i_gens: list[Vec], p: int, q: int) -> bool:
    """f in rad(I), by the extra-variable membership trick."""
    if not f:
        return True

    def lift(vec: Vec) -> Vec:
        return {(0, e + (0,)): c for (_, e), c in vec.items()}

    gens = [lift(g) for g in i_gens]
    one_minus_yf: Vec = {(0, (0,) * (q + 1)): 1}
    for (_, e), c in f.items():
        t = (0, e + (1,))
        one_minus_yf[t] = (one_minus_yf.get(t, 0) - c) % p
    gens.append({k: v for k, v in one_minus_yf.items() if v})
    gb = buchberger(gens, p)
    return gb == [{(0, (0,) * (q + 1)): 1}]


def radical_equal(i_gens: list[Vec], j_gens: list[Vec], p: int, q: int) -> bool:
    return all(radical_member(g, i_gens, p, q) for g in j_gens) and all(
        radical_member(g, j_gens, p, q) for g in i_gens
    )


# ---------------------------------------------------------------------------
# dimension theory of monomial data
# ---------------------------------------------------------------------------


def monomial_dimension(lead_exps: list[tuple[int, ...]], q: int) -> int:
    """Krull dimension of R/L for the monomial ideal with the given generators.

    -1 when L contains a constant.  Otherwise the largest size of a
    variable subset S such that no generator is supported inside S.
    """
    if any(all(x == 0 for x in e) for e in lead_exps):
        return -1
    supports = [frozenset(i for i, x in enumerate(e) if x) for e in lead_exps]
    best = -10
    for size in range(q, -1, -1):
        for subset in combinations(range(q), size):
            sset = frozenset(subset)
            if all(not sup <= sset for sup in supports):
                return size
    return best


def ideal_dimension(i_gens: list[Vec], p: int, q: int, mkey=grevlex_key) -> int:
    """dim R/I via the initial ideal of a reduced basis; dim R = q for I = 0."""
    gb = ideal_gb([g for g in i_gens if g], p, mkey)
    if not gb:
        return q
    leads = [lead(g, ModuleOrder(mkey))[1] for g in gb]
    return monomial_dimension(leads, q)


def standard_monomial_counts(rel_gb: list[Vec], t: int, q: int, max_degree: int, p: int) -> tuple[int, ...]:
    """Count monomial-position pairs of each total degree not under a lead term.

    With a degree-compatible order these counts are the dimensions of the
    degree filtration of R^t modulo the span, through ``max_degree``.
    """
    order = ModuleOrder()
    leads_by_pos: dict[int, list[tuple[int, ...]]] = {}
    for g in rel_gb:
        pos, e = lead(g, order)
        leads_by_pos.setdefault(pos, []).append(e)
    counts = [0] * (max_degree + 1)

    def monomials(up_to: int):
        # every exponent vector with total degree <= up_to, exactly once
        def rec(prefix, remaining, slots):
            if slots == 0:
                yield prefix
                return
            for k in range(remaining + 1):
                yield from rec(prefix + (k,), remaining - k, slots - 1)

        yield from rec((), up_to, q)

    for pos in range(t):
        leads = leads_by_pos.get(pos, [])
        for e in monomials(max_degree):
            if not any(all(x >= y for x, y in zip(e, le)) for le in leads):
                counts[sum(e)] += 1
    return tuple(counts)


def poly_determinant(rows: list[list[Vec]], p: int) -> Vec:
    """Exact determinant of a square matrix of polynomials (Laplace, memoized)."""
    n = len(rows)
    if n == 0:
        return {(0, ()): 1}
    q = None
    for row in rows:
        for x in row:
            for (_, e) in x:
                q = len(e)
                break
            if q is not None:
                break
        if q is not None:
            break
    cache: dict[tuple, Vec] = {}

    def poly_mul(a: Vec, b: Vec) -> Vec:
        out: Vec = {}
        for (_, e1), c1 in a.items():
            for (_, e2), c2 in b.items():
                t = (0, tuple(x + y for x, y in zip(e1, e2)))
                out[t] = (out.get(t, 0) + c1 * c2) % p
        return {k: v for k, v in out.items() if v}

    def poly_addsub(a: Vec, b: Vec, sign: int) -> Vec:
        out = dict(a)
        for t, c in b.items():
            acc = (out.get(t, 0) + sign * c) % p
            if acc:
                out[t] = acc
            else:
                out.pop(t, None)
        return out

    def rec(row_start: int, cols: tuple[int, ...]) -> Vec:
        if not cols:
            return {(0, (0,) * (q or 0)): 1}
        key = (row_start, cols)
        if key in cache:
            return cache[key]
        acc: Vec = {}
        for k, j in enumerate(cols):
            x = rows[row_start][j]
            if not x:
                continue
            sub = rec(row_start + 1, cols[:k] + cols[k + 1 :])
            term = poly_mul(x, sub)
            acc = poly_addsub(acc, term, 1 if k % 2 == 0 else -1)
        cache[key] = acc
        return acc

    return rec(0, tuple(range(n)))
