"""Tower validation, limit assembly, and freeness certification.

A patching tower bundles, per level n: a complex over the level-n
truncated tower ring, structure-map images into a truncated
power-series model, action matrices on cohomology, and a witness
identifying the top cohomology modulo the variable ideal with a fixed
base module.  The engine checks the tower hypotheses, selects a chain
of levels whose minimized differentials reduce onto one another,
assembles the limit differentials at a requested precision, and runs
the freeness checks on the limit (rank concentration, the
height-amplitude verdict of the mod-p fiber, projective dimension and
depth bookkeeping, base comparison, and the quotient-ring cardinality
match).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations, product

import numpy as np

from .complexes import (
    FiniteModulePresentation,
    FreeComplex,
    cohomology,
    minimize,
    tau_profile,
    tensor_along,
)
from .errors import (
    ActionMismatch,
    AugmentationNotKilled,
    BaseMismatch,
    ConcentrationFailed,
    HeightAmplitudeViolated,
    InsufficientTower,
    InvalidParameter,
    NoCompatibleChain,
    SpecMismatch,
    SurjectionNotIso,
    TauNotConstant,
    TauOutOfRange,
)
from .graded import verify_height_amplitude
from .linalg import HowellCore, Matrix, elementary_divisors
from .rings import (
    RingSpec,
    RingTowerElement,
    augmentation_map,
    graded_ring,
    make_patch_ring,
    reduction_map,
)

Exps = tuple[int, ...]
RinfElem = dict[Exps, int]


# ---------------------------------------------------------------------------
# the truncated power-series model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RInfinityModel:
    """(Z/p^m)[x_1..x_g] truncated past total degree ``degree``.

    A finite local ring with maximal ideal (p, x_1..x_g); elements are
    exponent->residue maps in canonical form.
    """

    p: int
    m: int
    g: int
    degree: int

    def __post_init__(self):
        if self.degree < 1:
            raise InvalidParameter("truncation degree must be >= 1")

    @property
    def modulus(self) -> int:
        return self.p**self.m

    def basis(self) -> list[Exps]:
        out = [()]
        for _ in range(self.g):
            out = [e + (k,) for e in out for k in range(self.degree + 1)]
        return sorted(e for e in out if sum(e) <= self.degree)

    def normalize(self, coeffs) -> RinfElem:
        N = self.modulus
        out: RinfElem = {}
        for e, c in coeffs.items():
            e = tuple(int(x) for x in e)
            if len(e) != self.g:
                raise SpecMismatch(f"exponent vector {e} has wrong length for g={self.g}")
            if sum(e) > self.degree:
                continue
            c = int(c) % N
            if c:
                out[e] = c
        return out

    def zero(self) -> RinfElem:
        return {}

    def one(self) -> RinfElem:
        return {(0,) * self.g: 1}

    def variable(self, j: int) -> RinfElem:
        if not 0 <= j < self.g:
            raise InvalidParameter(f"variable index {j} out of range for g={self.g}")
        return {tuple(1 if i == j else 0 for i in range(self.g)): 1}

    def add(self, a: RinfElem, b: RinfElem) -> RinfElem:
        out = dict(a)
        N = self.modulus
        for e, c in b.items():
            acc = (out.get(e, 0) + c) % N
            if acc:
                out[e] = acc
            else:
                out.pop(e, None)
        return out

    def mul(self, a: RinfElem, b: RinfElem) -> RinfElem:
        out: dict[Exps, int] = {}
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                if sum(e) > self.degree:
                    continue
                out[e] = out.get(e, 0) + c1 * c2
        return self.normalize(out)

    def scale(self, a: RinfElem, c: int) -> RinfElem:
        return self.normalize({e: v * c for e, v in a.items()})

    def power(self, a: RinfElem, k: int) -> RinfElem:
        out = self.one()
        base = dict(a)
        while k:
            if k & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            k >>= 1
        return out

    def reduce_precision(self, a: RinfElem, m2: int) -> RinfElem:
        N2 = self.p**m2
        return {e: c % N2 for e, c in a.items() if c % N2}

    def coords(self, a: RinfElem, index: dict[Exps, int]) -> np.ndarray:
        v = np.zeros(len(index), dtype=np.int64)
        for e, c in a.items():
            v[index[e]] = c
        return v

    def evaluate_at_matrices(self, a: RinfElem, mats: list[np.ndarray], size: int, modulus: int) -> np.ndarray:
        """Value of the polynomial on commuting matrices, mod ``modulus``."""
        out = np.zeros((size, size), dtype=np.int64)
        eye = np.eye(size, dtype=np.int64)
        powers: list[dict[int, np.ndarray]] = [dict() for _ in range(self.g)]

        def mat_pow(j: int, k: int) -> np.ndarray:
            if k == 0:
                return eye
            cache = powers[j]
            if k not in cache:
                cache[k] = (mat_pow(j, k - 1) @ mats[j]) % modulus
            return cache[k]

        for e, c in a.items():
            term = (c % modulus) * eye
            for j, k in enumerate(e):
                if k:
                    term = (term @ mat_pow(j, k)) % modulus
            out = (out + term) % modulus
        return out % modulus


class TruncatedQuotient:
    """The model modulo an ideal, with canonical representatives.

    The ideal's underlying Z/p^m-span is closed under multiplication by
    monomials, so a Howell form of that span reduces every element to a
    canonical representative and counts the quotient.
    """

    def __init__(self, model: RInfinityModel, ideal_gens: list[RinfElem]):
        self.model = model
        self.basis = model.basis()
        self.index = {e: k for k, e in enumerate(self.basis)}
        rows = []
        for gen in ideal_gens:
            gen = model.normalize(gen)
            if not gen:
                continue
            for mono in self.basis:
                prod = model.mul(gen, {mono: 1})
                if prod:
                    rows.append(model.coords(prod, self.index))
        arr = np.array(rows, dtype=np.int64) if rows else np.zeros((0, len(self.basis)), dtype=np.int64)
        self.core = HowellCore(arr, model.p, model.m, carry=False) if arr.size else None

    def reduce(self, a: RinfElem) -> RinfElem:
        v = self.model.coords(self.model.normalize(a), self.index)
        if self.core is not None:
            v = self.core.reduce(v)
        return {self.basis[k]: int(v[k]) for k in np.nonzero(v)[0]}

    def is_zero(self, a: RinfElem) -> bool:
        return not self.reduce(a)

    def cardinality(self) -> int:
        total = self.model.m * len(self.basis)
        spanned = self.core.span_log_size() if self.core is not None else 0
        return self.model.p ** (total - spanned)


# ---------------------------------------------------------------------------
# finite module data for the base and witness comparisons
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FiniteModuleData:
    """A finite Z/p^m-module with commuting action matrices on its generators."""

    p: int
    m: int
    gens: int
    relations: np.ndarray  # gens x s, columns are relations
    actions: tuple[np.ndarray, ...] = ()

    @property
    def modulus(self) -> int:
        return self.p**self.m

    def divisors(self) -> tuple[int, ...]:
        return elementary_divisors(self.relations, self.gens, self.p, self.m)

    def cardinality(self) -> int:
        out = 1
        for d in self.divisors():
            out *= int(d)
        return out

    def at_precision(self, m2: int) -> "FiniteModuleData":
        N2 = self.p**m2
        return FiniteModuleData(
            self.p,
            m2,
            self.gens,
            self.relations % N2,
            tuple(a % N2 for a in self.actions),
        )

    def relation_core(self) -> HowellCore | None:
        if self.relations.size == 0:
            return None
        return HowellCore(self.relations.T % self.modulus, self.p, self.m, carry=False)

    def column_in_relations(self, col: np.ndarray, core: HowellCore | None = None) -> bool:
        core = core or self.relation_core()
        if core is None:
            return not (np.asarray(col) % self.modulus).any()
        return not core.reduce(np.asarray(col) % self.modulus).any()

    def matrices_equal(self, a: np.ndarray, b: np.ndarray) -> bool:
        core = self.relation_core()
        diff = (np.asarray(a) - np.asarray(b)) % self.modulus
        return all(self.column_in_relations(diff[:, l], core) for l in range(diff.shape[1]))

    def quotient_by_columns(self, extra_cols: list[np.ndarray]) -> "FiniteModuleData":
        blocks = [self.relations] + [np.asarray(c, dtype=np.int64) for c in extra_cols]
        blocks = [b for b in blocks if b.size]
        rel = np.hstack(blocks) if blocks else np.zeros((self.gens, 0), dtype=np.int64)
        return FiniteModuleData(self.p, self.m, self.gens, rel % self.modulus, self.actions)


def presentation_to_data(pres: FiniteModulePresentation, actions: tuple[np.ndarray, ...] = ()) -> FiniteModuleData:
    return FiniteModuleData(
        pres.spec.p, pres.spec.m, pres.num_generators, pres.relations, actions
    )


# ---------------------------------------------------------------------------
# tower data
# ---------------------------------------------------------------------------


@dataclass
class TowerLevel:
    level: int
    precision: int
    complex: FreeComplex
    i_images: list[RinfElem]
    phi_images: list[RinfElem]
    x_actions: dict[int, list[np.ndarray]]
    base_iso: np.ndarray


@dataclass
class TowerBase:
    ideal: list[RinfElem]
    module: FiniteModuleData


@dataclass
class PatchingTower:
    p: int
    q: int
    r: int
    d: int
    rinf_degree: int
    base_precision: int
    base: TowerBase
    levels: list[TowerLevel]

    @property
    def g(self) -> int:
        return self.q - self.r

    def model(self, m: int | None = None) -> RInfinityModel:
        return RInfinityModel(self.p, m or self.base_precision, self.g, self.rinf_degree)

    @property
    def degree_window(self) -> tuple[int, int]:
        return (self.d - self.r, self.d)


@dataclass
class ValidationReport:
    ok: bool
    taus: dict[int, dict[int, int]]
    failures: list[dict] = field(default_factory=list)

    def first_error(self):
        if not self.failures:
            return None
        f = self.failures[0]
        return f["error"](f["detail"])


_ERROR_BY_NAME = {
    "TauOutOfRange": TauOutOfRange,
    "TauNotConstant": TauNotConstant,
    "ActionMismatch": ActionMismatch,
    "AugmentationNotKilled": AugmentationNotKilled,
    "BaseMismatch": BaseMismatch,
}


def _level_cohomology(lev: TowerLevel) -> dict[int, FiniteModulePresentation]:
    return {dd: cohomology(lev.complex, dd) for dd in lev.complex.degrees}


def validate_hypotheses(tower: PatchingTower) -> ValidationReport:
    """Check the three tower hypotheses level by level.

    Order is fixed so each constructed violation reports its designated
    error: degree window, then constancy of the rank profile, then
    action compatibility, then the augmentation kill, then the base
    witness.
    """
    failures: list[dict] = []
    lo, hi = tower.degree_window

    def fail(level: int, hypothesis: str, error: str, detail: str):
        failures.append(
            {
                "level": level,
                "hypothesis": hypothesis,
                "error": _ERROR_BY_NAME[error],
                "error_name": error,
                "detail": detail,
            }
        )

    taus = {}
    for lev in tower.levels:
        prof = tau_profile(lev.complex)
        taus[lev.level] = dict(prof.taus)
        if not prof.supported_in(lo, hi):
            fail(
                lev.level,
                "i",
                "TauOutOfRange",
                f"level {lev.level} has rank profile {prof.taus} outside [{lo},{hi}]",
            )
    if not failures:
        ref = None
        for lev in tower.levels:
            if ref is None:
                ref = taus[lev.level]
            elif taus[lev.level] != ref:
                fail(
                    lev.level,
                    "i",
                    "TauNotConstant",
                    f"level {lev.level} profile {taus[lev.level]} differs from {ref}",
                )
                break

    if failures:
        return ValidationReport(False, taus, failures)

    model = tower.model()
    g = tower.g
    quotient = TruncatedQuotient(model, tower.base.ideal)

    for lev in tower.levels:
        mods = _level_cohomology(lev)
        bad_action = None
        for dd, pres in mods.items():
            size = pres.num_generators
            if size == 0:
                continue
            xs = lev.x_actions.get(dd)
            if g and (xs is None or len(xs) != g):
                bad_action = f"level {lev.level} degree {dd}: missing action matrices"
                break
            xs = [np.asarray(x, dtype=np.int64) for x in (xs or [])]
            if any(x.shape != (size, size) for x in xs):
                bad_action = f"level {lev.level} degree {dd}: action matrix shape mismatch"
                break
            data = presentation_to_data(pres)
            core = data.relation_core()
            ok = True
            for x in xs:
                prod = (x @ pres.relations) % data.modulus if pres.relations.size else np.zeros((size, 0))
                for l in range(prod.shape[1]):
                    if not data.column_in_relations(prod[:, l], core):
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                bad_action = f"level {lev.level} degree {dd}: action does not preserve relations"
                break
            pairs_ok = all(
                data.matrices_equal((xa @ xb) % data.modulus, (xb @ xa) % data.modulus)
                for i, xa in enumerate(xs)
                for xb in xs[i + 1 :]
            ) and all(
                data.matrices_equal((xa @ tb) % data.modulus, (tb @ xa) % data.modulus)
                for xa in xs
                for tb in pres.actions
            )
            if not pairs_ok:
                bad_action = f"level {lev.level} degree {dd}: action matrices do not commute"
                break
            for j in range(tower.q):
                claimed = model.evaluate_at_matrices(
                    lev.i_images[j], xs, size, tower.p**lev.precision
                )
                if not data.matrices_equal(claimed, pres.actions[j]):
                    bad_action = (
                        f"level {lev.level} degree {dd}: variable {j+1} acts differently "
                        "from its structure-map image"
                    )
                    break
            if bad_action:
                break
        if bad_action:
            fail(lev.level, "ii", "ActionMismatch", bad_action)
            continue

        killed = True
        for j in range(tower.q):
            img = _apply_phi(model, lev.phi_images, lev.i_images[j])
            if not quotient.is_zero(img):
                fail(
                    lev.level,
                    "ii",
                    "AugmentationNotKilled",
                    f"level {lev.level}: variable {j+1} image survives in the base quotient",
                )
                killed = False
                break
        if not killed:
            continue

        err = _check_base_witness(tower, lev, mods)
        if err:
            fail(lev.level, "iii", "BaseMismatch", err)

    return ValidationReport(not failures, taus, failures)


def _apply_phi(model: RInfinityModel, phi_images: list[RinfElem], elem: RinfElem) -> RinfElem:
    """Substitute the x-variables by their images under the base quotient map."""
    out = model.zero()
    for e, c in elem.items():
        term = {(0,) * model.g: c}
        for j, k in enumerate(e):
            if k:
                term = model.mul(term, model.power(phi_images[j], k))
        out = model.add(out, term)
    return out


def _check_base_witness(tower: PatchingTower, lev: TowerLevel, mods) -> str | None:
    d = tower.d
    pres = mods.get(d)
    if pres is None:
        return f"level {lev.level} has no top-degree term"
    size = pres.num_generators
    g = tower.g
    xs = [np.asarray(x, dtype=np.int64) for x in (lev.x_actions.get(d) or [])]
    n_mod = tower.p**lev.precision

    # top cohomology modulo the variable ideal, with its x-actions
    aug_cols = [np.asarray(a, dtype=np.int64) for a in pres.actions]
    quot = presentation_to_data(pres, tuple(xs)).quotient_by_columns(aug_cols)
    target = tower.base.module.at_precision(lev.precision)

    w = np.asarray(lev.base_iso, dtype=np.int64) % n_mod
    if w.shape != (target.gens, size):
        return f"level {lev.level}: witness matrix has shape {w.shape}, expected {(target.gens, size)}"
    tcore = target.relation_core()
    # well-defined: witness kills the source relations
    if quot.relations.size:
        mapped = (w @ quot.relations) % n_mod
        for l in range(mapped.shape[1]):
            if not target.column_in_relations(mapped[:, l], tcore):
                return f"level {lev.level}: witness does not kill a source relation"
    # surjective and bijective at this precision
    span_rows = [target.relations.T] if target.relations.size else []
    span_rows.append(w.T)
    stacked = np.vstack(span_rows) if span_rows else np.zeros((0, target.gens), dtype=np.int64)
    core = HowellCore(stacked, tower.p, lev.precision, carry=False)
    if core.span_log_size() != lev.precision * target.gens:
        return f"level {lev.level}: witness is not surjective onto the base module"
    if quot.cardinality() != target.cardinality():
        return (
            f"level {lev.level}: source has cardinality {quot.cardinality()}, "
            f"base has {target.cardinality()}"
        )
    # equivariance for the power-series variables
    for j in range(g):
        left = (w @ xs[j]) % n_mod if xs else None
        right = (target.actions[j] @ w) % n_mod
        diff = (left - right) % n_mod
        for l in range(diff.shape[1]):
            if not target.column_in_relations(diff[:, l], tcore):
                return f"level {lev.level}: witness is not equivariant for x_{j+1}"
    return None


def ensure_valid(tower: PatchingTower) -> ValidationReport:
    report = validate_hypotheses(tower)
    if not report.ok:
        raise report.first_error()
    return report


# ---------------------------------------------------------------------------
# chain selection and the limit
# ---------------------------------------------------------------------------


@dataclass
class PatchLimit:
    precision: int
    complex: FreeComplex
    i_images: list[RinfElem]
    phi_images: list[RinfElem]
    chain: list[int]
    used_basis_change: bool


def _reduced_complex(minimized: FreeComplex, p: int, q: int, k: int) -> FreeComplex:
    target = make_patch_ring(p, k, k, q)
    return tensor_along(minimized, reduction_map(minimized.spec, target))


def _maps_stabilized(tower: PatchingTower, ja: TowerLevel, jb: TowerLevel, k: int) -> bool:
    model = tower.model()
    for a, b in zip(ja.i_images, jb.i_images):
        if model.reduce_precision(a, k) != model.reduce_precision(b, k):
            return False
    for a, b in zip(ja.phi_images, jb.phi_images):
        if model.reduce_precision(a, k) != model.reduce_precision(b, k):
            return False
    return True


def _signed_permutation_matrices(spec: RingSpec, size: int):
    one = RingTowerElement.one(spec)
    zero = RingTowerElement.zero(spec)
    minus = -one
    for perm in permutations(range(size)):
        for signs in product((one, minus), repeat=size):
            ent = [[zero] * size for _ in range(size)]
            inv = [[zero] * size for _ in range(size)]
            for i, (j, s) in enumerate(zip(perm, signs)):
                ent[i][j] = s
                inv[j][i] = s if s == one else minus
            yield Matrix(spec, ent), Matrix(spec, inv)


def _transform_complex(c: FreeComplex, changes: dict[int, tuple[Matrix, Matrix]]) -> FreeComplex:
    diffs = []
    for idx, d in enumerate(c.diffs):
        deg = c.lo + idx
        p_next = changes.get(deg + 1)
        p_cur = changes.get(deg)
        out = d
        if p_next is not None:
            out = p_next[0] @ out
        if p_cur is not None:
            out = out @ p_cur[1]
        diffs.append(out)
    return FreeComplex(c.spec, c.lo, c.ranks, diffs, _checked=True)


def _rebase_onto(
    base_k: FreeComplex, cand: FreeComplex, p: int, q: int, k: int, budget: int
) -> FreeComplex | None:
    """Search per-degree signed permutations of ``cand`` whose reduction
    to level/precision k equals ``base_k``; return the rebased complex."""
    red = _reduced_complex(cand, p, q, k)
    if red.ranks != base_k.ranks or red.lo != base_k.lo:
        return None
    rmap = reduction_map(cand.spec, base_k.spec)
    degrees = list(cand.degrees)
    changes: dict[int, tuple[Matrix, Matrix]] = {}
    attempts = 0

    def rec(idx: int) -> bool:
        nonlocal attempts
        if idx == len(degrees):
            return True
        deg = degrees[idx]
        size = cand.rank(deg)
        for pair in _signed_permutation_matrices(cand.spec, size):
            attempts += 1
            if attempts > budget:
                return False
            changes[deg] = pair
            ok = True
            if idx > 0:
                prev = degrees[idx - 1]
                got = pair[0] @ cand.differential(prev) @ changes[prev][1]
                ok = got.apply_map(rmap) == base_k.differential(prev)
            if ok and rec(idx + 1):
                return True
        changes.pop(deg, None)
        return False

    if not rec(0):
        return None
    return _transform_complex(cand, dict(changes))


def patch(tower: PatchingTower, precision: int, basis_change_budget: int = 20000) -> PatchLimit:
    """Select a compatible chain of levels and assemble the limit.

    Minimizes every level, reduces along the tower maps, and looks for
    strictly increasing levels whose reductions agree exactly at each
    precision step; a bounded search over per-degree signed basis
    changes is the fallback.  Raises InsufficientTower when the level
    supply cannot cover the requested precision and NoCompatibleChain
    when the searches are exhausted.
    """
    ensure_valid(tower)
    if precision < 1:
        raise InvalidParameter("precision must be >= 1")
    if len(tower.levels) < 2:
        raise InsufficientTower("need at least two levels")
    p, q = tower.p, tower.q
    levels = tower.levels
    eligible = [
        [
            idx
            for idx, lev in enumerate(levels)
            if lev.level >= k and lev.precision >= k
        ]
        for k in range(1, precision + 1)
    ]
    if any(not e for e in eligible):
        raise InsufficientTower(
            f"no level covers every precision step up to {precision}"
        )

    minimized = [minimize(lev.complex) for lev in levels]
    cache: dict[tuple[int, int], FreeComplex] = {}

    def reduced(idx: int, k: int) -> FreeComplex:
        key = (idx, k)
        if key not in cache:
            cache[key] = _reduced_complex(minimized[idx], p, q, k)
        return cache[key]

    def chains():
        def rec(prefix: list[int], k: int):
            if k > precision:
                yield list(prefix)
                return
            for idx in eligible[k - 1]:
                if prefix and idx <= prefix[-1]:
                    continue
                yield from rec(prefix + [idx], k + 1)

        yield from rec([], 1)

    def chain_exact(chain: list[int]) -> bool:
        for k in range(1, precision):
            if reduced(chain[k - 1], k) != reduced(chain[k], k):
                return False
            if not _maps_stabilized(tower, levels[chain[k - 1]], levels[chain[k]], k):
                return False
        return True

    chosen = None
    for chain in chains():
        if chain_exact(chain):
            chosen = chain
            break

    used_basis_change = False
    transformed_top: FreeComplex | None = None
    if chosen is None:
        for chain in chains():
            if not all(
                _maps_stabilized(tower, levels[chain[k - 1]], levels[chain[k]], k)
                for k in range(1, precision)
            ):
                continue
            # anchor at the first level; rebase each later level onto it
            ok = True
            fixed = reduced(chain[0], 1)
            top = fixed
            for k in range(1, precision):
                rebased = _rebase_onto(
                    fixed, reduced(chain[k], k + 1), p, q, k, basis_change_budget
                )
                if rebased is None:
                    ok = False
                    break
                top = rebased
                fixed = rebased
            if ok:
                chosen = chain
                used_basis_change = True
                transformed_top = top
                break
    if chosen is None:
        raise NoCompatibleChain(
            "no chain of levels reduces compatibly within the basis-change budget"
        )

    top_level = levels[chosen[-1]]
    limit_complex = transformed_top if transformed_top is not None else reduced(chosen[-1], precision)
    return PatchLimit(
        precision=precision,
        complex=limit_complex,
        i_images=[dict(x) for x in top_level.i_images],
        phi_images=[dict(x) for x in top_level.phi_images],
        chain=[levels[i].level for i in chosen],
        used_basis_change=used_basis_change,
    )


# ---------------------------------------------------------------------------
# certification
# ---------------------------------------------------------------------------


@dataclass
class FreenessCertificate:
    precision: int
    rank: int
    checks: dict[str, bool]
    tau: dict[int, int]
    chain: list[int]
    limit: PatchLimit
    reductions: dict[int, FreeComplex]
    fiber_report: object
    ha_obj: dict

    @property
    def valid(self) -> bool:
        return all(self.checks.values())


def _fiber_complex(limit: FreeComplex, q: int) -> FreeComplex:
    """The mod-p polynomial model of the limit differentials."""
    spec = limit.spec
    target = graded_ring(spec.p, q)

    def to_poly(x: RingTowerElement) -> RingTowerElement:
        return RingTowerElement(target, {e: c % spec.p for e, c in x.coeffs.items()})

    diffs = [d.map_entries(to_poly, target) for d in limit.diffs]
    return FreeComplex(target, limit.lo, limit.ranks, diffs)


def certify(tower: PatchingTower, limit: PatchLimit) -> FreenessCertificate:
    """Run the freeness checks on a patched limit.

    Raises the designated violation as soon as a check fails; on
    success returns the certificate with every check recorded.
    """
    p, q, r, d = tower.p, tower.q, tower.r, tower.d
    precision = limit.precision
    if precision > tower.base_precision:
        raise InvalidParameter(
            "certification precision exceeds the recorded base precision"
        )
    lo, hi = tower.degree_window
    checks: dict[str, bool] = {}

    prof = tau_profile(limit.complex)
    checks["tau_concentrated"] = prof.supported_in(lo, hi) and not prof.is_zero()
    if not checks["tau_concentrated"]:
        raise ConcentrationFailed(
            f"limit rank profile {prof.taus} is not concentrated in [{lo},{hi}]"
        )

    fiber = _fiber_complex(limit.complex, q)
    report = verify_height_amplitude(fiber)
    heights = set(report.height_profile)
    if heights != {r}:
        raise HeightAmplitudeViolated(
            f"fiber support heights {sorted(heights)} differ from the budget {{{r}}}"
        )
    checks["fiber_vanishing_below_top"] = (
        report.part_iii["applicable"]
        and report.part_iii["lower_vanishing"]
        and report.part_iii["top_perfect"]
    )
    if not checks["fiber_vanishing_below_top"]:
        raise HeightAmplitudeViolated("fiber cohomology survives below the top degree")

    from .graded import complex_cohomology_module, module_invariants

    top_module = complex_cohomology_module(fiber, max(dd for dd in fiber.degrees if fiber.rank(dd)))
    inv = module_invariants(top_module)
    checks["projdim_eq_r"] = inv["projdim"] == r
    checks["depth_eq_budget"] = inv["depth"] == q - r
    if not checks["projdim_eq_r"] or not checks["depth_eq_budget"]:
        raise HeightAmplitudeViolated(
            f"fiber top module has projdim {inv['projdim']} and depth {inv['depth']}, "
            f"expected {r} and {q - r}"
        )

    # rank over the limit ring model, read off the base module
    base = tower.base.module.at_precision(precision)
    g = tower.g
    scale_cols = [p * np.eye(base.gens, dtype=np.int64)]
    for j in range(g):
        scale_cols.append(np.asarray(base.actions[j], dtype=np.int64))
    residue = base.quotient_by_columns(scale_cols)
    divisors = residue.divisors()
    if any(dv != p for dv in divisors):
        raise BaseMismatch("base module modulo (p, x) is not an F_p-space")
    rank = len(divisors)

    # base comparison: top cohomology of the limit with all variables killed
    coeff_cx = tensor_along(limit.complex, augmentation_map(limit.complex.spec, precision))
    top_pres = cohomology(coeff_cx, d)
    model = tower.model(precision)
    quotient = TruncatedQuotient(model, tower.base.ideal)
    base_div = base.divisors()
    got_div = top_pres.divisors
    checks["base_iso"] = got_div == base_div and top_pres.cardinality == quotient.cardinality() ** rank
    if not checks["base_iso"]:
        raise BaseMismatch(
            f"limit base fiber has divisors {got_div}, base module has {base_div}"
        )

    ideal_quot = TruncatedQuotient(model, [dict(x) for x in limit.i_images])
    contained = all(quotient.is_zero(img) for img in limit.i_images)
    kills = True
    if base.gens:
        bcore = base.relation_core()
        for img in limit.i_images:
            acted = model.evaluate_at_matrices(
                img, [np.asarray(a) for a in base.actions], base.gens, base.modulus
            )
            for l in range(base.gens):
                if not base.column_in_relations(acted[:, l], bcore):
                    kills = False
                    break
            if not kills:
                break
    checks["surjection_iso"] = (
        contained and kills and ideal_quot.cardinality() == quotient.cardinality()
    )
    if not checks["surjection_iso"]:
        raise SurjectionNotIso(
            f"model modulo structure-map images has cardinality {ideal_quot.cardinality()}, "
            f"base ring has {quotient.cardinality()}"
        )

    reductions = {
        k: _reduced_complex(limit.complex, p, q, k) for k in range(1, precision + 1)
    }
    return FreenessCertificate(
        precision=precision,
        rank=rank,
        checks=checks,
        tau=dict(prof.taus),
        chain=list(limit.chain),
        limit=limit,
        reductions=reductions,
        fiber_report=report,
        ha_obj=report.to_obj(),
    )
