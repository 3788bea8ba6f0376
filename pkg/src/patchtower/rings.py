"""Coefficient rings, truncated tower rings, and graded polynomial rings.

Three ring kinds share one element representation (a finite map from
exponent vectors to residues):

* ``coefficient`` -- Z/p^m, no variables.
* ``patch`` -- (Z/p^m)[T_1..T_q] modulo the relations (1+T_i)^(p^n) - 1,
  a finite local ring with monomial basis {T^a : 0 <= a_i < p^n}.
* ``graded`` -- F_p[T_1..T_q], the graded polynomial model of a local
  ring (unit test: nonzero constant term).

All values are immutable and in canonical normal form, so equality is
dictionary equality and serialization is bit-stable.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb

from .errors import (
    InvalidParameter,
    NonPrime,
    NotAReduction,
    NotAUnit,
    SpecMismatch,
    UnsupportedRing,
)

KINDS = ("coefficient", "patch", "graded")


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class RingSpec:
    """Identifies one ring of the family: prime, precision, level, variables, kind."""

    p: int
    m: int
    n: int
    q: int
    kind: str

    @property
    def modulus(self) -> int:
        return self.p**self.m

    @property
    def exponent_bound(self) -> int | None:
        """Strict bound on each exponent, or None for the graded ring."""
        if self.kind == "patch":
            return self.p**self.n
        if self.kind == "coefficient":
            return 1
        return None

    @property
    def coefficient_rank(self) -> int:
        """Rank of the ring as a free Z/p^m-module (patch and coefficient kinds)."""
        if self.kind == "graded":
            raise UnsupportedRing("graded rings are not finite over Z/p^m")
        return self.p ** (self.n * self.q)

    def monomial_basis(self) -> list[tuple[int, ...]]:
        """Exponent vectors of the monomial basis, sorted lexicographically."""
        bound = self.exponent_bound
        if bound is None:
            raise UnsupportedRing("graded rings have no finite monomial basis")
        basis = [()]
        for _ in range(self.q):
            basis = [e + (k,) for e in basis for k in range(bound)]
        return sorted(basis)


def coefficient_ring(p: int, m: int) -> RingSpec:
    _check_pm(p, m)
    return RingSpec(p, m, 0, 0, "coefficient")


def make_patch_ring(p: int, m: int, n: int, q: int) -> RingSpec:
    """Build the level-n truncated tower ring in q variables at precision m.

    The reduction rule rewrites T_i^(p^n) through the expanded relation
    (1+T_i)^(p^n) - 1 = 0, so normal forms are supported on exponents
    below p^n.  With q = 0 this degenerates to the coefficient ring.
    """
    _check_pm(p, m)
    if n < 1:
        raise InvalidParameter(f"tower level must be >= 1, got {n}")
    if q < 0:
        raise InvalidParameter(f"variable count must be >= 0, got {q}")
    if q == 0:
        return coefficient_ring(p, m)
    return RingSpec(p, m, n, q, "patch")


def graded_ring(p: int, q: int) -> RingSpec:
    _check_pm(p, 1)
    if q < 0:
        raise InvalidParameter(f"variable count must be >= 0, got {q}")
    return RingSpec(p, 1, 0, q, "graded")


def _check_pm(p: int, m: int) -> None:
    if not is_prime(p):
        raise NonPrime(f"{p} is not prime")
    if m < 1:
        raise InvalidParameter(f"precision must be >= 1, got {m}")


@lru_cache(maxsize=None)
def _rewrite_rule(p: int, m: int, n: int) -> tuple[tuple[int, int], ...]:
    # T^(p^n) = -sum_{0<k<p^n} C(p^n, k) T^k  (mod p^m)
    pn = p**n
    N = p**m
    rule = []
    for k in range(1, pn):
        c = (-comb(pn, k)) % N
        if c:
            rule.append((k, c))
    return tuple(rule)


def _normalize(spec: RingSpec, coeffs) -> dict[tuple[int, ...], int]:
    N = spec.modulus
    q = spec.q
    bound = spec.exponent_bound
    out: dict[tuple[int, ...], int] = {}
    stack = [(tuple(e), int(c)) for e, c in coeffs.items()]
    while stack:
        exps, c = stack.pop()
        if len(exps) != q:
            raise SpecMismatch(f"exponent vector {exps} has wrong length for q={q}")
        c %= N
        if c == 0:
            continue
        if any(e < 0 for e in exps):
            raise SpecMismatch(f"negative exponent in {exps}")
        if spec.kind == "patch":
            over = next((i for i, e in enumerate(exps) if e >= bound), None)
            if over is not None:
                base = list(exps)
                base[over] -= bound
                for k, ck in _rewrite_rule(spec.p, spec.m, spec.n):
                    e2 = list(base)
                    e2[over] += k
                    stack.append((tuple(e2), c * ck))
                continue
        acc = (out.get(exps, 0) + c) % N
        if acc:
            out[exps] = acc
        else:
            out.pop(exps, None)
    return out


class RingTowerElement:
    """A ring element in canonical normal form.

    ``coeffs`` maps exponent vectors (length q, entries below the bound
    for patch rings) to residues in [1, p^m).  Two elements are equal
    exactly when spec and stored map coincide.
    """

    __slots__ = ("spec", "coeffs")

    def __init__(self, spec: RingSpec, coeffs, *, _normalized: bool = False):
        object.__setattr__(self, "spec", spec)
        if not _normalized:
            coeffs = _normalize(spec, coeffs)
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, *_):
        raise AttributeError("RingTowerElement is immutable")

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, spec: RingSpec) -> "RingTowerElement":
        return cls(spec, {}, _normalized=True)

    @classmethod
    def one(cls, spec: RingSpec) -> "RingTowerElement":
        return cls.constant(spec, 1)

    @classmethod
    def constant(cls, spec: RingSpec, c: int) -> "RingTowerElement":
        c = int(c) % spec.modulus
        key = (0,) * spec.q
        return cls(spec, {key: c} if c else {}, _normalized=True)

    @classmethod
    def variable(cls, spec: RingSpec, i: int, power: int = 1) -> "RingTowerElement":
        if not 0 <= i < spec.q:
            raise InvalidParameter(f"variable index {i} out of range for q={spec.q}")
        exps = tuple(power if j == i else 0 for j in range(spec.q))
        return cls(spec, {exps: 1})

    # -- basic queries -------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    def constant_term(self) -> int:
        return self.coeffs.get((0,) * self.spec.q, 0)

    def is_unit(self) -> bool:
        """Local-ring criterion: the constant term is a unit in Z/p^m."""
        return self.constant_term() % self.spec.p != 0

    def is_constant(self) -> bool:
        return all(all(e == 0 for e in exps) for exps in self.coeffs)

    def total_degree(self) -> int:
        if not self.coeffs:
            return -1
        return max(sum(e) for e in self.coeffs)

    # -- arithmetic ----------------------------------------------------

    def _check(self, other: "RingTowerElement") -> None:
        if self.spec != other.spec:
            raise SpecMismatch(f"{self.spec} vs {other.spec}")

    def __add__(self, other: "RingTowerElement") -> "RingTowerElement":
        self._check(other)
        N = self.spec.modulus
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            acc = (out.get(e, 0) + c) % N
            if acc:
                out[e] = acc
            else:
                out.pop(e, None)
        return RingTowerElement(self.spec, out, _normalized=True)

    def __neg__(self) -> "RingTowerElement":
        N = self.spec.modulus
        return RingTowerElement(
            self.spec, {e: N - c for e, c in self.coeffs.items()}, _normalized=True
        )

    def __sub__(self, other: "RingTowerElement") -> "RingTowerElement":
        return self + (-other)

    def __mul__(self, other: "RingTowerElement") -> "RingTowerElement":
        self._check(other)
        prod: dict[tuple[int, ...], int] = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                key = tuple(a + b for a, b in zip(e1, e2))
                prod[key] = prod.get(key, 0) + c1 * c2
        return RingTowerElement(self.spec, prod)

    def scale(self, c: int) -> "RingTowerElement":
        N = self.spec.modulus
        c = int(c) % N
        out = {}
        for e, v in self.coeffs.items():
            acc = (v * c) % N
            if acc:
                out[e] = acc
        return RingTowerElement(self.spec, out, _normalized=True)

    def __pow__(self, k: int) -> "RingTowerElement":
        if k < 0:
            raise InvalidParameter("negative powers are not defined; use invert")
        result = RingTowerElement.one(self.spec)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def invert(self) -> "RingTowerElement":
        """Exact inverse of a unit.

        Over patch and coefficient rings the maximal ideal is nilpotent,
        so the geometric series terminates.  Over the graded model only
        nonzero scalars have polynomial inverses.
        """
        if not self.is_unit():
            raise NotAUnit(f"{self!r} is not a unit")
        spec = self.spec
        N = spec.modulus
        c = self.constant_term()
        cinv = pow(c, -1, N)
        y = self - RingTowerElement.constant(spec, c)
        if spec.kind == "graded":
            if not y.is_zero():
                raise UnsupportedRing(
                    "only scalar units have exact inverses in the graded model"
                )
            return RingTowerElement.constant(spec, cinv)
        # 1/(c + y) = cinv * sum (-cinv*y)^k, and y is nilpotent.
        z = y.scale(N - cinv)
        acc = RingTowerElement.one(spec)
        term = z
        guard = 0
        while not term.is_zero():
            acc = acc + term
            term = term * z
            guard += 1
            if guard > 10_000:
                raise AssertionError("nilpotency bound exceeded")
        return acc.scale(cinv)

    # -- identity ------------------------------------------------------

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RingTowerElement)
            and self.spec == other.spec
            and self.coeffs == other.coeffs
        )

    def __hash__(self) -> int:
        return hash((self.spec, tuple(sorted(self.coeffs.items()))))

    def __repr__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for exps in sorted(self.coeffs):
            c = self.coeffs[exps]
            mono = "*".join(
                f"T{i+1}^{e}" if e > 1 else f"T{i+1}" for i, e in enumerate(exps) if e
            )
            parts.append(f"{c}*{mono}" if mono else f"{c}")
        return " + ".join(parts)


def ring_arith(op: str, *args):
    """Dispatch plain ring arithmetic by name.

    Supported ops: add, mul, normal_form, is_unit, invert.  Arguments
    must share one spec; results are in canonical normal form.
    """
    if op in ("add", "mul"):
        x, y = args
        return x + y if op == "add" else x * y
    if op == "normal_form":
        (x,) = args
        return RingTowerElement(x.spec, x.coeffs)
    if op == "is_unit":
        (x,) = args
        return x.is_unit()
    if op == "invert":
        (x,) = args
        return x.invert()
    raise InvalidParameter(f"unknown ring operation {op!r}")


@dataclass(frozen=True)
class RingMap:
    """A coefficient-compatible ring homomorphism between family members.

    Determined by the images of T_1..T_q; on coefficients it is the
    canonical residue map Z/p^m -> Z/p^m' (m' <= m).  Construction
    verifies that every defining relation of the source dies in the
    target.
    """

    source: RingSpec
    target: RingSpec
    images: tuple[RingTowerElement, ...]

    def __post_init__(self):
        if self.source.p != self.target.p:
            raise SpecMismatch("ring maps must preserve the prime")
        if self.target.m > self.source.m:
            raise InvalidParameter(
                "no canonical coefficient map raises precision "
                f"({self.source.m} -> {self.target.m})"
            )
        if len(self.images) != self.source.q:
            raise SpecMismatch(
                f"need {self.source.q} variable images, got {len(self.images)}"
            )
        for f in self.images:
            if f.spec != self.target:
                raise SpecMismatch("variable image lies in the wrong ring")
        if self.source.kind == "patch":
            one = RingTowerElement.one(self.target)
            pn = self.source.p**self.source.n
            for i, f in enumerate(self.images):
                if (one + f) ** pn != one:
                    raise NotAReduction(
                        f"image of T{i+1} violates the level-{self.source.n} relation"
                    )

    def apply(self, x: RingTowerElement) -> RingTowerElement:
        if x.spec != self.source:
            raise SpecMismatch("element does not live in the source ring")
        out = RingTowerElement.zero(self.target)
        for exps, c in x.coeffs.items():
            term = RingTowerElement.constant(self.target, c)
            for i, e in enumerate(exps):
                if e:
                    term = term * self.images[i] ** e
            out = out + term
        return out

    def __call__(self, x: RingTowerElement) -> RingTowerElement:
        return self.apply(x)


def reduction_map(source: RingSpec, target: RingSpec) -> RingMap:
    """The tower reduction T_i -> T_i with coefficients taken mod p^m'.

    Requires same prime and variable count, target level <= source level
    and target precision <= source precision.  Well-definedness holds
    because (1+T)^(p^n') - 1 divides (1+T)^(p^n) - 1 for n' <= n; the
    constructor re-checks it anyway.
    """
    if source.p != target.p or source.q != target.q:
        raise NotAReduction("reductions preserve the prime and variable count")
    if target.n > source.n or target.m > source.m:
        raise NotAReduction(
            f"({source.n},{source.m}) does not reduce onto ({target.n},{target.m})"
        )
    images = tuple(RingTowerElement.variable(target, i) for i in range(source.q))
    return RingMap(source, target, images)


def augmentation_map(source: RingSpec, m: int | None = None) -> RingMap:
    """Kill all variables: the map onto Z/p^m with T_i -> 0."""
    m = source.m if m is None else m
    target = coefficient_ring(source.p, m)
    zero = RingTowerElement.zero(target)
    return RingMap(source, target, (zero,) * source.q)


def residue_map(source: RingSpec) -> RingMap:
    """The map onto the residue field F_p (T_i -> 0, coefficients mod p)."""
    return augmentation_map(source, 1)


def compose(outer: RingMap, inner: RingMap) -> RingMap:
    if inner.target != outer.source:
        raise SpecMismatch("maps do not compose")
    return RingMap(inner.source, outer.target, tuple(outer(f) for f in inner.images))
