"""Seeded random generators shared by the unit and acceptance suites."""

from __future__ import annotations

import random

from patchtower.complexes import FreeComplex, make_complex
from patchtower.graded import GradedModule
from patchtower.groebner import syzygy_generators
from patchtower.linalg import Matrix, column_kernel, expand_scalars
from patchtower.rings import RingSpec, RingTowerElement, make_patch_ring

import numpy as np


def random_homogeneous_poly(rng: random.Random, spec: RingSpec, degree: int) -> RingTowerElement:
    """A random homogeneous polynomial of the exact degree (possibly zero)."""
    q = spec.q
    coeffs = {}
    exps = _exponents_of_degree(q, degree)
    for e in exps:
        c = rng.randrange(spec.p)
        if c:
            coeffs[e] = c
    return RingTowerElement(spec, coeffs)


def _exponents_of_degree(q: int, degree: int):
    out = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            out.append(prefix + (remaining,))
            return
        for k in range(remaining + 1):
            rec(prefix + (k,), remaining - k, slots - 1)

    rec((), degree, q)
    return out


def random_graded_module(rng: random.Random, spec: RingSpec, max_size: int = 3, max_degree: int = 2) -> GradedModule:
    """Random homogeneous presentation, entries in the maximal ideal."""
    rows = rng.randrange(1, max_size + 1)
    cols = rng.randrange(0, max_size + 1)
    ent = []
    for _ in range(rows):
        row = []
        for _ in range(cols):
            deg = rng.randrange(1, max_degree + 1)
            row.append(random_homogeneous_poly(rng, spec, deg))
        ent.append(row)
    rel = Matrix(spec, ent) if cols else Matrix.zero(spec, rows, 0)
    return GradedModule(spec, rows, rel)


def random_minimal_graded_complex(rng: random.Random, spec: RingSpec, max_rank: int = 3, max_length: int = 2) -> FreeComplex:
    """A valid complex with all differential entries in the maximal ideal.

    The first differential is random; each later one has rows drawn from
    the syzygies of the previous differential's rows, filtered to
    constant-term-free vectors so minimality is preserved.
    """
    p, q = spec.p, spec.q
    length = rng.randrange(0, max_length + 1)
    ranks = [rng.randrange(1, max_rank + 1) for _ in range(length + 1)]
    diffs: list[Matrix] = []
    if length >= 1:
        ent = []
        for _ in range(ranks[1]):
            row = []
            for _ in range(ranks[0]):
                if rng.random() < 0.35:
                    row.append(RingTowerElement.zero(spec))
                else:
                    deg = rng.randrange(1, 3)
                    row.append(random_homogeneous_poly(rng, spec, deg))
            ent.append(row)
        diffs.append(Matrix(spec, ent))
    for k in range(1, length):
        prev = diffs[k - 1]
        prev_rows = []
        for i in range(prev.rows):
            vec = {}
            for j in range(prev.cols):
                for e, c in prev.entries[i][j].coeffs.items():
                    vec[(j, e)] = c
            prev_rows.append(vec)
        syz = syzygy_generators(prev_rows, prev.cols, p, q)
        zero_e = (0,) * q
        syz = [s for s in syz if all(e != zero_e for (_, e) in s)]
        rows = []
        for _ in range(ranks[k + 1]):
            vec: dict = {}
            for s in syz:
                if rng.random() < 0.6:
                    c = rng.randrange(1, p)
                    for t, v in s.items():
                        vec[t] = (vec.get(t, 0) + c * v) % p
            rows.append({t: v for t, v in vec.items() if v})
        ent = []
        for vec in rows:
            row = [dict() for _ in range(prev.rows)]
            for (pos, e), c in vec.items():
                row[pos][e] = c
            ent.append([RingTowerElement(spec, d) for d in row])
        diffs.append(Matrix(spec, ent))
    return make_complex(spec, 0, ranks, diffs)


def random_graded_consistent_complex(
    rng: random.Random, spec: RingSpec, max_rank: int = 3, max_length: int = 2
) -> FreeComplex:
    """A minimal complex carrying a consistent grading.

    Generator degrees are chosen per term; every nonzero entry is
    homogeneous of the forced degree, and later differentials combine
    only syzygy generators of one degree, so twist inference always
    succeeds on the output.
    """
    p, q = spec.p, spec.q
    length = rng.randrange(0, max_length + 1)
    ranks = [rng.randrange(1, max_rank + 1) for _ in range(length + 1)]
    diffs: list[Matrix] = []
    if length >= 1:
        w0 = [rng.randrange(0, 2) for _ in range(ranks[0])]
        w1 = [max(w0) + rng.randrange(1, 3) for _ in range(ranks[1])]
        ent = []
        for k in range(ranks[1]):
            row = []
            for l in range(ranks[0]):
                deg = w1[k] - w0[l]
                if deg < 1 or rng.random() < 0.3:
                    row.append(RingTowerElement.zero(spec))
                else:
                    row.append(random_homogeneous_poly(rng, spec, deg))
            ent.append(row)
        diffs.append(Matrix(spec, ent))
    for k in range(1, length):
        prev = diffs[k - 1]
        prev_rows = []
        for i in range(prev.rows):
            vec = {}
            for j in range(prev.cols):
                for e, c in prev.entries[i][j].coeffs.items():
                    vec[(j, e)] = c
            prev_rows.append(vec)
        syz = syzygy_generators(prev_rows, prev.cols, p, q)
        # group twist-homogeneous syzygies by their degree so combining
        # within one group keeps the complex graded
        shifts = w1
        by_degree: dict[int, list[dict]] = {}
        zero_e = (0,) * q
        for s in syz:
            if any(e == zero_e for (_, e) in s):
                continue
            degs = {sum(e) + shifts[pos] for (pos, e) in s}
            if len(degs) == 1:
                by_degree.setdefault(degs.pop(), []).append(s)
        rows = []
        row_degrees = []
        for _ in range(ranks[k + 1]):
            vec: dict = {}
            deg_choice = None
            if by_degree and rng.random() < 0.9:
                deg_choice = rng.choice(sorted(by_degree))
                for s in by_degree[deg_choice]:
                    if rng.random() < 0.7:
                        c = rng.randrange(1, p)
                        for t, v in s.items():
                            vec[t] = (vec.get(t, 0) + c * v) % p
                vec = {t: v for t, v in vec.items() if v}
            rows.append(vec)
            row_degrees.append(deg_choice if vec else max(shifts) + 1)
        ent = []
        for vec in rows:
            row = [dict() for _ in range(prev.rows)]
            for (pos, e), c in vec.items():
                row[pos][e] = c
            ent.append([RingTowerElement(spec, d) for d in row])
        diffs.append(Matrix(spec, ent))
        w1 = row_degrees
    return make_complex(spec, 0, ranks, diffs)


def random_patch_complex(rng: random.Random, spec: RingSpec, max_rank: int = 2, max_length: int = 2) -> FreeComplex:
    """A valid complex over a finite tower ring with random differentials."""
    N = spec.modulus
    length = rng.randrange(0, max_length + 1)
    ranks = [rng.randrange(1, max_rank + 1) for _ in range(length + 1)]

    def random_element() -> RingTowerElement:
        coeffs = {}
        for e in spec.monomial_basis():
            if rng.random() < 0.4:
                c = rng.randrange(N)
                if c:
                    coeffs[e] = c
        return RingTowerElement(spec, coeffs)

    diffs: list[Matrix] = []
    if length >= 1:
        ent = [[random_element() for _ in range(ranks[0])] for _ in range(ranks[1])]
        diffs.append(Matrix(spec, ent))
    rho = spec.coefficient_rank
    basis = spec.monomial_basis()
    for k in range(1, length):
        prev = diffs[k - 1]
        # rows of the next differential are ring-vectors x with x @ prev = 0;
        # in expanded coordinates that is the column kernel of expand(prev^T)
        expanded_t = expand_scalars(prev.transpose())
        lk = column_kernel(expanded_t, spec.p, spec.m, prev.rows * rho)
        rows = []
        for _ in range(ranks[k + 1]):
            acc = np.zeros(prev.rows * rho, dtype=np.int64)
            for gen in lk.T:
                if rng.random() < 0.5:
                    acc = (acc + rng.randrange(N) * gen) % N
            row = []
            for i in range(prev.rows):
                coeffs = {}
                for bi, e in enumerate(basis):
                    c = int(acc[i * rho + bi])
                    if c:
                        coeffs[e] = c
                row.append(RingTowerElement(spec, coeffs))
            rows.append(row)
        m = Matrix(spec, rows) if rows else Matrix.zero(spec, 0, prev.rows)
        diffs.append(m)
    return make_complex(spec, 0, ranks, diffs)


def random_monomial_ideal(rng: random.Random, spec: RingSpec, max_gens: int = 3, max_degree: int = 3):
    """A few random nonconstant monomials."""
    gens = []
    for _ in range(rng.randrange(1, max_gens + 1)):
        e = [0] * spec.q
        total = rng.randrange(1, max_degree + 1)
        for _ in range(total):
            e[rng.randrange(spec.q)] += 1
        gens.append(RingTowerElement(spec, {tuple(e): 1}))
    return gens


SMALL_PATCH_SPECS = [
    make_patch_ring(3, 1, 1, 1),  # 27 elements
    make_patch_ring(2, 2, 1, 1),  # 16 elements
    make_patch_ring(2, 1, 1, 2),  # 16 elements
    make_patch_ring(2, 1, 2, 1),  # 16 elements
]
