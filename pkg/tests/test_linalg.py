import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from patchtower.errors import NoSolution, SpecMismatch
from patchtower.linalg import (
    Matrix,
    elementary_divisors,
    expand_scalars,
    from_int_array,
    howell_form,
    kernel_and_solve,
    multiplication_matrix,
    smith_quotient,
    to_int_array,
)
from patchtower.rings import RingTowerElement, coefficient_ring, make_patch_ring

Z4 = coefficient_ring(2, 2)
Z9 = coefficient_ring(3, 2)


def mat(spec, rows):
    return Matrix.from_int_rows(spec, rows)


class TestHowell:
    def test_two_is_already_canonical(self):
        hf = howell_form(mat(Z4, [[2]]))
        assert to_int_array(hf.H).tolist() == [[2]]

    def test_row_reduction_example(self):
        hf = howell_form(mat(Z4, [[1, 2], [0, 2]]))
        assert to_int_array(hf.H).tolist() == [[1, 0], [0, 2]]

    def test_zero_matrix(self):
        hf = howell_form(mat(Z4, [[0, 0], [0, 0]]))
        assert to_int_array(hf.H).shape[0] == 0

    def test_witness_transform(self):
        a = mat(Z9, [[3, 1, 4], [6, 2, 0], [0, 3, 3]])
        hf = howell_form(a)
        got = (to_int_array(hf.U) @ to_int_array(a)) % 9
        assert got.tolist() == to_int_array(hf.H).tolist()

    def test_rejects_patch_matrices(self):
        spec = make_patch_ring(2, 2, 1, 1)
        t = RingTowerElement.variable(spec, 0)
        with pytest.raises(SpecMismatch):
            howell_form(Matrix(spec, [[t]]))

    @given(
        st.lists(
            st.lists(st.integers(0, 8), min_size=2, max_size=2),
            min_size=1,
            max_size=3,
        )
    )
    @settings(max_examples=40, deadline=None)
    def test_howell_preserves_the_row_span(self, rows):
        a = np.array(rows, dtype=np.int64) % 9
        h = to_int_array(howell_form(from_int_array(Z9, a)).H)
        assert span_of_rows(h, 9) == span_of_rows(a, 9)

    @pytest.mark.parametrize("spec", [Z4, Z9], ids=["Z4", "Z9"])
    def test_canonical_under_row_mixing(self, spec):
        # same row span after random invertible row operations -> same form
        rng = random.Random(5)
        N = spec.modulus
        for _ in range(25):
            rows = rng.randrange(1, 4)
            cols = rng.randrange(1, 4)
            a = [[rng.randrange(N) for _ in range(cols)] for _ in range(rows)]
            b = [row[:] for row in a]
            for _ in range(6):
                i, j = rng.randrange(rows), rng.randrange(rows)
                if i == j:
                    u = rng.choice([u for u in range(1, N) if u % spec.p])
                    b[i] = [(u * x) % N for x in b[i]]
                else:
                    c = rng.randrange(N)
                    b[i] = [(x + c * y) % N for x, y in zip(b[i], b[j])]
            ha = to_int_array(howell_form(mat(spec, a)).H)
            hb = to_int_array(howell_form(mat(spec, b)).H)
            assert ha.tolist() == hb.tolist()


def brute_kernel(a: np.ndarray, N: int) -> set:
    rows = a.shape[0]
    out = set()
    for x in itertools.product(range(N), repeat=rows):
        if not ((np.array(x) @ a) % N).any():
            out.add(x)
    return out


def span_of_rows(k: np.ndarray, N: int) -> set:
    if k.shape[0] == 0:
        return {(0,) * k.shape[1]}
    out = set()
    for combo in itertools.product(range(N), repeat=k.shape[0]):
        out.add(tuple(int(v) for v in (np.array(combo) @ k) % N))
    return out


class TestKernelAndSolve:
    def test_kernel_of_two_over_z4(self):
        k, _ = kernel_and_solve(mat(Z4, [[2]]))
        assert span_of_rows(to_int_array(k), 4) == {(0,), (2,)}

    def test_solve_by_substitution(self):
        _, x = kernel_and_solve(mat(Z4, [[2]]), mat(Z4, [[2]]))
        xv = to_int_array(x)
        assert (xv @ np.array([[2]])) % 4 == np.array([[2]])

    def test_identity_kernel_trivial(self):
        k, _ = kernel_and_solve(mat(Z4, [[1, 0], [0, 1]]))
        assert to_int_array(k).shape[0] == 0

    def test_no_solution(self):
        with pytest.raises(NoSolution):
            kernel_and_solve(mat(Z4, [[2]]), mat(Z4, [[1]]))

    @pytest.mark.parametrize("spec", [Z4, Z9], ids=["Z4", "Z9"])
    def test_kernel_matches_enumeration(self, spec):
        rng = random.Random(11)
        N = spec.modulus
        for _ in range(20):
            rows = rng.randrange(1, 4)
            cols = rng.randrange(1, 4)
            a = np.array([[rng.randrange(N) for _ in range(cols)] for _ in range(rows)])
            k, _ = kernel_and_solve(from_int_array(spec, a))
            assert span_of_rows(to_int_array(k), N) == brute_kernel(a, N)


class TestExpandScalars:
    def test_multiplication_by_t(self):
        spec = make_patch_ring(3, 1, 1, 1)
        t = RingTowerElement.variable(spec, 0)
        got = expand_scalars(Matrix(spec, [[t]]))
        assert got.tolist() == [[0, 0, 0], [1, 0, 0], [0, 1, 0]]

    def test_identity_expands_to_identity(self):
        spec = make_patch_ring(3, 1, 1, 1)
        got = expand_scalars(Matrix.identity(spec, 2))
        assert (got == np.eye(6, dtype=np.int64)).all()

    def test_no_variables_is_trivial(self):
        spec = make_patch_ring(3, 2, 1, 0)
        got = expand_scalars(Matrix.from_int_rows(spec, [[5]]))
        assert got.tolist() == [[5]]

    def test_functorial_on_products_and_sums(self):
        spec = make_patch_ring(2, 2, 1, 1)
        rng = random.Random(3)

        def rand_elem():
            return RingTowerElement(
                spec, {e: rng.randrange(4) for e in spec.monomial_basis()}
            )

        for _ in range(10):
            a = Matrix(spec, [[rand_elem(), rand_elem()], [rand_elem(), rand_elem()]])
            b = Matrix(spec, [[rand_elem(), rand_elem()], [rand_elem(), rand_elem()]])
            ea, eb = expand_scalars(a), expand_scalars(b)
            assert (expand_scalars(a @ b) == (ea @ eb) % 4).all()
            sum_entries = [
                [a.entries[i][j] + b.entries[i][j] for j in range(2)] for i in range(2)
            ]
            assert (expand_scalars(Matrix(spec, sum_entries)) == (ea + eb) % 4).all()

    def test_units_expand_to_invertible(self):
        spec = make_patch_ring(3, 1, 1, 1)
        one_plus_t = RingTowerElement.one(spec) + RingTowerElement.variable(spec, 0)
        e = expand_scalars(Matrix(spec, [[one_plus_t]]))
        inv = expand_scalars(Matrix(spec, [[one_plus_t.invert()]]))
        assert ((e @ inv) % 3 == np.eye(3, dtype=np.int64)).all()


class TestDivisors:
    def test_cyclic_quotient(self):
        assert elementary_divisors(np.array([[2]]), 1, 2, 2) == (2,)

    def test_free_module(self):
        assert elementary_divisors(np.zeros((2, 0)), 2, 3, 2) == (9, 9)

    def test_smith_quotient_matches_divisors(self):
        rng = random.Random(4)
        for _ in range(60):
            t = rng.randrange(1, 4)
            s = rng.randrange(0, 4)
            p, m = rng.choice([(2, 2), (3, 2), (2, 3)])
            rel = np.array(
                [[rng.randrange(p**m) for _ in range(s)] for _ in range(t)]
            ).reshape(t, s)
            qs = smith_quotient(rel, t, p, m)
            assert qs.divisors() == elementary_divisors(rel, t, p, m)
            for col in rel.T:
                c = qs.coords(col)
                assert not c.any()

    def test_multiplication_matrix_respects_relation(self):
        spec = make_patch_ring(2, 2, 1, 1)
        t = RingTowerElement.variable(spec, 0)
        mt = multiplication_matrix(t)
        # T^2 = 2T over this ring
        assert ((mt @ mt) % 4 == multiplication_matrix(t * t)).all()
