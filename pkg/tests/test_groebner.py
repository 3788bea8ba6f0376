import random

from patchtower import groebner as gb


def poly(q, terms):
    return {(0, tuple(e)): c for e, c in terms.items() if c}


class TestBuchberger:
    def test_principal_monomial(self):
        out = gb.buchberger([poly(2, {(1, 0): 1})], 3)
        assert out == [{(0, (1, 0)): 1}]

    def test_lex_pair(self):
        f1 = poly(2, {(1, 0): 1, (0, 1): 2})  # T1 - T2
        f2 = poly(2, {(0, 2): 1})
        out = gb.buchberger([f1, f2], 3, gb.ModuleOrder(gb.lex_key))
        assert out == [f1, f2]

    def test_monomial_ideal_is_autoreduced(self):
        f1 = poly(2, {(1, 1): 1})
        f2 = poly(2, {(2, 0): 1})
        out = gb.buchberger([f1, f2], 3)
        assert sorted(map(sorted, out)) == sorted(map(sorted, [f1, f2]))

    def test_same_ideal_same_basis(self):
        rng = random.Random(9)
        base = [poly(2, {(2, 0): 1, (0, 1): 1}), poly(2, {(1, 1): 2, (0, 0): 0, (0, 2): 1})]
        ref = gb.buchberger(base, 3)
        for _ in range(5):
            mixed = [dict(g) for g in base]
            # add random multiples of one generator to the other
            f = {}
            shift = (rng.randrange(2), rng.randrange(2))
            for (pos, e), c in base[0].items():
                f[(pos, tuple(a + b for a, b in zip(e, shift)))] = c
            g2 = dict(mixed[1])
            for t, c in f.items():
                g2[t] = (g2.get(t, 0) + c) % 3
            mixed[1] = {t: c for t, c in g2.items() if c}
            rng.shuffle(mixed)
            assert gb.buchberger(mixed, 3) == ref


class TestSyzygies:
    def test_koszul_syzygy(self):
        g1 = poly(2, {(2, 0): 1})
        g2 = poly(2, {(1, 1): 1})
        syz = gb.syzygy_generators([g1, g2], 1, 3, 2)
        assert syz == [{(1, (1, 0)): 1, (0, (0, 1)): 2}]

    def test_syzygies_annihilate(self):
        rng = random.Random(3)
        for _ in range(10):
            vecs = []
            for _ in range(rng.randrange(1, 4)):
                v = {}
                for pos in range(2):
                    for _ in range(rng.randrange(0, 3)):
                        e = (rng.randrange(3), rng.randrange(3))
                        c = rng.randrange(1, 3)
                        v[(pos, e)] = (v.get((pos, e), 0) + c) % 3
                v = {t: c for t, c in v.items() if c}
                if v:
                    vecs.append(v)
            if not vecs:
                continue
            for s in gb.syzygy_generators(vecs, 2, 3, 2):
                acc = {}
                for idx, vec in enumerate(vecs):
                    coeff = {e: c for (pos, e), c in s.items() if pos == idx}
                    for ec, cc in coeff.items():
                        for (pos, e), c in vec.items():
                            t = (pos, tuple(a + b for a, b in zip(e, ec)))
                            acc[t] = (acc.get(t, 0) + cc * c) % 3
                assert all(v % 3 == 0 for v in acc.values())


class TestIdealOperations:
    def test_quotient_and_saturation(self):
        t1t2 = [poly(2, {(1, 1): 1})]
        t1 = [poly(2, {(1, 0): 1})]
        assert gb.ideal_quotient(t1t2, t1, 3, 2) == [{(0, (0, 1)): 1}]
        assert gb.saturate(t1t2, t1, 3, 2) == [{(0, (0, 1)): 1}]

    def test_annihilator_of_quotient(self):
        ann = gb.annihilator([poly(2, {(1, 0): 1})], 1, 3, 2)
        assert ann == [{(0, (1, 0)): 1}]

    def test_radical_membership(self):
        sq = [poly(2, {(2, 0): 1})]
        assert gb.radical_member(poly(2, {(1, 0): 1}), sq, 3, 2)
        assert not gb.radical_member(poly(2, {(0, 1): 1}), sq, 3, 2)

    def test_dimensions(self):
        assert gb.ideal_dimension([poly(2, {(1, 0): 1})], 3, 2) == 1
        assert gb.ideal_dimension([poly(2, {(1, 0): 1}), poly(2, {(0, 1): 1})], 3, 2) == 0
        assert gb.ideal_dimension([], 3, 2) == 2
        assert gb.ideal_dimension([poly(2, {(0, 0): 1})], 3, 2) == -1

    def test_module_zero(self):
        assert gb.module_is_zero([poly(2, {(0, 0): 1})], 1, 3, 2)
        assert not gb.module_is_zero([poly(2, {(1, 0): 1})], 1, 3, 2)

    def test_standard_counts(self):
        basis = gb.ideal_gb([poly(2, {(1, 0): 1})], 3)
        assert gb.standard_monomial_counts(basis, 1, 2, 3, 3) == (1, 1, 1, 1)

    def test_determinant(self):
        t1 = poly(2, {(1, 0): 1})
        t2 = poly(2, {(0, 1): 1})
        det = gb.poly_determinant([[t1, t2], [t2, t1]], 3)
        assert det == {(0, (2, 0)): 1, (0, (0, 2)): 2}
