import pytest
from itertools import combinations
from math import comb, factorial

from hypothesis import given, settings
from hypothesis import strategies as st

from ordmatch import (
    Cube,
    OrderedMatching,
    Pattern,
    PatternSet,
    blow_up,
    build_hk,
    chain_antichain,
    contains_copy,
    count_avoiding_tuples,
    count_cliques,
    cube_expand,
    derive_seed,
    enumerate_patterns,
    from_word,
    good_edge_census,
    is_r_partite,
    iter_cliques,
    max_clique,
    max_clique_global,
    pattern_of_pair,
    sample_uniform,
    to_word,
    trace_of,
    verify_clique,
)
from ordmatch.errors import (
    CapExceeded,
    GeometryMismatch,
    NotPartite,
    SizeMismatch,
    SolverMismatch,
    UnboundedFamily,
)

from oracles import brute_max_clique


def catalan(k):
    return comb(2 * k, k) // (k + 1)


class TestPatternSetGrammar:
    def test_named(self):
        assert len(PatternSet.from_spec(3, "all").members) == 10
        assert len(PatternSet.from_spec(3, "partite").members) == 4
        assert len(PatternSet.from_spec(4, "dyck").members) == 14

    def test_harmonic(self):
        ps = PatternSet.from_spec(3, "harmonic:ABABAB")
        assert ps.words() == {"ABABAB", "ABABBA", "ABBAAB", "ABBABA"}
        assert ps.is_partite_family

    def test_cube_and_complement(self):
        ps = PatternSet.from_spec(4, "cube:ABBAABAB:1,2;3,4")
        assert ps.words() == {"ABBAABAB", "ABBABABA"}
        comp = PatternSet.from_spec(4, "cube-complement:ABABABAB:1,2,3;4")
        assert len(comp.members) == 8 - 2
        assert all(p.is_partite for p in comp.members)

    def test_complement_needs_partite_base(self):
        with pytest.raises(NotPartite):
            PatternSet.from_spec(4, "cube-complement:AABBABAB:1,2;3")

    def test_list(self):
        assert PatternSet.from_spec(2, "list:AABB,ABAB").words() == {"AABB", "ABAB"}

    def test_wrong_r(self):
        with pytest.raises(SizeMismatch):
            PatternSet.from_spec(3, "list:AABB")


class TestMaxCliqueSmall:
    def test_spec_examples(self):
        m = from_word("AABBCC")
        assert max_clique(m, PatternSet.from_words(["AABB"])).size == 3
        assert max_clique(m, PatternSet.from_words(["ABAB"])).size == 1
        assert max_clique(from_word("ABCABC"), PatternSet.from_words(["ABAB"])).size == 3

    def test_six_partite_witness(self):
        m = from_word("ABCDEABCDEABCDEEDABCBACEDCBADE")
        cube = Cube(Pattern("AB" * 6), ((1, 2, 3, 4), (5,), (6,)))
        ps = PatternSet(6, frozenset(cube_expand(cube)), "cube")
        res = max_clique(m, ps, "bb")
        assert res.size == 3 and set(res.witness) == {0, 1, 2}

    def test_budget_lower_bound_status(self):
        m = sample_uniform(3, 300, 4)
        ps = PatternSet.from_words(["ABABAB", "ABABBA"])
        res = max_clique(m, ps, "bb", budget=1e-6)
        assert res.status in ("Exact", "LowerBound")
        assert verify_clique(m, ps, res.witness)

    def test_partition_needs_partite_family(self):
        m = sample_uniform(2, 10, 1)
        with pytest.raises(SolverMismatch):
            max_clique(m, PatternSet.from_words(["AABB"]), "partition")

    def test_chain_rejects_nontransitive(self):
        # crossing pattern alone is not transitive on this instance
        m = from_word("ABACBDCEDE")
        with pytest.raises(SolverMismatch):
            max_clique(m, PatternSet.from_words(["ABAB"]), "chain")

    def test_trivial_sizes(self):
        m = from_word("AABB")
        res = max_clique(m, PatternSet.from_words(["ABAB"]))
        assert res.size == 1


def random_pattern_set(rng_draw, r):
    pats = enumerate_patterns(r, "all")
    subset = [p for p in pats if rng_draw()]
    if not subset:
        subset = [pats[0]]
    return PatternSet(r, frozenset(subset), "random")


class TestSolverOracleEquivalence:
    @pytest.mark.parametrize("r,seed0", [(2, 100), (3, 200)])
    def test_against_brute_force(self, r, seed0):
        from ordmatch.sampling import SplitMix64

        rng = SplitMix64(seed0)
        pats = enumerate_patterns(r, "all")
        for trial in range(60):
            n = 2 + rng.below(9)  # up to 11 edges
            m = sample_uniform(r, n, derive_seed(seed0, n, trial))
            subset = [p for p in pats if rng.below(2)] or [pats[rng.below(len(pats))]]
            ps = PatternSet(r, frozenset(subset), "random")
            want = brute_max_clique(m, ps.words())
            res_bb = max_clique(m, ps, "bb")
            assert res_bb.status == "Exact" and res_bb.size == want
            res_auto = max_clique(m, ps, "auto")
            assert res_auto.status == "Exact" and res_auto.size == want
            try:
                res_chain = max_clique(m, ps, "chain")
            except SolverMismatch:
                pass
            else:
                assert res_chain.size == want

    def test_partition_against_brute(self):
        for r in (2, 3):
            ps = PatternSet.named(r, "partite")
            for trial in range(40):
                m = sample_uniform(r, 3 + trial % 8, derive_seed(777, r, trial))
                res = max_clique(m, ps, "partition")
                assert res.size == brute_max_clique(m, ps.words())
                assert verify_clique(m, ps, res.witness)

    def test_chain_suffix_path_against_brute(self):
        ps = PatternSet.from_words(["AABB"])
        for trial in range(40):
            m = sample_uniform(2, 4 + trial % 9, derive_seed(888, 2, trial))
            res = max_clique(m, ps, "chain")
            assert res.status == "Exact"
            assert res.size == brute_max_clique(m, ps.words())


class TestMonotonicity:
    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**60), st.integers(2, 3), st.integers(3, 9), st.data())
    def test_pattern_and_submatching_monotonicity(self, seed, r, n, data):
        m = sample_uniform(r, n, seed)
        pats = enumerate_patterns(r, "all")
        small = data.draw(st.sets(st.sampled_from(pats), min_size=1, max_size=len(pats)))
        extra = data.draw(st.sets(st.sampled_from(pats), max_size=len(pats)))
        ps_small = PatternSet(r, frozenset(small), "q")
        ps_big = PatternSet(r, frozenset(small | extra), "p")
        z_small = max_clique(m, ps_small).size
        z_big = max_clique(m, ps_big).size
        assert z_small <= z_big
        if n > 1:
            sub = m.submatching(range(n - 1)).canonicalize()
            assert max_clique(sub, ps_small).size <= z_small


class TestCountCliques:
    def test_catalan_families(self):
        nesting_free = PatternSet.from_words(["AABB", "ABAB"])
        crossing_free = PatternSet.from_words(["AABB", "ABBA"])
        for k in range(1, 8):
            assert count_cliques(2, nesting_free, k) == catalan(k)
            assert count_cliques(2, crossing_free, k) == catalan(k)

    def test_cube_factorial_law(self):
        cases = [
            ("ABBAABAB", ((1, 2), (3, 4)), 3),
            ("ABABAB", ((1, 2), (3,)), 4),
            ("AABBBA", ((1,), (2,)), 4),
            ("AABBABAB", ((1, 3), (2,)), 3),
            ("AABBABABBABA", ((1, 2), (3, 4), (5,)), 4),
            ("ABABABABAB", ((1, 4), (2, 3), (5,)), 3),
        ]
        for word, partition, k in cases:
            cube = Cube(Pattern(word), partition)
            ps = PatternSet(cube.base.r, frozenset(cube_expand(cube)), "cube")
            assert count_cliques(cube.base.r, ps, k) == factorial(k) ** cube.t

    def test_single_collectable_unique(self):
        for word in ("AABB", "ABABAB", "AABBBA"):
            p = Pattern(word)
            ps = PatternSet(p.r, frozenset([p]), "single")
            for k in (2, 3, 4):
                assert count_cliques(p.r, ps, k) == 1

    def test_all_patterns_counts_all_matchings(self):
        from ordmatch import count_matchings

        assert count_cliques(2, PatternSet.named(2, "all"), 3) == count_matchings(2, 3)
        assert count_cliques(3, PatternSet.named(3, "all"), 2) == count_matchings(3, 2)

    def test_noncollectable_rigidity(self):
        for r in (3, 4):
            for p in enumerate_patterns(r, "noncollectable"):
                ps = PatternSet(r, frozenset([p]), "nc")
                assert count_cliques(r, ps, 3) == 0

    def test_cap(self):
        with pytest.raises(CapExceeded):
            count_cliques(2, PatternSet.named(2, "all"), 13)

    def test_iter_order_lexicographic(self):
        ps = PatternSet.named(2, "all")
        words = [to_word(m) for m in iter_cliques(2, ps, 3)]
        assert words == sorted(words)


class TestGlobalMax:
    def test_single_noncollectable_is_two(self):
        ps = PatternSet.from_words(["AABABB"])
        assert max_clique_global(3, ps) == 2

    def test_requires_noncollectable(self):
        with pytest.raises(UnboundedFamily):
            max_clique_global(2, PatternSet.from_words(["AABB"]))

    def test_r4_pair_in_ramsey_band(self):
        ps = PatternSet.from_words(["ABBBABAA", "AABABBBA"])
        z = max_clique_global(4, ps)
        assert 2 <= z <= 5
        assert z == 3  # frozen from this exhaustive search

    def test_r4_all_noncollectable(self):
        ps = PatternSet.named(4, "noncollectable")
        assert len(ps.members) == 8
        z = max_clique_global(4, ps)
        assert z == 5  # frozen; far below the Ramsey bound R_8(3)


class TestChainAntichain:
    def test_paper_six_partite_example(self):
        m = from_word("ABCDEABCDEABCDEEDABCBACEDCBADE")
        cube = Cube(Pattern("AB" * 6), ((1, 2, 3, 4), (5,), (6,)))
        ca = chain_antichain(m, cube)
        assert ca.chain == (0, 1, 2)  # the A, B, C edges
        assert len(ca.antichain) == 3
        # the paper's anti-chain {A, D, E} is indeed an antichain here
        cube_words = {p.word for p in cube_expand(cube)}
        for a, b in combinations((0, 3, 4), 2):
            assert pattern_of_pair(m.edges[a], m.edges[b]).word not in cube_words

    def test_unique_clique_extremes(self):
        cube = Cube(Pattern("ABAB"), ((1,), (2,)))
        from ordmatch import unique_clique

        m = unique_clique(Pattern("ABAB"), 4, range(1, 9))
        ca = chain_antichain(m, cube)
        assert len(ca.chain) == 4 and len(ca.antichain) == 1

    def test_product_bound_and_verification(self):
        ps_r = PatternSet.named(3, "partite")
        for trial in range(25):
            m = sample_uniform(3, 60, derive_seed(31337, 60, trial))
            res = max_clique(m, ps_r, "partition")
            sub = m.submatching(res.witness).canonicalize()
            assert is_r_partite(sub)
            cube = Cube(Pattern("ABABAB"), ((1, 2), (3,)))
            ca = chain_antichain(sub, cube)
            assert len(ca.chain) * len(ca.antichain) >= sub.n
            cube_words = {p.word for p in cube_expand(cube)}
            for a, b in combinations(ca.chain, 2):
                assert pattern_of_pair(sub.edges[a], sub.edges[b]).word in cube_words
            for a, b in combinations(ca.antichain, 2):
                w = pattern_of_pair(sub.edges[a], sub.edges[b]).word
                assert w not in cube_words and Pattern(w).is_partite

    def test_not_partite_rejected(self):
        cube = Cube(Pattern("ABAB"), ((1,), (2,)))
        with pytest.raises(NotPartite):
            chain_antichain(from_word("AABB"), cube)


class TestContainsCopy:
    def test_examples(self):
        assert contains_copy(from_word("AABBCC"), from_word("AABB"))[0]
        assert not contains_copy(from_word("AABBCC"), from_word("ABAB"))[0]
        found, witness = contains_copy(from_word("ABCCBA"), from_word("ABBA"))
        assert found and witness in ((0, 1), (0, 2))

    def test_brute_force_cross_check(self):
        for trial in range(30):
            m = sample_uniform(2, 6, derive_seed(55, 6, trial))
            h = sample_uniform(2, 3, derive_seed(56, 3, trial))
            want = {
                (a, b): pattern_of_pair(h.edges[a], h.edges[b]).word
                for a, b in combinations(range(3), 2)
            }
            brute = any(
                all(
                    pattern_of_pair(m.edges[c[a]], m.edges[c[b]]).word == want[(a, b)]
                    for a, b in combinations(range(3), 2)
                )
                for c in combinations(range(6), 3)
            )
            assert contains_copy(m, h)[0] == brute

    def test_size_guard(self):
        with pytest.raises(SizeMismatch):
            contains_copy(from_word("AABB"), from_word("ABABAB"))  # r=2 vs r=3
        assert contains_copy(from_word("AABB"), from_word("ABCABC")) == (False, None)


class TestGoodEdgeCensus:
    @pytest.fixture(scope="class")
    def planted(self):
        cube = Cube(Pattern("ABAB"), ((1,), (2,)))
        k, ell = 3, 2
        blown = blow_up(build_hk(cube, k), ell)
        return cube, k, ell, blown

    def test_single_type_row(self, planted):
        # k = 1 collapses every good edge to one type: no separated pairs needed
        cube = Cube(Pattern("ABAB"), ((1,), (2,)))
        blown = blow_up(build_hk(cube, 1), 4)
        m = sample_uniform(2, 4, 12)
        census = good_edge_census(m, blown, cube, 1, 4)
        assert census.z == comb(census.y, 2)

    def test_bound_and_exact_consistency(self, planted):
        cube, k, ell, blown = planted
        n = k * ell  # planted zone fills the host exactly
        for trial in range(200):
            m = sample_uniform(2, n, derive_seed(9090, n, trial))
            census = good_edge_census(m, blown, cube, k, ell)
            assert census.y >= census.lower_bound >= 0
            assert census.lower_bound >= census.y - census.z
            assert census.exact_max is not None
            assert census.exact_max >= census.lower_bound

    def test_mean_y_matches_formula(self, planted):
        cube, k, ell, blown = planted
        n = k * ell
        expected = k**2 * ell**2 / comb(2 * n - 1, 1)
        total = 0
        trials = 4000
        for trial in range(trials):
            m = sample_uniform(2, n, derive_seed(4242, n, trial))
            total += good_edge_census(m, blown, cube, k, ell).y
        mean = total / trials
        assert abs(mean - expected) < 0.25  # generous CLT band

    def test_geometry_mismatch(self, planted):
        cube, k, ell, blown = planted
        with pytest.raises(GeometryMismatch):
            good_edge_census(sample_uniform(2, 3, 1), blown, cube, k, ell)


class TestAvoidingTuples:
    def test_monotone_single(self):
        assert count_avoiding_tuples([(1, 2)], 3) == 1
        assert count_avoiding_tuples([(1, 2, 3)], 4) == 14  # 123-avoiders, Catalan

    def test_pair(self):
        assert count_avoiding_tuples([(1, 2), (1, 2)], 2) == 3

    def test_brute_force_identity_small(self):
        # single pattern of length k: everything but the pattern itself avoids...
        assert count_avoiding_tuples([(1, 2)], 2) == 1  # only 21 avoids 12

    def test_cap(self):
        with pytest.raises(CapExceeded):
            count_avoiding_tuples([(1, 2)], 12)


class TestVerify:
    def test_examples(self):
        m = from_word("AABBCC")
        assert verify_clique(m, PatternSet.from_words(["AABB"]), [0, 1, 2])
        assert not verify_clique(m, PatternSet.from_words(["ABAB"]), [0, 1])

    def test_fullfull_clique(self):
        cube = Cube(Pattern("ABAABBABBA"), ((1,), (2,), (3, 4)))
        ps = PatternSet(5, frozenset(cube_expand(cube)), "cube")
        m = from_word("ABCCCAABBACBBCA")  # DEF|FFDDEE|DFEEFD relabeled
        assert verify_clique(m, ps, [0, 1, 2])

    def test_large_subset_vectorized_path(self):
        ps = PatternSet.named(2, "partite")
        m = sample_uniform(2, 400, 3)
        res = max_clique(m, ps, "partition")
        assert len(res.witness) > 64
        assert verify_clique(m, ps, res.witness)
        # flipping one edge out of the witness must break it
        outside = next(i for i in range(m.n) if i not in res.witness)
        corrupted = list(res.witness[:-1]) + [outside]
        assert isinstance(verify_clique(m, ps, corrupted), bool)
