import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from math import comb

from ordmatch import (
    Composition,
    Cube,
    Pattern,
    cube_expand,
    enumerate_patterns,
    find_inheritance_index,
    harmonic_family,
    is_harmonious,
    is_mismatch,
    remove_letter,
)
from ordmatch.errors import (
    InvalidPartition,
    InvalidWord,
    NotCollectable,
    NotMismatch,
    RangeError,
    SizeMismatch,
)
from ordmatch.patterns import parse_partition

EQ1 = "ABBBAABAAAABBBBBAABAABAB"  # AB|BBAA|BA|AAABBB|BBAA|BA|AB|AB


def pat(word):
    return Pattern(word)


class TestPattern:
    def test_canonicalizes_flips(self):
        assert Pattern("BBAA").word == "AABB"
        assert Pattern("BABA").word == "ABAB"

    def test_rejects_unbalanced(self):
        with pytest.raises(InvalidWord):
            Pattern("AAB")
        with pytest.raises(InvalidWord):
            Pattern("AXBB")

    def test_degenerate_r1(self):
        p = Pattern("AB")
        assert p.r == 1 and p.is_collectable and p.split_blocks() == ("AB",)


class TestEnumeration:
    @pytest.mark.parametrize("r", range(1, 7))
    def test_closed_form_counts(self, r):
        assert len(enumerate_patterns(r, "all")) == comb(2 * r, r) // 2
        assert len(enumerate_patterns(r, "collectable")) == 3 ** (r - 1)
        assert len(enumerate_patterns(r, "partite")) == 2 ** (r - 1)
        assert len(enumerate_patterns(r, "dyck")) == comb(2 * r, r) // (r + 1)

    def test_r2_all(self):
        assert [p.word for p in enumerate_patterns(2, "all")] == ["AABB", "ABAB", "ABBA"]

    def test_r3_noncollectable_is_single(self):
        assert [p.word for p in enumerate_patterns(3, "noncollectable")] == ["AABABB"]

    def test_r3_collectable_is_table_minus_one(self):
        words = {p.word for p in enumerate_patterns(3, "collectable")}
        assert len(words) == 9 and "AABABB" not in words

    def test_r3_dyck(self):
        assert {p.word for p in enumerate_patterns(3, "dyck")} == {
            "AABABB", "AAABBB", "AABBAB", "ABAABB", "ABABAB",
        }

    def test_lexicographic_order(self):
        words = [p.word for p in enumerate_patterns(3, "all")]
        assert words == sorted(words)

    def test_range_cap(self):
        with pytest.raises(RangeError):
            enumerate_patterns(9, "all")
        with pytest.raises(RangeError):
            enumerate_patterns(0, "all")


class TestBlocksAndComposition:
    def test_noncollectable(self):
        assert not pat("AABABB").is_collectable
        with pytest.raises(NotCollectable):
            pat("AABABB").composition()

    def test_twelve_pattern_blocks(self):
        assert pat(EQ1).split_blocks() == (
            "AB", "BBAA", "BA", "AAABBB", "BBAA", "BA", "AB", "AB",
        )
        assert pat(EQ1).composition() == Composition((1, 2, 1, 3, 2, 1, 1, 1))

    def test_small_compositions(self):
        assert pat("AABBBA").composition().parts == (2, 1)
        assert pat("ABABAB").composition().parts == (1, 1, 1)
        assert pat("ABABAB").is_partite

    def test_blocks_concatenate_back(self):
        for p in enumerate_patterns(5, "collectable"):
            blocks = p.split_blocks()
            assert "".join(blocks) == p.word
            for b in blocks:
                half = len(b) // 2
                assert b in (b[0] * half + b[half] * half,)
                assert {b[0], b[half]} == {"A", "B"}


class TestHarmoniousMismatch:
    def test_examples(self):
        assert is_harmonious(pat("AABBBA"), pat("AABBAB"))
        assert is_mismatch(pat("AAABBB"), pat("AABBBA"))
        assert is_mismatch(pat("AABABB"), pat("AAABBB"))

    def test_two_noncollectable_neither(self):
        p, q = pat("ABBBABAA"), pat("AABABBBA")
        assert not p.is_collectable and not q.is_collectable
        assert not is_harmonious(p, q) and not is_mismatch(p, q)

    def test_size_mismatch(self):
        with pytest.raises(SizeMismatch):
            is_harmonious(pat("AABB"), pat("AABBAB"))

    def test_equivalence_relation_r4(self):
        coll = enumerate_patterns(4, "collectable")
        for p in coll:
            assert is_harmonious(p, p)
        for p in coll:
            for q in coll:
                assert is_harmonious(p, q) == is_harmonious(q, p)
                if is_harmonious(p, q):
                    for s in coll:
                        if is_harmonious(q, s):
                            assert is_harmonious(p, s)

    def test_mismatch_irreflexive_symmetric(self):
        pats = enumerate_patterns(3, "all")
        for p in pats:
            assert not is_mismatch(p, p)
            for q in pats:
                assert is_mismatch(p, q) == is_mismatch(q, p)


class TestCube:
    def test_eq1_two_cube(self):
        cube = Cube(pat(EQ1), parse_partition("1,3,5;2,8;4,6,7"))
        words = {p.word for p in cube_expand(cube)}
        assert words == {
            EQ1,
            "AB" + "AABB" + "BA" + "AAABBB" + "BBAA" + "BA" + "AB" + "BA",
            "AB" + "BBAA" + "BA" + "BBBAAA" + "BBAA" + "AB" + "BA" + "AB",
            "AB" + "AABB" + "BA" + "BBBAAA" + "BBAA" + "AB" + "BA" + "BA",
        }

    def test_pair_cube(self):
        cube = Cube(pat("ABBAABAB"), parse_partition("1,2;3,4"))
        assert {p.word for p in cube_expand(cube)} == {"ABBAABAB", "ABBABABA"}

    def test_zero_cube_is_singleton(self):
        cube = Cube(pat("AABBAB"), ((1, 2),))
        assert cube_expand(cube) == [pat("AABBAB")]

    def test_invalid_partitions(self):
        with pytest.raises(InvalidPartition):
            Cube(pat("ABABAB"), ((2,), (1, 3)))  # 1 not in first part
        with pytest.raises(InvalidPartition):
            Cube(pat("ABABAB"), ((1, 2),))  # misses block 3
        with pytest.raises(InvalidPartition):
            Cube(pat("ABABAB"), ((1, 2), (2, 3)))  # overlap

    def test_cube_members_pairwise_harmonious_and_distinct(self):
        cube = Cube(pat("AABBABBAAB"), ((1, 3), (2,), (4,)))
        pats = cube_expand(cube)
        assert len(set(pats)) == 2 ** cube.t
        for p in pats:
            for q in pats:
                assert is_harmonious(p, q)

    def test_weights(self):
        cube = Cube(pat(EQ1), parse_partition("1,3,5;2,8;4,6,7"))
        assert cube.weights == (4, 3, 5)


class TestHarmonicFamily:
    def test_partite_family_r3(self):
        fam = {p.word for p in harmonic_family(pat("ABABAB"))}
        assert fam == {"ABABAB", "ABABBA", "ABBAAB", "ABBABA"}

    def test_single_block(self):
        assert harmonic_family(pat("AABB")) == [pat("AABB")]

    def test_two_blocks(self):
        assert {p.word for p in harmonic_family(pat("AABBAB"))} == {"AABBAB", "AABBBA"}

    @pytest.mark.parametrize("r", [2, 3, 4, 5])
    def test_family_size_is_power(self, r):
        for p in enumerate_patterns(r, "collectable"):
            fam = harmonic_family(p)
            assert len(set(fam)) == 2 ** (p.composition().s - 1)
            assert p in fam


class TestRemoveLetter:
    def test_paper_values(self):
        p = pat("AABBBABA")
        assert remove_letter(p, 1).word == "ABBABA"
        assert remove_letter(p, 2).word == "ABBABA"
        assert remove_letter(p, 3).word == "AABBBA"

    def test_trivial(self):
        assert remove_letter(pat("AABB"), 2).word == "AB"

    def test_range(self):
        with pytest.raises(RangeError):
            remove_letter(pat("AABB"), 3)
        with pytest.raises(RangeError):
            remove_letter(pat("AB"), 1)

    @pytest.mark.parametrize("r", [3, 4, 5])
    def test_collectable_closed_under_removal(self, r):
        for p in enumerate_patterns(r, "collectable"):
            for j in range(1, r + 1):
                assert remove_letter(p, j).is_collectable


class TestInheritance:
    def test_spec_examples(self):
        assert find_inheritance_index(pat("AAABBB"), pat("AABABB")) == 2
        assert find_inheritance_index(pat("AABBBA"), pat("AABABB")) == 1

    def test_not_mismatch(self):
        with pytest.raises(NotMismatch):
            find_inheritance_index(pat("AABBBA"), pat("AABBAB"))

    @pytest.mark.parametrize("r", [3, 4])
    def test_exhaustive_existence(self, r):
        pats = enumerate_patterns(r, "all")
        for i, p in enumerate(pats):
            for q in pats[i + 1 :]:
                if is_mismatch(p, q):
                    j = find_inheritance_index(p, q)
                    assert is_mismatch(remove_letter(p, j), remove_letter(q, j))

    def test_r5_sample(self):
        pats = enumerate_patterns(5, "all")
        checked = 0
        for i, p in enumerate(pats):
            for q in pats[i + 1 : i + 12]:
                if is_mismatch(p, q):
                    find_inheritance_index(p, q)
                    checked += 1
        assert checked > 100


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 5), st.data())
def test_cube_roundtrip_property(r, data):
    colls = enumerate_patterns(r, "collectable")
    p = data.draw(st.sampled_from(colls))
    s = p.composition().s
    # random partition of 1..s with 1 in the first part
    labels = data.draw(st.lists(st.integers(0, max(s - 1, 0)), min_size=s, max_size=s))
    labels[0] = 0
    parts: dict[int, list[int]] = {}
    for idx, lab in enumerate(labels, start=1):
        parts.setdefault(lab, []).append(idx)
    ordered = [tuple(parts[lab]) for lab in sorted(parts, key=lambda l: (l != 0, l))]
    cube = Cube(p, tuple(ordered))
    pats = cube_expand(cube)
    assert len(set(pats)) == 2 ** cube.t
    assert p in pats
    for q in pats:
        assert is_harmonious(p, q)
        # flipping any mega-block of a member stays inside the cube
        for j in range(1, cube.t + 1):
            flipped = cube_expand(Cube(q, cube.partition))
            assert set(flipped) == set(pats)
