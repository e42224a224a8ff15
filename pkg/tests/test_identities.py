"""Alias unification: edit distance, merging rules, canonicalization."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fileexperts.gitlog import RawIdentity
from fileexperts.identities import (
    canonicalize_history,
    levenshtein,
    normalize_name,
    resolve_identities,
)
from conftest import add, make_history, mod
from oracles import lev_matrix

short_text = st.text(alphabet="abcdef ", max_size=12)


class TestLevenshtein:
    def test_identity(self):
        assert levenshtein("abc", "abc") == 0

    def test_pure_insertions(self):
        assert levenshtein("", "abc") == 3

    def test_kitten_sitting(self):
        assert levenshtein("kitten", "sitting") == 3
        assert lev_matrix("kitten", "sitting") == 3

    @given(short_text, short_text)
    def test_matches_full_matrix_oracle(self, a, b):
        assert levenshtein(a, b) == lev_matrix(a, b)

    @given(short_text, short_text)
    def test_symmetry_and_bounds(self, a, b):
        d = levenshtein(a, b)
        assert d == levenshtein(b, a)
        assert abs(len(a) - len(b)) <= d <= max(len(a), len(b), 0)

    @given(short_text, short_text, short_text)
    @settings(max_examples=50)
    def test_triangle_inequality(self, a, b, c):
        assert levenshtein(a, c) <= levenshtein(a, b) + levenshtein(b, c)


class TestResolveIdentities:
    def test_same_email_merges(self):
        ids = [RawIdentity("Ana S.", "ana@x.com"), RawIdentity("Ana Silva", "ana@x.com")]
        resolved = resolve_identities(ids)
        assert resolved[ids[0]] is resolved[ids[1]]
        assert resolved[ids[0]].display_name == "Ana Silva"

    def test_email_comparison_is_case_insensitive(self):
        ids = [RawIdentity("Ana", "Ana@X.com"), RawIdentity("Ana Silva", "ana@x.com")]
        resolved = resolve_identities(ids)
        assert len(set(resolved.values())) == 1

    def test_similar_names_merge(self):
        # distance("jsmith", "j smith") = 1 <= 0.3 * 7 = 2.1
        ids = [RawIdentity("jsmith", "a@x.com"), RawIdentity("j smith", "b@y.com")]
        resolved = resolve_identities(ids)
        assert len(set(resolved.values())) == 1
        merged = resolved[ids[0]]
        assert merged.emails == {"a@x.com", "b@y.com"}

    def test_dissimilar_developers_stay_apart(self):
        ids = [RawIdentity("Alice", "a@x.com"), RawIdentity("Bob", "b@y.com")]
        resolved = resolve_identities(ids)
        assert resolved[ids[0]] != resolved[ids[1]]

    def test_manual_alias_map(self):
        ids = [RawIdentity("X Person", "a@x.com"), RawIdentity("Unrelated", "b@y.com")]
        resolved = resolve_identities(ids, manual_aliases=[("a@x.com", "b@y.com")])
        assert len(set(resolved.values())) == 1

    def test_accents_and_punctuation_normalize(self):
        assert normalize_name("José  Álvarez-Núñez") == "jose alvareznunez"
        ids = [RawIdentity("José Silva", "a@x.com"), RawIdentity("Jose Silva", "b@y.com")]
        assert len(set(resolve_identities(ids).values())) == 1

    def test_empty_names_never_merge_by_name(self):
        ids = [RawIdentity("??", "a@x.com"), RawIdentity("!!", "b@y.com")]
        assert len(set(resolve_identities(ids).values())) == 2

    def test_idempotent(self):
        ids = [
            RawIdentity("jsmith", "a@x.com"),
            RawIdentity("j smith", "b@y.com"),
            RawIdentity("Carol Chen", "carol@z.com"),
        ]
        first = resolve_identities(ids)
        canonical = sorted(
            {RawIdentity(d.display_name, d.canonical_key) for d in first.values()},
            key=lambda i: i.email,
        )
        second = resolve_identities(canonical)
        assert len(set(second.values())) == len(set(first.values()))
        assert {d.canonical_key for d in second.values()} == {
            d.canonical_key for d in first.values()
        }

    def test_order_independent(self):
        ids = [
            RawIdentity("jsmith", "a@x.com"),
            RawIdentity("j smith", "b@y.com"),
            RawIdentity("Ana Silva", "ana@x.com"),
            RawIdentity("Ana S.", "ana@x.com"),
            RawIdentity("Carol", "carol@z.com"),
        ]
        reference = resolve_identities(ids)

        def partition(mapping):
            groups = {}
            for ident, dev in mapping.items():
                groups.setdefault(dev.canonical_key, set()).add(ident)
            return {frozenset(v) for v in groups.values()}

        for seed in range(5):
            shuffled = ids[:]
            random.Random(seed).shuffle(shuffled)
            assert partition(resolve_identities(shuffled)) == partition(reference)

    def test_transitive_merging_through_chain(self):
        # a~b and b~c but a and c are farther apart than the threshold
        a, b, c = "abcdefghij", "abcdefgh", "abcdef"
        assert levenshtein(a, b) <= 0.3 * len(a)
        assert levenshtein(b, c) <= 0.3 * len(b)
        assert levenshtein(a, c) > 0.3 * len(a)
        ids = [RawIdentity(a, "1@x.com"), RawIdentity(b, "2@x.com"), RawIdentity(c, "3@x.com")]
        resolved = resolve_identities(ids)
        assert len(set(resolved.values())) == 1


class TestCanonicalizeHistory:
    def test_planted_aliases_collapse(self):
        history = make_history(
            [
                ("ana@x.com", 0, [add("a.py", "x = 1\n")]),
                ("ANA@x.com", 1, [mod("a.py", "x = 1\n", "x = 2\n")]),
                ("ana@x.com", 2, [mod("a.py", "x = 2\n", "x = 3\n")]),
                ("bo@y.com", 3, [add("b.py", "y = 1\n")]),
                ("ana@x.com", 4, [mod("a.py", "x = 3\n", "x = 4\n")]),
            ]
        )
        canonical = canonicalize_history(history)
        authors = {c.author.email for c in canonical.commits}
        assert authors == {"ana@x.com", "bo@y.com"}
        assert [c.changes for c in canonical.commits] == [c.changes for c in history.commits]

    def test_no_aliases_is_fixed_point(self):
        history = make_history(
            [
                ("ana@x.com", 0, [add("a.py", "x = 1\n")]),
                ("bo@y.com", 1, [add("b.py", "y = 1\n")]),
            ]
        )
        canonical = canonicalize_history(history)
        assert [c.author.email for c in canonical.commits] == ["ana@x.com", "bo@y.com"]

    def test_empty_history(self):
        history = make_history([])
        canonical = canonicalize_history(history)
        assert canonical.commits == ()


def test_resolve_requires_no_crash_on_single(demo_history):
    # the demo repo plants one alias pair by email case and one by name
    authors = {c.author.email for c in demo_history.commits}
    assert authors == {"alice@dev.example.com", "bob@example.com", "carol@example.com"}


def test_alias_threshold_zero_disables_name_merging():
    ids = [RawIdentity("jsmith", "a@x.com"), RawIdentity("j smith", "b@y.com")]
    resolved = resolve_identities(ids, threshold=0.0)
    assert len(set(resolved.values())) == 2


@pytest.mark.parametrize(
    "a,b,expected",
    [("abc", "", 3), ("", "", 0), ("ab", "ba", 2), ("flaw", "lawn", 2)],
)
def test_levenshtein_cases(a, b, expected):
    assert levenshtein(a, b) == expected
