"""Diff alignment, change classification, conditionals, and blame replay."""

import subprocess

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fileexperts.diffs import (
    apply_hunks,
    classify_changes,
    count_conditionals,
    line_diff,
    replay_blame,
    split_lines,
)
from fileexperts.errors import FileNotInHistory, InvalidThreshold, UnknownLanguage
from fileexperts.fixtures import RepoBuilder
from fileexperts.gitlog import extract_history
from conftest import add, make_history, mod
from oracles import lev_matrix, naive_diff

# small alphabets force collisions, which is where alignments get interesting
line_strategy = st.lists(
    st.sampled_from(["alpha", "beta", "gamma", "x", "y", ""]), max_size=20
)


class TestLineDiff:
    def test_identical_texts(self):
        assert line_diff("a\nb\nc", "a\nb\nc") == []

    def test_pure_addition(self):
        hunks = line_diff("", "one\ntwo\nthree\n")
        assert len(hunks) == 1
        assert hunks[0].removed == ()
        assert hunks[0].added == ("one", "two", "three")

    def test_single_line_replacement(self):
        before = "l1\nl2\nl3\nl4\nl5\n"
        after = "l1\nl2\nCHANGED\nl4\nl5\n"
        hunks = line_diff(before, after)
        assert len(hunks) == 1
        assert hunks[0].removed == ("l3",)
        assert hunks[0].added == ("CHANGED",)
        assert hunks[0].before_start == 2

    @given(line_strategy, line_strategy)
    def test_reconstruction(self, before, after):
        hunks = line_diff("\n".join(before), "\n".join(after))
        rebuilt = apply_hunks(split_lines("\n".join(before)), hunks)
        assert rebuilt == split_lines("\n".join(after))

    @given(line_strategy, line_strategy)
    def test_matches_naive_oracle(self, before, after):
        ours = line_diff("\n".join(before), "\n".join(after))
        theirs = naive_diff(split_lines("\n".join(before)), split_lines("\n".join(after)))
        assert [
            (h.before_start, h.after_start, list(h.removed), list(h.added)) for h in ours
        ] == theirs

    def test_no_empty_hunks(self):
        for hunk in line_diff("a\nb\nc\nd", "a\nx\nc\ny"):
            assert hunk.removed or hunk.added


class TestClassifyChanges:
    def test_small_edit_is_modification(self):
        hunks = line_diff("int x = 0;", "int x = 1;")
        stats = classify_changes(hunks)
        # distance 1 < 0.4 * 10
        assert lev_matrix("int x = 0;", "int x = 1;") == 1
        assert (stats.adds, stats.dels, stats.mods) == (0, 0, 1)

    def test_rewrite_is_delete_plus_add(self):
        hunks = line_diff("alpha", "zzzzz")
        stats = classify_changes(hunks)
        # distance 5 >= 0.4 * 5
        assert lev_matrix("alpha", "zzzzz") == 5
        assert (stats.adds, stats.dels, stats.mods) == (1, 1, 0)

    def test_unpaired_lines_are_pure_adds(self):
        hunks = line_diff("", "a\nb")
        stats = classify_changes(hunks)
        assert (stats.adds, stats.dels, stats.mods) == (2, 0, 0)

    def test_empty_removed_line_never_modified(self):
        hunks = line_diff("keep\n\nkeep2", "keep\nfilled\nkeep2")
        stats = classify_changes(hunks)
        assert stats.mods == 0
        assert stats.adds == 1 and stats.dels == 1

    def test_invalid_threshold(self):
        with pytest.raises(InvalidThreshold):
            classify_changes([], mod_threshold=1.5)

    @given(line_strategy, line_strategy)
    @settings(max_examples=60)
    def test_conservation(self, before, after):
        hunks = line_diff("\n".join(before), "\n".join(after))
        stats = classify_changes(hunks)
        total_hunk_lines = sum(len(h.removed) + len(h.added) for h in hunks)
        assert stats.adds + stats.dels + 2 * stats.mods == total_hunk_lines


class TestCountConditionals:
    def test_c_family_if(self):
        assert count_conditionals(["if (x > 0) {"], "java") == 1

    def test_comment_excluded(self):
        assert count_conditionals(["// if disabled"], "java") == 0

    def test_python_elif_counts_else_does_not(self):
        assert count_conditionals(["elif x:", "else:"], "python") == 1

    def test_string_literal_excluded(self):
        assert count_conditionals(['print("if x")'], "python") == 0
        assert count_conditionals(["msg = 'case one'"], "java") == 0

    def test_ternary_counts_where_configured(self):
        assert count_conditionals(["return x > 0 ? a : b;"], "javascript") == 1
        assert count_conditionals(["maybe = '?'"], "python") == 0

    def test_ruby_keywords(self):
        assert count_conditionals(["return 1 unless ready", "when :x then 2"], "ruby") == 2

    def test_keyword_inside_identifier_ignored(self):
        assert count_conditionals(["verify(x)", "lowercase = 1"], "java") == 0

    def test_unknown_language(self):
        with pytest.raises(UnknownLanguage):
            count_conditionals(["if x:"], "cobol")
        with pytest.raises(UnknownLanguage):
            count_conditionals(["if x:"], None)


class TestReplayBlame:
    def test_single_author_owns_everything(self):
        history = make_history([("d1@x.com", 0, [add("a.py", "l1\nl2\nl3\n")])])
        blame = replay_blame(history, "a.py")
        assert blame.counts() == {"d1@x.com": 3}

    def test_modification_transfers_authorship(self):
        before = "\n".join(f"line_{i} = {i}" for i in range(10)) + "\n"
        after = before.replace("line_3 = 3", "line_3 = 30")
        history = make_history(
            [
                ("d1@x.com", 0, [add("a.py", before)]),
                ("d2@x.com", 1, [mod("a.py", before, after)]),
            ]
        )
        blame = replay_blame(history, "a.py")
        assert blame.counts() == {"d1@x.com": 9, "d2@x.com": 1}
        assert dict(blame.lines)["line_3 = 30"] == "d2@x.com"

    def test_deleted_file_raises(self):
        history = make_history(
            [("d1@x.com", 0, [add("a.py", "x\n")])], present=set()
        )
        with pytest.raises(FileNotInHistory):
            replay_blame(history, "a.py")
        with pytest.raises(FileNotInHistory):
            replay_blame(history, "never_existed.py")

    def test_totals_equal_size(self):
        v1 = "a = 1\nb = 2\n"
        v2 = "a = 1\nb = 2\nc = 3\nd = 4\n"
        v3 = "a = 9\nb = 2\nc = 3\nd = 4\n"
        history = make_history(
            [
                ("d1@x.com", 0, [add("a.py", v1)]),
                ("d2@x.com", 1, [mod("a.py", v1, v2)]),
                ("d3@x.com", 2, [mod("a.py", v2, v3)]),
            ]
        )
        blame = replay_blame(history, "a.py")
        assert sum(blame.counts().values()) == len(blame.lines) == 4

    def test_agrees_with_git_blame_without_modifications(self, tmp_path):
        # pure insertions with unique lines: any LCS-equivalent tool must
        # attribute identically
        repo = RepoBuilder(tmp_path / "repo")
        v1 = "u_one = 1\nu_two = 2\nu_three = 3\n"
        v2 = "u_zero = 0\nu_one = 1\nu_two = 2\nu_three = 3\n"
        v3 = "u_zero = 0\nu_one = 1\nu_mid = 9\nu_two = 2\nu_three = 3\nu_tail = 4\n"
        repo.commit("Ana", "ana@x.com", 1_600_000_000, writes={"a.py": v1})
        repo.commit("Bo", "bo@y.com", 1_600_100_000, writes={"a.py": v2})
        repo.commit("Cy", "cy@z.com", 1_600_200_000, writes={"a.py": v3})
        path = repo.finish()

        history = extract_history(path, "main")
        ours = [author for _line, author in replay_blame(history, "a.py").lines]

        out = subprocess.run(
            ["git", "-C", str(path), "blame", "--line-porcelain", "main", "--", "a.py"],
            capture_output=True,
            text=True,
        ).stdout
        theirs = [
            line.removeprefix("author-mail <").removesuffix(">")
            for line in out.splitlines()
            if line.startswith("author-mail ")
        ]
        assert ours == theirs


def test_rename_only_event_keeps_blame():
    content = "x = 1\ny = 2\n"
    history = make_history(
        [
            ("d1@x.com", 0, [add("a.py", content)]),
            ("d2@x.com", 1, [("rename", "b.py", "a.py", content, content)]),
        ]
    )
    blame = replay_blame(history, "b.py")
    assert blame.counts() == {"d1@x.com": 2}
