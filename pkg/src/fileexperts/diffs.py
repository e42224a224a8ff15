"""Line diffing, change classification, conditional counting, and blame.

The line diff uses a longest-common-subsequence alignment with a fixed,
documented tie-breaking rule so that results are reproducible and can be
checked against an independent implementation:

1. the longest common prefix is matched first;
2. the longest common suffix of the remainders is matched next;
3. the middle is aligned by LCS dynamic programming, walking from the
   front: equal head lines are always matched, and otherwise a removal is
   emitted before an addition whenever the suffix LCS lengths tie or favor
   the removal (``L[i+1][j] >= L[i][j+1]``).

Any implementation following these three rules produces identical hunks.

A removed/added line pair within a hunk counts as a *modification* when the
edit distance between the two lines is below 40% of the removed line's
length (strict inequality, whitespace significant). Blame replay transfers
authorship of both added and modified lines to the committing author.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import FileNotInHistory, InvalidThreshold, UnknownLanguage
from .gitlog import ADDITION, CommitHistory, resolve_lineages
from .identities import levenshtein
from .languages import LanguageConfig, LanguageSpec, default_language_config

MOD_THRESHOLD = 0.40


@dataclass(frozen=True)
class DiffHunk:
    """A maximal run of non-matching lines.

    ``before_start`` / ``after_start`` are the line indices where the hunk
    begins in each version, which makes hunks applicable in order.
    """

    before_start: int
    after_start: int
    removed: tuple[str, ...]
    added: tuple[str, ...]


@dataclass(frozen=True)
class ChangeStats:
    adds: int = 0
    dels: int = 0
    mods: int = 0
    conds: int = 0

    def __add__(self, other: "ChangeStats") -> "ChangeStats":
        return ChangeStats(
            self.adds + other.adds,
            self.dels + other.dels,
            self.mods + other.mods,
            self.conds + other.conds,
        )


@dataclass(frozen=True)
class BlameState:
    """Per-line authorship of a file at the replayed reference version.

    Authors are canonical developer keys (emails) taken from the commit
    records of the replayed history.
    """

    file: str
    lines: tuple[tuple[str, str], ...]  # (line text, author key)

    def counts(self) -> dict[str, int]:
        totals: dict[str, int] = {}
        for _text, author in self.lines:
            totals[author] = totals.get(author, 0) + 1
        return totals


def split_lines(text: str | None) -> list[str]:
    return [] if not text else text.splitlines()


def diff_lines(before: Sequence[str], after: Sequence[str]) -> list[DiffHunk]:
    """Canonical LCS diff over already-split line sequences."""
    n, m = len(before), len(after)

    prefix = 0
    limit = min(n, m)
    while prefix < limit and before[prefix] == after[prefix]:
        prefix += 1
    suffix = 0
    while suffix < limit - prefix and before[n - 1 - suffix] == after[m - 1 - suffix]:
        suffix += 1

    mid_before = before[prefix : n - suffix]
    mid_after = after[prefix : m - suffix]
    if not mid_before and not mid_after:
        return []

    # intern lines so the DP compares small ints
    ids: dict[str, int] = {}
    a = [ids.setdefault(line, len(ids)) for line in mid_before]
    b = [ids.setdefault(line, len(ids)) for line in mid_after]
    nb, na = len(a), len(b)

    # L[i][j] = LCS length of a[i:], b[j:]
    lcs = [[0] * (na + 1) for _ in range(nb + 1)]
    for i in range(nb - 1, -1, -1):
        row = lcs[i]
        below = lcs[i + 1]
        ai = a[i]
        for j in range(na - 1, -1, -1):
            if ai == b[j]:
                row[j] = below[j + 1] + 1
            else:
                bj = below[j]
                rj = row[j + 1]
                row[j] = bj if bj >= rj else rj

    hunks: list[DiffHunk] = []
    removed: list[str] = []
    added: list[str] = []
    start_i = start_j = 0
    i = j = 0

    def close_hunk() -> None:
        nonlocal removed, added
        if removed or added:
            hunks.append(
                DiffHunk(
                    before_start=prefix + start_i,
                    after_start=prefix + start_j,
                    removed=tuple(removed),
                    added=tuple(added),
                )
            )
            removed, added = [], []

    while i < nb or j < na:
        if i < nb and j < na and a[i] == b[j]:
            close_hunk()
            i += 1
            j += 1
        else:
            if not removed and not added:
                start_i, start_j = i, j
            if j >= na or (i < nb and lcs[i + 1][j] >= lcs[i][j + 1]):
                removed.append(mid_before[i])
                i += 1
            else:
                added.append(mid_after[j])
                j += 1
    close_hunk()
    return hunks


def line_diff(before: str | None, after: str | None) -> list[DiffHunk]:
    """Diff two file contents into hunks (see module docstring for the
    alignment rule). Empty or missing content diffs as zero lines."""
    return diff_lines(split_lines(before), split_lines(after))


def apply_hunks(before: Sequence[str], hunks: Iterable[DiffHunk]) -> list[str]:
    """Reconstruct the after-version lines from the before-version lines."""
    out: list[str] = []
    cursor = 0
    for hunk in hunks:
        out.extend(before[cursor : hunk.before_start])
        out.extend(hunk.added)
        cursor = hunk.before_start + len(hunk.removed)
    out.extend(before[cursor:])
    return out


def is_modification_pair(removed: str, added: str, mod_threshold: float = MOD_THRESHOLD) -> bool:
    """True when editing `removed` into `added` stays below the threshold
    fraction of the removed line's length. An empty removed line can never
    be modified (strict inequality against zero)."""
    return levenshtein(removed, added) < mod_threshold * len(removed)


def classify_changes(
    hunks: Iterable[DiffHunk],
    mod_threshold: float = MOD_THRESHOLD,
    language: str | None = None,
    config: LanguageConfig | None = None,
) -> ChangeStats:
    """Classify hunk lines into adds, dels and mods, and count conditionals.

    Removed and added lines are paired positionally up to the shorter side
    of each hunk; a pair under the edit-distance threshold counts as one
    modification, otherwise as one delete plus one add. Leftover lines are
    pure adds or dels. Conditionals are counted over the lines classified
    as adds, when a language is given.
    """
    if not 0.0 <= mod_threshold <= 1.0:
        raise InvalidThreshold(f"mod_threshold {mod_threshold} outside [0, 1]")
    adds = dels = mods = 0
    added_lines: list[str] = []
    for hunk in hunks:
        paired = min(len(hunk.removed), len(hunk.added))
        for idx in range(paired):
            if is_modification_pair(hunk.removed[idx], hunk.added[idx], mod_threshold):
                mods += 1
            else:
                dels += 1
                adds += 1
                added_lines.append(hunk.added[idx])
        dels += len(hunk.removed) - paired
        adds += len(hunk.added) - paired
        added_lines.extend(hunk.added[paired:])
    conds = count_conditionals(added_lines, language, config) if language else 0
    return ChangeStats(adds=adds, dels=dels, mods=mods, conds=conds)


_WORD_RE_CACHE: dict[tuple[str, ...], re.Pattern] = {}


def _keyword_pattern(keywords: tuple[str, ...]) -> re.Pattern:
    if keywords not in _WORD_RE_CACHE:
        alternatives = "|".join(re.escape(k) for k in keywords)
        _WORD_RE_CACHE[keywords] = re.compile(rf"\b(?:{alternatives})\b")
    return _WORD_RE_CACHE[keywords]


def _strip_strings_and_comments(line: str, spec: LanguageSpec) -> str:
    """Blank out string literals and cut the line at a comment marker.

    This is a line-local lexical scan: block comments and multi-line
    strings are not tracked, which keeps the counter cheap and language
    agnostic.
    """
    out: list[str] = []
    i = 0
    quote: str | None = None
    while i < len(line):
        ch = line[i]
        if quote is not None:
            if ch == "\\":
                i += 2
                out.append("  ")
                continue
            if ch == quote:
                quote = None
            out.append(" ")
            i += 1
            continue
        marker = next((m for m in spec.line_comments if line.startswith(m, i)), None)
        if marker is not None:
            break
        if ch in spec.string_quotes:
            quote = ch
            out.append(" ")
            i += 1
            continue
        out.append(ch)
        i += 1
    return "".join(out)


def count_conditionals(
    lines: Iterable[str],
    language: str | None,
    config: LanguageConfig | None = None,
) -> int:
    """Count conditional-statement occurrences across lines.

    Keywords come from the per-language table; occurrences inside line
    comments and string literals are excluded. Languages with a ternary
    operator also count ``?`` occurrences.
    """
    if language is None:
        raise UnknownLanguage("count_conditionals requires a language tag")
    config = config or default_language_config()
    spec = config.spec(language)
    pattern = _keyword_pattern(spec.conditional_keywords)
    total = 0
    for line in lines:
        code = _strip_strings_and_comments(line, spec)
        total += len(pattern.findall(code))
        if spec.count_ternary:
            total += code.count("?")
    return total


def blame_from_events(events) -> list[tuple[str, str]]:
    """Replay (commit, event) pairs of one lineage into per-line authorship.

    Lines added or modified by a commit are credited to its author;
    untouched lines keep their previous author. The replayed content equals
    the file at the last non-merge commit that touched it, which is the
    file's reference version under this model.
    """
    lines: list[str] = []
    authors: list[str] = []
    for commit, event in events:
        author = commit.author.key()
        after = split_lines(event.after_content)
        if event.change_kind == ADDITION or not authors:
            # creation (or re-creation, or a lineage whose head was filtered
            # away): every current line belongs to this commit's author
            lines = after
            authors = [author] * len(after)
            continue
        hunks = diff_lines(lines, after)
        new_lines: list[str] = []
        new_authors: list[str] = []
        cursor = 0
        for hunk in hunks:
            new_lines.extend(lines[cursor : hunk.before_start])
            new_authors.extend(authors[cursor : hunk.before_start])
            new_lines.extend(hunk.added)
            new_authors.extend([author] * len(hunk.added))
            cursor = hunk.before_start + len(hunk.removed)
        new_lines.extend(lines[cursor:])
        new_authors.extend(authors[cursor:])
        lines, authors = new_lines, new_authors
    return list(zip(lines, authors))


def replay_blame(history: CommitHistory, file: str) -> BlameState:
    """Per-line authorship of a file at the reference version."""
    lineages = resolve_lineages(history)
    lineage = lineages.get(file)
    if lineage is None or (
        history.present_paths is not None and file not in history.present_paths
    ):
        raise FileNotInHistory(f"{file!r} does not exist at the reference version")
    return BlameState(file=file, lines=tuple(blame_from_events(lineage.events)))
