"""Compute the twelve development variables per (developer, file) pair.

All variables are evaluated at the history's reference version. A pair
exists exactly when the developer has at least one non-merge commit on the
file's lineage. Change counters (adds, dels, mods, conds) classify each
commit's recorded before/after contents; blame and size come from replaying
the lineage.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from .diffs import MOD_THRESHOLD, blame_from_events, classify_changes, line_diff
from .errors import FileNotInHistory, PairNotInHistory
from .fileio import atomic_write_text
from .gitlog import CommitHistory, Lineage, resolve_lineages
from .identities import DeveloperId
from .languages import LanguageConfig, default_language_config

FEATURE_NAMES = (
    "adds",
    "dels",
    "mods",
    "conds",
    "amount",
    "fa",
    "blame",
    "num_commits",
    "num_days",
    "num_mod_devs",
    "size",
    "avg_days_commits",
)

CSV_HEADER = ("developer", "file") + FEATURE_NAMES

_SECONDS_PER_DAY = 86400.0


@dataclass(frozen=True)
class FeatureVector:
    adds: int
    dels: int
    mods: int
    conds: int
    amount: int  # adds + dels
    fa: int  # 1 iff the developer created the lineage head
    blame: int  # surviving lines at the reference version
    num_commits: int
    num_days: int  # whole days since the developer's last commit (floor)
    num_mod_devs: int  # distinct other developers committing afterwards
    size: int  # file lines at the reference version
    avg_days_commits: float  # mean gap between consecutive commits, in days

    def as_tuple(self) -> tuple:
        return tuple(getattr(self, name) for name in FEATURE_NAMES)


@dataclass(frozen=True)
class FeatureRow:
    developer: DeveloperId
    file: str
    features: FeatureVector


@dataclass(frozen=True)
class FeatureTable:
    rows: tuple[FeatureRow, ...]
    reference_time: datetime

    def pair_map(self) -> dict[tuple[str, str], FeatureVector]:
        return {(row.developer.canonical_key, row.file): row.features for row in self.rows}

    def files(self) -> list[str]:
        return sorted({row.file for row in self.rows})

    def developers(self) -> dict[str, DeveloperId]:
        return {row.developer.canonical_key: row.developer for row in self.rows}


def _developer_ids(history: CommitHistory) -> dict[str, DeveloperId]:
    """Developer objects per canonical key, from metadata when the history
    was canonicalized, otherwise synthesized from the raw authors."""
    meta = history.metadata.get("identities") if history.metadata else None
    ids: dict[str, DeveloperId] = {}
    if isinstance(meta, dict):
        for key, entry in meta.items():
            ids[key] = DeveloperId(
                canonical_key=key,
                display_name=entry.get("display_name", key),
                emails=frozenset(entry.get("emails", [key])),
                names=frozenset(entry.get("names", [])),
            )
    for commit in history.commits:
        key = commit.author.key()
        if key not in ids:
            ids[key] = DeveloperId(
                canonical_key=key,
                display_name=commit.author.name or key,
                emails=frozenset([key]),
                names=frozenset([commit.author.name] if commit.author.name else []),
            )
    return ids


def _file_features(
    history: CommitHistory,
    lineage: Lineage,
    config: LanguageConfig,
    mod_threshold: float,
) -> dict[str, FeatureVector]:
    """All developers' feature vectors for one file lineage."""
    language = config.language_of(lineage.path)
    reference = history.reference_time

    order: list[str] = []  # event authors in replay order
    stats: dict[str, list[int]] = {}  # author -> [adds, dels, mods, conds]
    times: dict[str, list[datetime]] = {}
    for commit, event in lineage.events:
        author = commit.author.key()
        order.append(author)
        hunks = line_diff(event.before_content, event.after_content)
        changed = classify_changes(hunks, mod_threshold, language=language, config=config)
        acc = stats.setdefault(author, [0, 0, 0, 0])
        acc[0] += changed.adds
        acc[1] += changed.dels
        acc[2] += changed.mods
        acc[3] += changed.conds
        times.setdefault(author, []).append(commit.timestamp)

    blame_lines = blame_from_events(lineage.events)
    blame_counts: dict[str, int] = {}
    for _text, author in blame_lines:
        blame_counts[author] = blame_counts.get(author, 0) + 1
    size = len(blame_lines)
    creator = order[0]

    vectors: dict[str, FeatureVector] = {}
    for author, (adds, dels, mods, conds) in stats.items():
        stamps = sorted(times[author])
        num_commits = len(stamps)
        num_days = int((reference - stamps[-1]).total_seconds() // _SECONDS_PER_DAY)
        if num_commits > 1:
            gaps = [
                (b - a).total_seconds() / _SECONDS_PER_DAY
                for a, b in zip(stamps, stamps[1:])
            ]
            avg_days = sum(gaps) / len(gaps)
        else:
            avg_days = 0.0
        last_index = max(i for i, a in enumerate(order) if a == author)
        others_after = {a for a in order[last_index + 1 :] if a != author}
        vectors[author] = FeatureVector(
            adds=adds,
            dels=dels,
            mods=mods,
            conds=conds,
            amount=adds + dels,
            fa=int(author == creator),
            blame=blame_counts.get(author, 0),
            num_commits=num_commits,
            num_days=num_days,
            num_mod_devs=len(others_after),
            size=size,
            avg_days_commits=avg_days,
        )
    return vectors


def compute_features(
    history: CommitHistory,
    developer: DeveloperId | str,
    file: str,
    config: LanguageConfig | None = None,
    mod_threshold: float = MOD_THRESHOLD,
) -> FeatureVector:
    """Feature vector for one (developer, file) pair.

    Raises FileNotInHistory when the file is absent at the reference
    version and PairNotInHistory when the developer never touched it.
    """
    config = config or default_language_config()
    key = developer.canonical_key if isinstance(developer, DeveloperId) else developer
    lineages = resolve_lineages(history)
    lineage = lineages.get(file)
    if lineage is None or (
        history.present_paths is not None and file not in history.present_paths
    ):
        raise FileNotInHistory(f"{file!r} does not exist at the reference version")
    vectors = _file_features(history, lineage, config, mod_threshold)
    if key not in vectors:
        raise PairNotInHistory(f"{key!r} has no commits on {file!r}")
    return vectors[key]


def compute_all(
    history: CommitHistory,
    config: LanguageConfig | None = None,
    mod_threshold: float = MOD_THRESHOLD,
) -> FeatureTable:
    """One row per (developer, file) pair, ordered by file then developer."""
    config = config or default_language_config()
    ids = _developer_ids(history)
    lineages = resolve_lineages(history)
    rows: list[FeatureRow] = []
    for path in sorted(lineages):
        if history.present_paths is not None and path not in history.present_paths:
            continue
        vectors = _file_features(history, lineages[path], config, mod_threshold)
        for key in sorted(vectors):
            rows.append(FeatureRow(developer=ids[key], file=path, features=vectors[key]))
    rows.sort(key=lambda row: (row.file, row.developer.canonical_key))
    return FeatureTable(rows=tuple(rows), reference_time=history.reference_time)


# -- CSV interchange ----------------------------------------------------------

def feature_table_to_csv(table: FeatureTable) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in table.rows:
        writer.writerow(
            [row.developer.canonical_key, row.file, *row.features.as_tuple()]
        )
    return buf.getvalue()


def write_feature_csv(table: FeatureTable, path: str | Path) -> None:
    atomic_write_text(path, feature_table_to_csv(table))


def read_feature_csv(path: str | Path, reference_time: datetime | None = None) -> FeatureTable:
    """Load a feature CSV written by this library.

    Developers reloaded from CSV carry only their canonical key; display
    names and alias sets are not part of the interchange format.
    """
    text = Path(path).read_text("utf-8")
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(header) != CSV_HEADER:
        raise ValueError(f"unexpected feature CSV header: {header!r}")
    rows = []
    for record in reader:
        if not record:
            continue
        developer, file = record[0], record[1]
        values = record[2:]
        ints = [int(v) for v in values[:-1]]
        vector = FeatureVector(*ints, avg_days_commits=float(values[-1]))
        rows.append(
            FeatureRow(
                developer=DeveloperId(
                    canonical_key=developer,
                    display_name=developer,
                    emails=frozenset([developer]),
                    names=frozenset(),
                ),
                file=file,
                features=vector,
            )
        )
    return FeatureTable(
        rows=tuple(rows),
        reference_time=reference_time or datetime.fromtimestamp(0, tz=timezone.utc),
    )
