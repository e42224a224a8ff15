"""Study support: corpus filtering, bulk-import detection, survey sampling
and ground-truth processing."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .errors import InvalidKnowledgeValue, TooFewRepos
from .expertise import OracleSets
from .features import FeatureTable
from .gitlog import ADDITION, CommitHistory, resolve_lineages
from .ml import MLDataset

GROUND_TRUTH_COLUMNS = ("repo", "developer_email", "file", "knowledge")
EXPERT_KNOWLEDGE_FLOOR = 4  # declared expert means knowledge > 3


@dataclass(frozen=True)
class RepoMetrics:
    repo: str
    commits: int
    files: int
    developers: int


@dataclass(frozen=True)
class GroundTruthEntry:
    repo: str
    developer: str  # email as answered; resolved to a canonical key on join
    file: str
    knowledge: int

    def __post_init__(self):
        if not 1 <= self.knowledge <= 5:
            raise InvalidKnowledgeValue(
                f"knowledge {self.knowledge} for ({self.developer}, {self.file}) "
                "is outside 1..5"
            )

    @property
    def label(self) -> str:
        return "expert" if self.knowledge >= EXPERT_KNOWLEDGE_FLOOR else "non_expert"


@dataclass(frozen=True)
class UnresolvedPair:
    repo: str
    developer: str
    file: str
    reason: str


@dataclass(frozen=True)
class ProcessedAnswers:
    oracle: OracleSets
    dataset: MLDataset
    unresolved: tuple[UnresolvedPair, ...]


def quartile_filter(metrics: Iterable[RepoMetrics]) -> set[str]:
    """Repositories surviving the first-quartile cut on every metric.

    Q1 uses linear interpolation between order statistics; a repository is
    removed when any of its three metrics falls strictly below that
    metric's Q1.
    """
    metrics = list(metrics)
    if len(metrics) < 4:
        raise TooFewRepos(f"need at least 4 repositories, got {len(metrics)}")
    survivors = {m.repo for m in metrics}
    for attribute in ("commits", "files", "developers"):
        values = [getattr(m, attribute) for m in metrics]
        q1 = float(np.quantile(values, 0.25))
        survivors &= {m.repo for m in metrics if getattr(m, attribute) >= q1}
    return survivors


def detect_bulk_import(history: CommitHistory) -> tuple[bool, frozenset[str]]:
    """Flag repositories whose files mostly arrived in outlier commits.

    Outliers of the files-added-per-commit distribution are commits above
    the upper Tukey fence (Q3 + 1.5 IQR). The flag raises when those
    commits account for more than half of all file additions.
    """
    adds = {c.id: sum(1 for ev in c.changes if ev.change_kind == ADDITION) for c in history.commits}
    if not adds:
        return False, frozenset()
    counts = np.array(list(adds.values()), dtype=float)
    q1, q3 = np.quantile(counts, [0.25, 0.75])
    fence = q3 + 1.5 * (q3 - q1)
    outliers = frozenset(cid for cid, n in adds.items() if n > fence)
    total = counts.sum()
    outlier_total = sum(adds[cid] for cid in outliers)
    return bool(total > 0 and outlier_total > 0.5 * total), outliers


def generate_sample(
    history: CommitHistory, file_limit: int = 5, seed: int = 0
) -> list[tuple[str, str]]:
    """Draw (developer, file) survey pairs under a per-developer file cap.

    Files are visited in a seeded random order; a file is accepted only if
    every developer who touched it is still below the cap, in which case it
    is assigned to all of them. This keeps each sampled file answerable by
    its full developer set.
    """
    if file_limit < 1:
        raise ValueError(f"file_limit must be >= 1, got {file_limit}")
    lineages = resolve_lineages(history)
    files = sorted(
        path
        for path in lineages
        if history.present_paths is None or path in history.present_paths
    )
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(files))
    assigned: dict[str, int] = {}
    pairs: list[tuple[str, str]] = []
    for index in order:
        file = files[index]
        developers = sorted({commit.author.key() for commit, _ev in lineages[file].events})
        if all(assigned.get(dev, 0) < file_limit for dev in developers):
            for dev in developers:
                assigned[dev] = assigned.get(dev, 0) + 1
                pairs.append((dev, file))
    return pairs


def sample_to_csv(pairs: list[tuple[str, str]]) -> str:
    """Survey sample CSV grouped by developer."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["developer_email", "file"])
    by_dev: dict[str, list[str]] = {}
    for dev, file in pairs:
        by_dev.setdefault(dev, []).append(file)
    for dev in sorted(by_dev):
        for file in by_dev[dev]:
            writer.writerow([dev, file])
    return buf.getvalue()


def read_ground_truth_csv(
    path: str | Path, column_map: Mapping[str, str] | None = None
) -> list[GroundTruthEntry]:
    """Read a ground-truth CSV (repo,developer_email,file,knowledge).

    ``column_map`` adapts external headers, mapping each logical column
    name to the header actually present in the file.
    """
    column_map = dict(column_map or {})
    names = {logical: column_map.get(logical, logical) for logical in GROUND_TRUTH_COLUMNS}
    entries = []
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        missing = [c for c in names.values() if reader.fieldnames and c not in reader.fieldnames]
        if missing:
            raise ValueError(f"ground-truth CSV lacks columns {missing}")
        for record in reader:
            raw = record[names["knowledge"]].strip()
            try:
                knowledge = int(raw)
            except ValueError:
                raise InvalidKnowledgeValue(f"knowledge {raw!r} is not an integer")
            entries.append(
                GroundTruthEntry(
                    repo=record[names["repo"]].strip(),
                    developer=record[names["developer_email"]].strip(),
                    file=record[names["file"]].strip(),
                    knowledge=knowledge,
                )
            )
    return entries


def _email_resolver(table: FeatureTable) -> dict[str, str]:
    email_to_key: dict[str, str] = {}
    for dev in table.developers().values():
        email_to_key[dev.canonical_key] = dev.canonical_key
        for email in dev.emails:
            email_to_key[email.lower()] = dev.canonical_key
    return email_to_key


def knowledge_map(
    entries: Iterable[GroundTruthEntry], table: FeatureTable
) -> tuple[dict[tuple[str, str], int], tuple[UnresolvedPair, ...]]:
    """Join raw 1..5 knowledge answers onto canonical (developer, file)
    pairs of the feature table; unmatched answers are reported."""
    email_to_key = _email_resolver(table)
    pair_map = table.pair_map()
    resolved: dict[tuple[str, str], int] = {}
    unresolved: list[UnresolvedPair] = []
    for entry in entries:
        key = email_to_key.get(entry.developer.strip().lower())
        if key is None:
            unresolved.append(
                UnresolvedPair(entry.repo, entry.developer, entry.file, "unknown developer")
            )
        elif (key, entry.file) not in pair_map:
            unresolved.append(
                UnresolvedPair(entry.repo, entry.developer, entry.file, "pair not in history")
            )
        else:
            resolved[(key, entry.file)] = entry.knowledge
    return resolved, tuple(unresolved)


def process_answers(
    entries: Iterable[GroundTruthEntry], table: FeatureTable
) -> ProcessedAnswers:
    """Join survey answers with the feature table.

    Knowledge above 3 lands in the declared-expert set, the rest in the
    declared-non-expert set. Answers whose developer or file cannot be
    matched against the table are reported, never silently dropped. A pair
    answered twice keeps its last answer.
    """
    pair_map = table.pair_map()
    labeled, unresolved = knowledge_map(entries, table)
    experts = frozenset(p for p, k in labeled.items() if k >= EXPERT_KNOWLEDGE_FLOOR)
    non_experts = frozenset(p for p, k in labeled.items() if k < EXPERT_KNOWLEDGE_FLOOR)
    ordered = sorted(labeled)
    features = np.array(
        [
            [
                pair_map[pair].adds,
                pair_map[pair].fa,
                pair_map[pair].size,
                pair_map[pair].num_days,
            ]
            for pair in ordered
        ],
        dtype=float,
    ).reshape(len(ordered), 4)
    dataset = MLDataset(
        features=features,
        labels=np.array([pair in experts for pair in ordered], dtype=bool),
        developers=tuple(pair[0] for pair in ordered),
        files=tuple(pair[1] for pair in ordered),
    )
    return ProcessedAnswers(
        oracle=OracleSets(declared_experts=experts, declared_non_experts=non_experts),
        dataset=dataset,
        unresolved=unresolved,
    )
