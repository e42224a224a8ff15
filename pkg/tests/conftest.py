"""Shared fixtures: real git repositories and synthetic histories."""

from __future__ import annotations

from datetime import datetime, timedelta, timezone

import pytest

from fileexperts.fixtures import demo_repo
from fileexperts.gitlog import (
    CommitHistory,
    CommitRecord,
    FileChangeEvent,
    RawIdentity,
    extract_history,
    filter_source_files,
)
from fileexperts.identities import canonicalize_history

BASE_TIME = datetime(2021, 1, 1, tzinfo=timezone.utc)


def make_history(
    commits: list[tuple[str, float, list[tuple]]],
    present: set[str] | None = None,
    branch: str = "main",
) -> CommitHistory:
    """Build a CommitHistory directly, without git.

    ``commits`` holds (author_email, day_offset, events) where each event
    is (kind, path, old_path, before_content, after_content). The reference
    time is the last commit's timestamp; present paths default to every
    path that ever appears.
    """
    records = []
    seen_paths = set()
    for index, (email, day, events) in enumerate(commits):
        changes = []
        for kind, path, old_path, before, after in events:
            changes.append(
                FileChangeEvent(
                    path=path,
                    change_kind=kind,
                    old_path=old_path,
                    before_content=before,
                    after_content=after,
                )
            )
            seen_paths.add(path)
        records.append(
            CommitRecord(
                id=f"c{index:04d}",
                author=RawIdentity(name=email.split("@")[0], email=email),
                timestamp=BASE_TIME + timedelta(days=day),
                changes=tuple(changes),
            )
        )
    reference = max((r.timestamp for r in records), default=BASE_TIME)
    return CommitHistory(
        commits=tuple(records),
        branch=branch,
        reference_time=reference,
        present_paths=frozenset(present if present is not None else seen_paths),
    )


def add(path: str, content: str) -> tuple:
    return ("addition", path, None, None, content)


def mod(path: str, before: str, after: str) -> tuple:
    return ("modification", path, None, before, after)


def ren(path: str, old: str, before: str, after: str) -> tuple:
    return ("rename", path, old, before, after)


@pytest.fixture(scope="session")
def demo_repo_path(tmp_path_factory):
    return demo_repo(tmp_path_factory.mktemp("demo") / "repo")


@pytest.fixture(scope="session")
def demo_history(demo_repo_path):
    history = extract_history(demo_repo_path, "main")
    return canonicalize_history(filter_source_files(history))
