"""Corpus filtering, bulk-import detection, sampling, ground truth."""

import numpy as np
import pytest

from fileexperts.errors import InvalidKnowledgeValue, TooFewRepos
from fileexperts.features import compute_all
from fileexperts.study import (
    GroundTruthEntry,
    RepoMetrics,
    detect_bulk_import,
    generate_sample,
    knowledge_map,
    process_answers,
    quartile_filter,
    read_ground_truth_csv,
    sample_to_csv,
)
from conftest import add, make_history, mod


def _metrics(commits):
    return [
        RepoMetrics(repo=f"r{i}", commits=c, files=100, developers=50)
        for i, c in enumerate(commits)
    ]


class TestQuartileFilter:
    def test_hand_computed_q1(self):
        # commits 10,20,30,40: Q1 by linear interpolation is 17.5
        assert float(np.quantile([10, 20, 30, 40], 0.25)) == 17.5
        included = quartile_filter(_metrics([10, 20, 30, 40]))
        assert included == {"r1", "r2", "r3"}

    def test_identical_repos_all_retained(self):
        included = quartile_filter(_metrics([25, 25, 25, 25]))
        assert len(included) == 4

    def test_any_metric_rule(self):
        metrics = [
            RepoMetrics("big", commits=1000, files=500, developers=100),
            RepoMetrics("alsobig", commits=900, files=400, developers=90),
            RepoMetrics("medium", commits=800, files=300, developers=80),
            RepoMetrics("lowfiles", commits=950, files=10, developers=95),
        ]
        included = quartile_filter(metrics)
        assert "lowfiles" not in included

    def test_too_few(self):
        with pytest.raises(TooFewRepos):
            quartile_filter(_metrics([1, 2, 3]))

    def test_subset_of_input(self):
        metrics = _metrics([5, 10, 20, 40, 80, 160])
        included = quartile_filter(metrics)
        assert included <= {m.repo for m in metrics}

    def test_matches_recomputation_oracle(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            metrics = [
                RepoMetrics(
                    repo=f"r{i}",
                    commits=int(rng.integers(1, 1000)),
                    files=int(rng.integers(1, 500)),
                    developers=int(rng.integers(1, 200)),
                )
                for i in range(int(rng.integers(4, 15)))
            ]
            expected = set()
            q_commits = np.quantile([m.commits for m in metrics], 0.25)
            q_files = np.quantile([m.files for m in metrics], 0.25)
            q_devs = np.quantile([m.developers for m in metrics], 0.25)
            for m in metrics:
                if m.commits >= q_commits and m.files >= q_files and m.developers >= q_devs:
                    expected.add(m.repo)
            assert quartile_filter(metrics) == expected


class TestBulkImport:
    def test_uniform_additions_not_flagged(self):
        commits = [
            (f"d@x.com", i, [add(f"f{i}.py", "x = 1\n")]) for i in range(100)
        ]
        flag, outliers = detect_bulk_import(make_history(commits))
        assert flag is False
        assert outliers == frozenset()

    def test_single_huge_commit_flagged(self):
        commits = [(f"d@x.com", i, [add(f"f{i}.py", "x = 1\n")]) for i in range(99)]
        bulk = [add(f"bulk{j}.py", "y = 1\n") for j in range(200)]
        commits.append(("d@x.com", 99, bulk))
        flag, outliers = detect_bulk_import(make_history(commits))
        assert flag is True
        assert outliers == {"c0099"}

    def test_single_commit_history_not_flagged(self):
        history = make_history([("d@x.com", 0, [add("a.py", "x\n"), add("b.py", "y\n")])])
        flag, outliers = detect_bulk_import(history)
        assert flag is False
        assert outliers == frozenset()


def _sample_history():
    files = {}
    commits = []
    day = 0
    for i in range(8):
        content = f"v{i} = {i}\n"
        commits.append((f"solo@x.com", day, [add(f"solo{i}.py", content)]))
        day += 1
    commits.append(("a@x.com", day, [add("shared.py", "s = 1\n")]))
    commits.append(("b@y.com", day + 1, [mod("shared.py", "s = 1\n", "s = 2\n")]))
    return make_history(commits)


class TestGenerateSample:
    def test_single_shared_file(self):
        history = make_history(
            [
                ("d1@x.com", 0, [add("f.py", "x = 1\n")]),
                ("d2@y.com", 1, [mod("f.py", "x = 1\n", "x = 2\n")]),
            ]
        )
        pairs = generate_sample(history, file_limit=5, seed=0)
        assert sorted(pairs) == [("d1@x.com", "f.py"), ("d2@y.com", "f.py")]

    def test_file_limit_enforced(self):
        history = _sample_history()
        for seed in range(20):
            pairs = generate_sample(history, file_limit=5, seed=seed)
            per_dev = {}
            for dev, _file in pairs:
                per_dev[dev] = per_dev.get(dev, 0) + 1
            assert all(count <= 5 for count in per_dev.values())
            assert per_dev["solo@x.com"] == 5  # 8 candidate files, capped at 5

    def test_all_or_nothing_rule(self):
        # d1 gets saturated by solo files; a file shared with d2 must then
        # be rejected entirely, leaving d2 without that file too
        commits = [(f"d1@x.com", i, [add(f"only{i}.py", f"x{i} = 1\n")]) for i in range(5)]
        commits.append(("d1@x.com", 50, [add("shared.py", "s = 1\n")]))
        commits.append(("d2@y.com", 51, [mod("shared.py", "s = 1\n", "s = 2\n")]))
        history = make_history(commits)
        for seed in range(30):
            pairs = generate_sample(history, file_limit=5, seed=seed)
            sampled_files = {f for _d, f in pairs}
            if "shared.py" in sampled_files:
                assert ("d1@x.com", "shared.py") in pairs
                assert ("d2@y.com", "shared.py") in pairs

    def test_sampled_file_carries_all_developers(self):
        history = _sample_history()
        lineage_devs = {
            "shared.py": {"a@x.com", "b@y.com"},
        }
        pairs = generate_sample(history, file_limit=5, seed=3)
        by_file = {}
        for dev, file in pairs:
            by_file.setdefault(file, set()).add(dev)
        for file, devs in by_file.items():
            if file in lineage_devs:
                assert devs == lineage_devs[file]

    def test_csv_grouped_by_developer(self):
        pairs = [("b@y.com", "f1"), ("a@x.com", "f2"), ("a@x.com", "f3")]
        lines = sample_to_csv(pairs).splitlines()
        assert lines[0] == "developer_email,file"
        assert lines[1:] == ["a@x.com,f2", "a@x.com,f3", "b@y.com,f1"]


class TestGroundTruth:
    def test_label_boundary(self):
        assert GroundTruthEntry("r", "d@x.com", "f.py", 4).label == "expert"
        assert GroundTruthEntry("r", "d@x.com", "f.py", 3).label == "non_expert"

    def test_out_of_range_knowledge(self):
        with pytest.raises(InvalidKnowledgeValue):
            GroundTruthEntry("r", "d@x.com", "f.py", 6)
        with pytest.raises(InvalidKnowledgeValue):
            GroundTruthEntry("r", "d@x.com", "f.py", 0)

    def test_csv_reader_with_column_map(self, tmp_path):
        path = tmp_path / "truth.csv"
        path.write_text(
            "Project,Email,Path,Score\nrepo1,d@x.com,src/a.py,5\nrepo1,e@y.com,src/b.py,2\n"
        )
        entries = read_ground_truth_csv(
            path,
            column_map={
                "repo": "Project",
                "developer_email": "Email",
                "file": "Path",
                "knowledge": "Score",
            },
        )
        assert [e.knowledge for e in entries] == [5, 2]

    def test_process_answers_join(self):
        history = make_history(
            [
                ("d1@x.com", 0, [add("a.py", "x = 1\n")]),
                ("d2@y.com", 1, [mod("a.py", "x = 1\n", "x = 2\n")]),
            ]
        )
        table = compute_all(history)
        entries = [
            GroundTruthEntry("r", "d1@x.com", "a.py", 5),
            GroundTruthEntry("r", "d2@y.com", "a.py", 3),
            GroundTruthEntry("r", "ghost@z.com", "a.py", 4),
            GroundTruthEntry("r", "d1@x.com", "missing.py", 4),
        ]
        processed = process_answers(entries, table)
        assert processed.oracle.declared_experts == {("d1@x.com", "a.py")}
        assert processed.oracle.declared_non_experts == {("d2@y.com", "a.py")}
        reasons = sorted(u.reason for u in processed.unresolved)
        assert reasons == ["pair not in history", "unknown developer"]
        assert len(processed.dataset) == 2
        # ML features are [adds, fa, size, num_days]
        assert processed.dataset.features.shape == (2, 4)

    def test_disjoint_union_covers_valid_entries(self):
        history = make_history(
            [
                ("d1@x.com", 0, [add("a.py", "x = 1\n"), add("b.py", "y = 1\n")]),
                ("d2@y.com", 1, [mod("a.py", "x = 1\n", "x = 2\n")]),
            ]
        )
        table = compute_all(history)
        entries = [
            GroundTruthEntry("r", "d1@x.com", "a.py", 5),
            GroundTruthEntry("r", "d1@x.com", "b.py", 1),
            GroundTruthEntry("r", "d2@y.com", "a.py", 4),
        ]
        processed = process_answers(entries, table)
        oracle = processed.oracle
        assert not (oracle.declared_experts & oracle.declared_non_experts)
        assert len(oracle.declared_experts | oracle.declared_non_experts) == 3

    def test_alias_email_resolves_to_canonical(self):
        history = make_history(
            [
                ("ana@x.com", 0, [add("a.py", "x = 1\n")]),
                ("ANA@x.com", 1, [mod("a.py", "x = 1\n", "x = 2\n")]),
            ]
        )
        from fileexperts.identities import canonicalize_history

        table = compute_all(canonicalize_history(history))
        entries = [GroundTruthEntry("r", "ANA@X.COM", "a.py", 5)]
        knowledge, unresolved = knowledge_map(entries, table)
        assert knowledge == {("ana@x.com", "a.py"): 5}
        assert unresolved == ()
