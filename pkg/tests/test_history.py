import json
import subprocess

import pytest

from nosqlschema import HistorySource, HistoryWalker, RepoAccessError, ToolInvocationError, linearize_history
from nosqlschema.history import GIT_ENV_VAR, materialize_snapshot

from player_history import MISSION, N_COMMITS, PLAYER, RENAME_COMMIT, build_repo, commit_date


def make_snapdir(root, layout):
    for name, files in layout.items():
        (root / name).mkdir(parents=True)
        for path, text in files.items():
            (root / name / path).parent.mkdir(parents=True, exist_ok=True)
            (root / name / path).write_text(text, encoding="utf-8")
    return root


def test_snapshot_dir_order(tmp_path):
    make_snapdir(tmp_path, {"002_remove": {}, "000_init": {"A.java": "class A {}"}, "001_add": {"Player.java": "class P {}"}})
    refs = linearize_history(HistorySource.snapshots(tmp_path))
    assert [r.hash for r in refs] == ["fix-000", "fix-001", "fix-002"]
    assert refs[1].parents == ("fix-000",)
    assert refs[0].committer_date < refs[1].committer_date < refs[2].committer_date


def test_snapshot_dir_materialization(tmp_path):
    make_snapdir(tmp_path, {
        "000_init": {"README.md": "x", "src/A.java": "class A {}"},
        "001_add": {"Player.java": "class Player {}"},
        "002_remove": {"notes.txt": "gone"},
    })
    walker = HistoryWalker(HistorySource.snapshots(tmp_path))
    snaps = list(walker.walk())
    assert dict(snaps[0].files) == {"src/A.java": "class A {}"}
    assert dict(snaps[1].files) == {"Player.java": "class Player {}"}
    assert dict(snaps[2].files) == {}
    assert [s.index for s in snaps] == [0, 1, 2]


def test_snapshot_dir_meta_and_before(tmp_path):
    make_snapdir(tmp_path, {"000_a": {}, "001_b": {}})
    (tmp_path / "000_a" / "meta.json").write_text(json.dumps({"hash": "aaa", "committer_date": "2015-01-01T00:00:00+00:00"}))
    (tmp_path / "001_b" / "meta.json").write_text(json.dumps({"hash": "bbb", "committer_date": "2017-01-01T00:00:00+00:00"}))
    refs = linearize_history(HistorySource.snapshots(tmp_path))
    assert [r.hash for r in refs] == ["aaa", "bbb"] and refs[1].parents == ("aaa",)
    cut = linearize_history(HistorySource.snapshots(tmp_path, "2016-01-01T00:00:00"))
    assert [r.hash for r in cut] == ["aaa"]
    same = linearize_history(HistorySource.snapshots(tmp_path, "2017-01-01T00:00:00+00:00"))
    assert [r.hash for r in same] == ["aaa", "bbb"]


@pytest.mark.parametrize("layout", [{"init": {}}, {"001_a": {}, "1_b": {}}])
def test_snapshot_dir_rejects_bad_layouts(tmp_path, layout):
    make_snapdir(tmp_path, layout)
    with pytest.raises(RepoAccessError):
        linearize_history(HistorySource.snapshots(tmp_path))


def test_missing_source(tmp_path):
    with pytest.raises(RepoAccessError):
        HistoryWalker(HistorySource.repo(tmp_path / "nope"))
    with pytest.raises(RepoAccessError):
        HistoryWalker(HistorySource.repo(tmp_path))  # exists but is not a repository


def test_empty_repository(tmp_path):
    subprocess.run(["git", "init", "-q", str(tmp_path)], check=True)
    assert linearize_history(HistorySource.repo(tmp_path)) == []


def test_repo_commits_oldest_first(player_repo):
    refs = linearize_history(HistorySource.repo(player_repo, "2030-01-01T00:00:00"))
    assert len(refs) == N_COMMITS
    assert [r.committer_date[:10] for r in refs] == [commit_date(i)[:10] for i in range(N_COMMITS)]
    assert refs[0].parents == ()
    assert all(refs[i].parents == (refs[i - 1].hash,) for i in range(1, N_COMMITS))


def test_repo_before_date(player_repo):
    refs = linearize_history(HistorySource.repo(player_repo, commit_date(10)))
    assert len(refs) == 11  # git --before is inclusive


def test_rename_shows_new_path_same_text(player_repo):
    walker = HistoryWalker(HistorySource.repo(player_repo))
    refs = walker.commits()
    before = walker.snapshot(refs[RENAME_COMMIT - 1], RENAME_COMMIT - 1)
    after = walker.snapshot(refs[RENAME_COMMIT], RENAME_COMMIT)
    assert MISSION in before.files and MISSION not in after.files
    assert after.files["legacy/Mission.java"] == before.files[MISSION]
    assert all(p.endswith(".java") for p in after.files)


def test_materialize_matches_walker(player_repo):
    source = HistorySource.repo(player_repo)
    refs = linearize_history(source)
    snap = materialize_snapshot(source, refs[1], 1)
    assert set(snap.files) == {PLAYER, MISSION}


def test_delete_only_java_file(tmp_path):
    steps = [("add", {"A.java": "class A {}"}, {}), ("drop", {"A.java": None}, {})]
    repo = build_repo(tmp_path / "r", steps)
    snaps = list(HistoryWalker(HistorySource.repo(repo)).walk())
    assert dict(snaps[1].files) == {}


def test_git_override_env(player_repo, monkeypatch, tmp_path):
    monkeypatch.setenv(GIT_ENV_VAR, str(tmp_path / "no-such-git"))
    with pytest.raises(ToolInvocationError):
        linearize_history(HistorySource.repo(player_repo))


def test_git_override_env_is_used(player_repo, monkeypatch, tmp_path):
    log = tmp_path / "calls.log"
    wrapper = tmp_path / "git-wrapper"
    real = subprocess.run(["which", "git"], capture_output=True, text=True, check=True).stdout.strip()
    wrapper.write_text(f'#!/bin/sh\necho "$@" >> {log}\nexec {real} "$@"\n')
    wrapper.chmod(0o755)
    monkeypatch.setenv(GIT_ENV_VAR, str(wrapper))
    assert len(linearize_history(HistorySource.repo(player_repo))) == N_COMMITS
    assert "--cherry-pick" in log.read_text()
