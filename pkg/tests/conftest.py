import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from player_history import build_repo, build_snapshot_dir  # noqa: E402


@pytest.fixture(scope="session")
def player_repo(tmp_path_factory):
    return build_repo(tmp_path_factory.mktemp("player") / "repo")


@pytest.fixture(scope="session")
def player_snapdir(tmp_path_factory):
    return build_snapshot_dir(tmp_path_factory.mktemp("player") / "snaps")
