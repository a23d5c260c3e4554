"""Build the 25-commit Player/Mission fixture used by the tests.

Writes a git repository (default) or a snapshot directory, which can then
be fed to ``nosqlschema analyze``.
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from player_history import build_repo, build_snapshot_dir  # noqa: E402


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("dest", type=Path, help="directory to create (must not exist)")
    p.add_argument("--snapshots", action="store_true", help="write NNN_label folders instead of a git repo")
    p.add_argument("--meta", action="store_true", help="with --snapshots, add meta.json per folder")
    args = p.parse_args()
    if args.dest.exists():
        p.error(f"{args.dest} already exists")
    if args.snapshots:
        build_snapshot_dir(args.dest, with_meta=args.meta)
    else:
        build_repo(args.dest)
    print(args.dest)


if __name__ == "__main__":
    main()
