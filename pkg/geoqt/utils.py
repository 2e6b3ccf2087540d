# SPDX-License-Identifier: BUSL-1.1
"""Shared utilities for geoqt."""

import os
import tempfile
from pathlib import Path


def atomic_write_text(path, text: str) -> Path:
    """Write text to path via a temporary sibling file and rename.

    Readers never observe a partially written file. Newlines are written
    as LF regardless of platform.
    """
    path = Path(path).expanduser()
    directory = path.parent if str(path.parent) else Path(".")
    directory.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
            f.flush()
            os.fsync(f.fileno())
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise
    return path
