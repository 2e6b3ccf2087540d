# SPDX-License-Identifier: BUSL-1.1
"""Allow running as python3 -m geoqt."""
import sys

from geoqt.cli import main

if __name__ == "__main__":
    sys.exit(main())
