# SPDX-License-Identifier: BUSL-1.1
"""geoqt print-config — echo the resolved run configuration as YAML."""

import sys

from geoqt.commands.common import apply_overrides
from geoqt.config import ConfigStore
from geoqt.utils import atomic_write_text


def cmd_print_config(args):
    store = ConfigStore()
    if getattr(args, "list_presets", False):
        for name in store.list_presets():
            print(name)
        return
    cfg = apply_overrides(store.load(args.config), args, "print-config")
    text = store.dump(cfg)
    if args.out:
        atomic_write_text(args.out, text)
    else:
        sys.stdout.write(text)
