# SPDX-License-Identifier: BUSL-1.1
"""geoqt - geometric quantum statistical mechanics on CP^{D-1}"""

__version__ = "0.1.0"
