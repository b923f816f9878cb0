#!/usr/bin/env python3
"""Start the haptic server with the built-in identity-calibrated config.

Equivalent to `ethd serve`; edit the config inline to explore settings.
"""

import sys

from ethd.cli import main

if __name__ == "__main__":
    sys.exit(main(["serve"] + sys.argv[1:]))
