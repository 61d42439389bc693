#!/usr/bin/env python3
"""
Entry point for running the xrt command line from a source checkout.
"""
import sys

from xrt.cli.main import main

if __name__ == "__main__":
    sys.exit(main())
