#!/usr/bin/env python3
"""Wire stub that never answers; exercises the request timeout."""
import sys
import time

for _ in sys.stdin:
    time.sleep(3600)
