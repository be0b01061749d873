#!/usr/bin/env python3
"""Wire stub that labels correctly-typed but generates junk strings."""
import json
import sys

for line in sys.stdin:
    line = line.strip()
    if not line:
        continue
    req = json.loads(line)
    if req["op"] == "label":
        resp = {"label": 1}
    else:
        resp = {"x_prime": "01x1", "label": 1}
    sys.stdout.write(json.dumps(resp) + "\n")
    sys.stdout.flush()
