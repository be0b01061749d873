#!/usr/bin/env python3
"""Minimal wire-protocol stub: labels everything 0 and commits x' = x.

Committing the datapoint itself passes both verifier checks, so this stub
behaves like an oracle with a constant labeller.
"""
import json
import sys

for line in sys.stdin:
    line = line.strip()
    if not line:
        continue
    try:
        req = json.loads(line)
        if req["op"] == "label":
            resp = {"label": 0}
        elif req["op"] == "generate":
            resp = {"x_prime": req["x"], "label": 0}
        else:
            resp = {"error": "unknown op"}
    except Exception as e:  # malformed request
        resp = {"error": str(e)}
    sys.stdout.write(json.dumps(resp) + "\n")
    sys.stdout.flush()
