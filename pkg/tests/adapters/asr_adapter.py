#!/usr/bin/env python3
"""Fixed-transcript ASR adapter; params.text overrides the default."""
import json
import sys

job = json.loads(sys.stdin.readline())
text = job.get("params", {}).get("text", "hello world")
print(json.dumps({"outputs": [{"slot": "text", "kind": "text", "text": text}]}))
