#!/usr/bin/env python3
"""A scripted two-annotator curation session against the HTTP service.

The store is an append-only JSONL log: every acknowledged verdict is on
disk before the response goes out, and replaying the log reproduces the
whole state (which is how the server starts up).
"""

import json
import tempfile
import threading
import urllib.request

from entshift.augment import AugmentConfig, augment_corpus
from entshift.conll import Corpus, Sentence, Token
from entshift.curation import CurationStore, make_server
from entshift.phrases import load_default_library


def sent(pairs, i=0):
    return Sentence(tuple(Token(t, l) for t, l in pairs), sent_id=i)


def call(base, path, payload=None, token=None):
    req = urllib.request.Request(base + path)
    if token:
        req.add_header("Authorization", f"Bearer {token}")
    if payload is not None:
        req.add_header("Content-Type", "application/json")
        req.data = json.dumps(payload).encode()
    with urllib.request.urlopen(req) as resp:
        body = resp.read().decode()
    return json.loads(body) if body.startswith(("{", "[")) else body


# ---------------------------------------------------------------------------
# Ingest augmented candidates (with their originals for the side-by-side view).

originals = Corpus(tuple(sent([(f"Lim{i}", "B-LOC"), ("spoke", "O")], i) for i in range(12)))
candidates, records = augment_corpus(
    originals, AugmentConfig(load_default_library(), percent=100, seed=3))

store_path = tempfile.mktemp(suffix=".jsonl")
CurationStore(store_path, calibration_size=5).ingest(originals, candidates, records)

httpd = make_server(store_path, port=0, tokens={"alpha-key": "ann1", "beta-key": "ann2"})
threading.Thread(target=httpd.serve_forever, daemon=True).start()
base = f"http://127.0.0.1:{httpd.server_port}"
print(f"service on {base}, store at {store_path}")

# ---------------------------------------------------------------------------
# Both annotators work the queue; the calibration sample is served first.

items = call(base, "/items?status=pending")["items"]
print(f"\n{len(items)} pending items; first candidate:")
print("  ", " ".join(items[0]["candidate"]["tokens"]))

for i, item in enumerate(items):
    call(base, f"/items/{item['id']}/verdict",
         {"quality": "high" if i % 3 else "low"}, token="alpha-key")
    call(base, f"/items/{item['id']}/verdict",
         {"quality": "high" if i % 4 else "low"}, token="beta-key")

# one small correction: ann1 fixes a candidate and keeps it
target = items[1]
edited = dict(zip(("tokens", "labels"), (target["candidate"]["tokens"],
                                         target["candidate"]["labels"])))
call(base, f"/items/{target['id']}/verdict",
     {"quality": "high", "edited_tokens": ["Corrected"] + edited["tokens"][1:],
      "edited_labels": edited["labels"]}, token="alpha-key")

# ---------------------------------------------------------------------------
# Live stats, agreement, and the exported challenge corpus.

stats = call(base, "/stats")
print(f"\nstats: {stats['items']} items, {stats['pending']} pending, "
      f"per transition {stats['per_transition']}")
print(f"agreement: {call(base, '/agreement')}")

exported = call(base, "/export?policy=all-high")
print(f"\nexport (all-high) has {exported.count(chr(10) + chr(10)) + 1} sentences; head:")
print("  " + exported[:60].replace("\n", " / "))

httpd.shutdown()
httpd.server_close()

# Replay proves the log is the source of truth.
replayed = CurationStore(store_path)
print(f"\nreplayed store: {len(replayed.items)} items, agreement {replayed.agreement():.2f}")
