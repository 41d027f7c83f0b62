"""Human curation workflow for building a challenge set.

Augmented candidates are ingested next to their originals; annotators
mark each candidate's quality as high or low and may submit a small
correction.  Everything lands in an append-only JSONL log: replaying the
log reproduces the store state, so acknowledged verdicts survive a crash
at any point between two appends.

The HTTP layer is a small stdlib server (two-annotator lab tool):

    GET  /items?status=pending|done&transition=...
    GET  /items/{id}
    POST /items/{id}/verdict   {"quality": "high"|"low",
                                "edited_tokens"?, "edited_labels"?}
    GET  /agreement
    GET  /export?policy=any-high|all-high|adjudicated:{annotator}
    GET  /stats

Annotator identity comes from a bearer token configured in a JSON file
mapping token -> annotator id; without a token file the client supplies
"annotator" in the verdict body.
"""

import errno
import hashlib
import json
import os
import random
import threading
import time
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from .conll import Corpus, Sentence, Token, serialize_conll, validate_bio
from .evaluation import AlignmentMismatchError, NoSharedItemsError, agreement

EXPORT_POLICIES = ("any-high", "all-high")  # plus "adjudicated:<annotator>"

DEFAULT_CALIBRATION_SIZE = 50

STORE_ENV_VAR = "ENTSHIFT_CURATION_STORE"


class CurationError(ValueError):
    pass


class UnknownItemError(CurationError):
    pass


class InvalidEditError(CurationError):
    pass


class StoreCorruptError(CurationError):
    pass


class PortInUseError(OSError):
    pass


@dataclass
class Verdict:
    annotator: str
    quality: str
    edited: Sentence | None
    timestamp: float


@dataclass
class CurationItem:
    item_id: str
    original: Sentence
    candidate: Sentence
    transition: str
    record: dict
    verdicts: dict[str, Verdict] = field(default_factory=dict)

    def status(self) -> str:
        return "done" if self.verdicts else "pending"


def _sentence_payload(s: Sentence) -> dict:
    return {"tokens": list(s.texts()), "labels": list(s.labels())}


def _sentence_from(payload, sent_id=0) -> Sentence:
    return Sentence(tuple(Token(t, l) for t, l in zip(payload["tokens"], payload["labels"])),
                    sent_id=sent_id)


def _item_id(original: Sentence, candidate: Sentence, transition: str) -> str:
    blob = json.dumps([list(original.texts()), list(original.labels()),
                       list(candidate.texts()), list(candidate.labels()), transition],
                      ensure_ascii=False)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


class CurationStore:
    """Append-only log plus the derived current-state view.

    All writes go through ``_append`` under one lock; reads see the
    in-memory view, which equals a fresh replay of the log.
    """

    def __init__(self, path, calibration_size: int = DEFAULT_CALIBRATION_SIZE):
        self.path = Path(path)
        self.calibration_size = calibration_size
        self.items: dict[str, CurationItem] = {}
        self.calibration_ids: list[str] = []
        self._order: list[str] = []
        self._lock = threading.RLock()
        if self.path.exists():
            self._replay()

    # -- log plumbing

    def _replay(self) -> None:
        with open(self.path, encoding="utf-8") as f:
            for lineno, line in enumerate(f, start=1):
                if not line.strip():
                    continue
                try:
                    event = json.loads(line)
                    self._apply(event)
                except (json.JSONDecodeError, KeyError, CurationError) as exc:
                    raise StoreCorruptError(f"{self.path}:{lineno}: {exc}") from exc

    def _append(self, event: dict) -> None:
        line = json.dumps(event, ensure_ascii=False)
        with open(self.path, "a", encoding="utf-8") as f:
            f.write(line + "\n")
            f.flush()
            os.fsync(f.fileno())

    def _apply(self, event: dict) -> None:
        kind = event["event"]
        if kind == "item":
            item = CurationItem(
                item_id=event["item_id"],
                original=_sentence_from(event["original"]),
                candidate=_sentence_from(event["candidate"]),
                transition=event["transition"],
                record=event.get("record", {}),
            )
            if item.item_id not in self.items:
                self.items[item.item_id] = item
                self._order.append(item.item_id)
        elif kind == "verdict":
            item = self.items.get(event["item_id"])
            if item is None:
                raise UnknownItemError(f"verdict for unknown item {event['item_id']}")
            edited = None
            if event.get("edited") is not None:
                edited = _sentence_from(event["edited"])
            item.verdicts[event["annotator"]] = Verdict(
                event["annotator"], event["quality"], edited, event["ts"])
        elif kind == "calibration":
            self.calibration_ids = list(event["ids"])
        else:
            raise StoreCorruptError(f"unknown event type {kind!r}")

    # -- operations

    def ingest(self, originals: Corpus, candidates: Corpus, records,
               seed: int = 0) -> int:
        """One item per candidate, keyed by content hash (idempotent)."""
        if len(candidates) != len(records):
            raise AlignmentMismatchError(
                f"{len(candidates)} candidates vs {len(records)} records")
        with self._lock:
            for sentence, rec in zip(candidates.sentences, records):
                original = originals.sentences[rec.source_sent_id]
                item_id = _item_id(original, sentence, rec.transition)
                if item_id in self.items:
                    continue
                event = {
                    "event": "item",
                    "item_id": item_id,
                    "original": _sentence_payload(original),
                    "candidate": _sentence_payload(sentence),
                    "transition": rec.transition,
                    "record": json.loads(rec.to_json()),
                }
                self._append(event)
                self._apply(event)
            if not self.calibration_ids and self.items:
                ids = sorted(self.items)
                sample = random.Random(seed).sample(
                    ids, min(self.calibration_size, len(ids)))
                event = {"event": "calibration", "ids": sample}
                self._append(event)
                self._apply(event)
            return len(self.items)

    def annotate(self, item_id: str, annotator: str, quality: str,
                 edited_tokens=None, edited_labels=None) -> Verdict:
        """Record a verdict; the latest per (item, annotator) wins."""
        with self._lock:
            if item_id not in self.items:
                raise UnknownItemError(f"no such item: {item_id}")
            if quality not in ("high", "low"):
                raise CurationError(f"quality must be 'high' or 'low': {quality!r}")
            edited_payload = None
            if edited_tokens is not None or edited_labels is not None:
                if not edited_tokens or not edited_labels \
                        or len(edited_tokens) != len(edited_labels):
                    raise InvalidEditError("edited tokens and labels must align")
                try:
                    validate_bio(tuple(edited_labels))
                    edited = Sentence(tuple(Token(t, l) for t, l in
                                            zip(edited_tokens, edited_labels)))
                except ValueError as exc:
                    raise InvalidEditError(f"edited sentence rejected: {exc}") from exc
                edited_payload = _sentence_payload(edited)
            event = {
                "event": "verdict",
                "item_id": item_id,
                "annotator": annotator,
                "quality": quality,
                "edited": edited_payload,
                "ts": time.time(),
            }
            self._append(event)
            self._apply(event)
            return self.items[item_id].verdicts[annotator]

    def list_items(self, status: str | None = None,
                   transition: str | None = None) -> list[CurationItem]:
        """Items in a stable order: calibration first, then pending, by id."""
        with self._lock:
            calib = set(self.calibration_ids)
            items = [self.items[i] for i in sorted(self.items)]
            if transition:
                items = [it for it in items if it.transition == transition]
            if status:
                items = [it for it in items if it.status() == status]
            items.sort(key=lambda it: (it.item_id not in calib,
                                       it.status() != "pending", it.item_id))
            return items

    def get(self, item_id: str) -> CurationItem:
        with self._lock:
            if item_id not in self.items:
                raise UnknownItemError(f"no such item: {item_id}")
            return self.items[item_id]

    def _qualifies(self, item: CurationItem, policy: str) -> Verdict | None:
        """The verdict whose edit (if any) export should prefer."""
        verdicts = item.verdicts
        if policy.startswith("adjudicated:"):
            annotator = policy.split(":", 1)[1]
            v = verdicts.get(annotator)
            return v if v is not None and v.quality == "high" else None
        if not verdicts:
            return None
        highs = [v for v in verdicts.values() if v.quality == "high"]
        if policy == "any-high":
            winners = highs
        elif policy == "all-high":
            winners = highs if len(highs) == len(verdicts) else []
        else:
            raise CurationError(f"unknown export policy: {policy!r}")
        if not winners:
            return None
        edited = [v for v in winners if v.edited is not None]
        pool = edited or winners
        return max(pool, key=lambda v: (v.timestamp, v.annotator))

    def export(self, policy: str = "all-high") -> Corpus:
        """Qualifying items as a corpus, edited text preferred, by item id."""
        with self._lock:
            sentences = []
            for item_id in sorted(self.items):
                item = self.items[item_id]
                verdict = self._qualifies(item, policy)
                if verdict is None:
                    continue
                chosen = verdict.edited if verdict.edited is not None else item.candidate
                sentences.append(chosen)
            return Corpus(tuple(sentences), source="CS")

    def annotations(self, annotator: str) -> dict[str, str]:
        with self._lock:
            return {i: it.verdicts[annotator].quality
                    for i, it in self.items.items() if annotator in it.verdicts}

    def agreement(self, a: str | None = None, b: str | None = None) -> float:
        """Agreement between two annotators (busiest pair by default)."""
        with self._lock:
            if a is None or b is None:
                counts = {}
                for item in self.items.values():
                    for name in item.verdicts:
                        counts[name] = counts.get(name, 0) + 1
                ranked = sorted(counts, key=lambda n: (-counts[n], n))
                if len(ranked) < 2:
                    raise NoSharedItemsError("need verdicts from two annotators")
                a, b = ranked[0], ranked[1]
            return agreement(self.annotations(a), self.annotations(b))

    def stats(self) -> dict:
        with self._lock:
            per_transition = {}
            for item in self.items.values():
                per_transition[item.transition] = per_transition.get(item.transition, 0) + 1
            annotators = sorted({n for it in self.items.values() for n in it.verdicts})
            calib = set(self.calibration_ids)
            calibration_done = {
                name: sum(1 for i in calib if name in self.items[i].verdicts)
                for name in annotators
            }
            try:
                agree = self.agreement()
            except (NoSharedItemsError, CurationError):
                agree = None
            return {
                "items": len(self.items),
                "pending": sum(1 for it in self.items.values() if it.status() == "pending"),
                "per_transition": per_transition,
                "annotators": annotators,
                "calibration_size": len(self.calibration_ids),
                "calibration_done": calibration_done,
                "agreement": agree,
            }


# ---------------------------------------------------------------------------
# HTTP layer


def _item_summary(item: CurationItem) -> dict:
    return {
        "id": item.item_id,
        "transition": item.transition,
        "status": item.status(),
        "original": _sentence_payload(item.original),
        "candidate": _sentence_payload(item.candidate),
        "verdicts": {name: {"quality": v.quality,
                            "edited": None if v.edited is None else _sentence_payload(v.edited)}
                     for name, v in item.verdicts.items()},
    }


class _Handler(BaseHTTPRequestHandler):
    server_version = "entshift-curation"

    def _send(self, code: int, payload, content_type="application/json"):
        body = payload if isinstance(payload, bytes) else \
            json.dumps(payload, ensure_ascii=False).encode("utf-8")
        self.send_response(code)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _error(self, code: int, message: str):
        self._send(code, {"error": message})

    def _annotator(self, body: dict) -> str | None:
        tokens = self.server.tokens
        header = self.headers.get("Authorization", "")
        if tokens is not None:
            if not header.startswith("Bearer "):
                return None
            name = tokens.get(header[len("Bearer "):])
            if name is None:
                return None
            if body.get("annotator") and body["annotator"] != name:
                return None
            return name
        return body.get("annotator")

    def log_message(self, *args):
        pass

    def do_GET(self):
        store: CurationStore = self.server.store
        url = urlparse(self.path)
        query = {k: v[0] for k, v in parse_qs(url.query).items()}
        try:
            if url.path == "/items":
                items = store.list_items(status=query.get("status"),
                                         transition=query.get("transition"))
                self._send(200, {"items": [_item_summary(it) for it in items]})
            elif url.path.startswith("/items/"):
                self._send(200, _item_summary(store.get(url.path.split("/")[2])))
            elif url.path == "/agreement":
                try:
                    a, b = _pair(store, query)
                    value = store.agreement(a, b)
                    shared = len(store.annotations(a).keys() & store.annotations(b).keys())
                except NoSharedItemsError:
                    value, shared = None, 0
                self._send(200, {"agreement": value, "shared": shared})
            elif url.path == "/export":
                corpus = store.export(query.get("policy", "all-high"))
                self._send(200, serialize_conll(corpus).encode("utf-8"),
                           content_type="text/plain; charset=utf-8")
            elif url.path == "/stats":
                self._send(200, store.stats())
            else:
                served = self._static(url.path)
                if not served:
                    self._error(404, f"no such endpoint: {url.path}")
        except UnknownItemError as exc:
            self._error(404, str(exc))
        except (CurationError, ValueError) as exc:
            self._error(400, str(exc))

    def do_POST(self):
        store: CurationStore = self.server.store
        url = urlparse(self.path)
        parts = url.path.strip("/").split("/")
        if len(parts) != 3 or parts[0] != "items" or parts[2] != "verdict":
            self._error(404, f"no such endpoint: {url.path}")
            return
        try:
            length = int(self.headers.get("Content-Length", 0))
            body = json.loads(self.rfile.read(length) or b"{}")
        except json.JSONDecodeError:
            self._error(400, "body must be JSON")
            return
        annotator = self._annotator(body)
        if not annotator:
            self._error(401, "missing or unknown annotator credentials")
            return
        try:
            verdict = store.annotate(parts[1], annotator, body.get("quality"),
                                     body.get("edited_tokens"), body.get("edited_labels"))
        except UnknownItemError as exc:
            self._error(404, str(exc))
            return
        except (InvalidEditError, CurationError) as exc:
            self._error(400, str(exc))
            return
        self._send(200, {"ok": True, "item_id": parts[1], "annotator": annotator,
                         "quality": verdict.quality})

    def _static(self, path: str) -> bool:
        root = self.server.static_dir
        if root is None:
            return False
        rel = "index.html" if path == "/" else path.lstrip("/")
        target = (root / rel).resolve()
        if not str(target).startswith(str(root.resolve())) or not target.is_file():
            return False
        types = {".html": "text/html", ".js": "text/javascript",
                 ".css": "text/css", ".json": "application/json",
                 ".svg": "image/svg+xml"}
        ctype = types.get(target.suffix, "application/octet-stream")
        self._send(200, target.read_bytes(), content_type=f"{ctype}; charset=utf-8")
        return True


def _pair(store: CurationStore, query) -> tuple[str, str]:
    if query.get("a") and query.get("b"):
        return query["a"], query["b"]
    counts = {}
    for item in store.items.values():
        for name in item.verdicts:
            counts[name] = counts.get(name, 0) + 1
    ranked = sorted(counts, key=lambda n: (-counts[n], n))
    if len(ranked) < 2:
        raise NoSharedItemsError("need two annotators")
    return ranked[0], ranked[1]


def load_tokens(path) -> dict[str, str]:
    """JSON file mapping bearer token -> annotator id."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, dict) or not all(
            isinstance(k, str) and isinstance(v, str) for k, v in data.items()):
        raise CurationError("token file must map token strings to annotator ids")
    return data


def make_server(store_path, port: int = 0, tokens: dict[str, str] | None = None,
                static_dir=None, calibration_size: int = DEFAULT_CALIBRATION_SIZE
                ) -> ThreadingHTTPServer:
    """Bind the service; port 0 picks a free port (see ``server_port``)."""
    store = CurationStore(store_path, calibration_size=calibration_size)
    try:
        httpd = ThreadingHTTPServer(("127.0.0.1", port), _Handler)
    except OSError as exc:
        if exc.errno == errno.EADDRINUSE:
            raise PortInUseError(f"port {port} is already in use") from exc
        raise
    httpd.store = store
    httpd.tokens = tokens
    httpd.static_dir = None if static_dir is None else Path(static_dir)
    return httpd


def serve(store_path, port: int, tokens: dict[str, str] | None = None,
          static_dir=None) -> None:
    httpd = make_server(store_path, port, tokens, static_dir)
    try:
        httpd.serve_forever()
    finally:
        httpd.server_close()
