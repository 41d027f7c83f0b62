import subprocess
import sys
import threading

import pytest
import requests

from entshift.augment import AugmentConfig, augment_corpus
from entshift.conll import Corpus, Sentence, Token, parse_conll
from entshift.curation import (
    CurationError,
    CurationStore,
    InvalidEditError,
    StoreCorruptError,
    UnknownItemError,
    load_tokens,
    make_server,
)
from entshift.evaluation import NoSharedItemsError
from entshift.phrases import load_default_library


def sent(pairs, i=0):
    return Sentence(tuple(Token(t, l) for t, l in pairs), sent_id=i)


def build_candidates(n=10, seed=0):
    sentences = [sent([(f"Lim{i}", "B-LOC"), ("spoke", "O")], i) for i in range(n)]
    originals = Corpus(tuple(sentences))
    cfg = AugmentConfig(load_default_library(), percent=100, seed=seed)
    candidates, records = augment_corpus(originals, cfg)
    return originals, candidates, records


@pytest.fixture
def store(tmp_path):
    return CurationStore(tmp_path / "log.jsonl")


class TestStore:
    def test_ingest_counts(self, store):
        originals, candidates, records = build_candidates(10)
        assert store.ingest(originals, candidates, records) == 10

    def test_ingest_idempotent(self, store):
        originals, candidates, records = build_candidates(10)
        store.ingest(originals, candidates, records)
        assert store.ingest(originals, candidates, records) == 10

    def test_ingest_empty(self, store):
        originals = Corpus(())
        assert store.ingest(originals, Corpus(()), []) == 0

    def test_annotate_latest_wins(self, store):
        originals, candidates, records = build_candidates(3)
        store.ingest(originals, candidates, records)
        item_id = store.list_items()[0].item_id
        store.annotate(item_id, "ann1", "low")
        store.annotate(item_id, "ann1", "high")
        assert store.get(item_id).verdicts["ann1"].quality == "high"

    def test_annotate_unknown_item(self, store):
        with pytest.raises(UnknownItemError):
            store.annotate("missing", "ann1", "high")

    def test_annotate_bad_quality(self, store):
        originals, candidates, records = build_candidates(1)
        store.ingest(originals, candidates, records)
        item_id = store.list_items()[0].item_id
        with pytest.raises(CurationError):
            store.annotate(item_id, "ann1", "medium")

    def test_edit_validated(self, store):
        originals, candidates, records = build_candidates(1)
        store.ingest(originals, candidates, records)
        item_id = store.list_items()[0].item_id
        with pytest.raises(InvalidEditError):
            store.annotate(item_id, "ann1", "high",
                           edited_tokens=["a", "b"], edited_labels=["O", "I-ORG"])
        store.annotate(item_id, "ann1", "high",
                       edited_tokens=["a", "b"], edited_labels=["O", "B-ORG"])

    def test_replay_reproduces_state(self, store, tmp_path):
        originals, candidates, records = build_candidates(5)
        store.ingest(originals, candidates, records)
        ids = [it.item_id for it in store.list_items()]
        store.annotate(ids[0], "ann1", "high")
        store.annotate(ids[1], "ann2", "low")
        replayed = CurationStore(tmp_path / "log.jsonl")
        assert set(replayed.items) == set(store.items)
        assert replayed.get(ids[0]).verdicts["ann1"].quality == "high"
        assert replayed.calibration_ids == store.calibration_ids

    def test_corrupt_log(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"event": "verdict", "item_id": "ghost", "annotator": "a", '
                        '"quality": "high", "edited": null, "ts": 0}\n')
        with pytest.raises(StoreCorruptError):
            CurationStore(path)

    def test_export_policies(self, store):
        originals, candidates, records = build_candidates(4)
        store.ingest(originals, candidates, records)
        ids = [it.item_id for it in store.list_items()]
        store.annotate(ids[0], "ann1", "high")
        store.annotate(ids[0], "ann2", "high")
        store.annotate(ids[1], "ann1", "high")
        store.annotate(ids[1], "ann2", "low")
        store.annotate(ids[2], "ann1", "low")
        all_high = store.export("all-high")
        any_high = store.export("any-high")
        assert len(all_high) == 1
        assert len(any_high) == 2
        adjudicated = store.export("adjudicated:ann1")
        assert len(adjudicated) == 2

    def test_export_prefers_edit(self, store):
        originals, candidates, records = build_candidates(1)
        store.ingest(originals, candidates, records)
        item_id = store.list_items()[0].item_id
        store.annotate(item_id, "ann1", "high",
                       edited_tokens=["Fixed", "text"], edited_labels=["B-LOC", "O"])
        exported = store.export("any-high")
        assert exported.sentences[0].texts() == ("Fixed", "text")

    def test_export_all_low_empty(self, store):
        originals, candidates, records = build_candidates(3)
        store.ingest(originals, candidates, records)
        for it in store.list_items():
            store.annotate(it.item_id, "ann1", "low")
        assert len(store.export("any-high")) == 0

    def test_all_high_subset_of_any_high(self, store):
        import random
        originals, candidates, records = build_candidates(20)
        store.ingest(originals, candidates, records)
        rng = random.Random(0)
        for it in store.list_items():
            for ann in ("ann1", "ann2"):
                store.annotate(it.item_id, ann, rng.choice(["high", "low"]))
        all_ids = {s.texts() for s in store.export("all-high").sentences}
        any_ids = {s.texts() for s in store.export("any-high").sentences}
        assert all_ids <= any_ids

    def test_export_round_trips_as_conll(self, store):
        from entshift.conll import serialize_conll
        originals, candidates, records = build_candidates(5)
        store.ingest(originals, candidates, records)
        for it in store.list_items():
            store.annotate(it.item_id, "ann1", "high")
        exported = store.export("any-high")
        again = parse_conll(serialize_conll(exported))
        assert len(again) == len(exported)

    def test_agreement_78(self, store):
        originals, candidates, records = build_candidates(50)
        store.ingest(originals, candidates, records)
        ids = [it.item_id for it in store.list_items()]
        for i, item_id in enumerate(ids):
            store.annotate(item_id, "ann1", "high")
            store.annotate(item_id, "ann2", "high" if i < 39 else "low")
        assert store.agreement() == pytest.approx(0.78)

    def test_agreement_needs_two(self, store):
        originals, candidates, records = build_candidates(2)
        store.ingest(originals, candidates, records)
        with pytest.raises(NoSharedItemsError):
            store.agreement()

    def test_calibration_sample(self, tmp_path):
        s = CurationStore(tmp_path / "log.jsonl", calibration_size=5)
        originals, candidates, records = build_candidates(20)
        s.ingest(originals, candidates, records)
        assert len(s.calibration_ids) == 5
        listed = [it.item_id for it in s.list_items()]
        assert set(listed[:5]) == set(s.calibration_ids)

    def test_stats(self, store):
        originals, candidates, records = build_candidates(6)
        store.ingest(originals, candidates, records)
        stats = store.stats()
        assert stats["items"] == 6
        assert stats["pending"] == 6
        assert sum(stats["per_transition"].values()) == 6


@pytest.fixture
def server(tmp_path):
    httpd = make_server(tmp_path / "log.jsonl", port=0,
                        tokens={"tok1": "ann1", "tok2": "ann2"})
    thread = threading.Thread(target=httpd.serve_forever, daemon=True)
    thread.start()
    yield httpd
    httpd.shutdown()
    httpd.server_close()


def url(server, path):
    return f"http://127.0.0.1:{server.server_port}{path}"


class TestHttp:
    def _ingest(self, server, n=5):
        originals, candidates, records = build_candidates(n)
        server.store.ingest(originals, candidates, records)
        return [it.item_id for it in server.store.list_items()]

    def test_items_pending_first(self, server):
        ids = self._ingest(server)
        requests.post(url(server, f"/items/{ids[0]}/verdict"),
                      json={"quality": "high"},
                      headers={"Authorization": "Bearer tok1"}).raise_for_status()
        listed = requests.get(url(server, "/items")).json()["items"]
        statuses = [it["status"] for it in listed]
        assert statuses == sorted(statuses, key=lambda s: s != "pending")
        pending = requests.get(url(server, "/items?status=pending")).json()["items"]
        assert all(it["status"] == "pending" for it in pending)
        assert len(pending) == 4

    def test_read_your_writes(self, server):
        ids = self._ingest(server)
        response = requests.post(url(server, f"/items/{ids[2]}/verdict"),
                                 json={"quality": "low"},
                                 headers={"Authorization": "Bearer tok2"})
        assert response.status_code == 200
        item = requests.get(url(server, f"/items/{ids[2]}")).json()
        assert item["verdicts"]["ann2"]["quality"] == "low"

    def test_auth_required(self, server):
        ids = self._ingest(server)
        assert requests.post(url(server, f"/items/{ids[0]}/verdict"),
                             json={"quality": "high"}).status_code == 401
        assert requests.post(url(server, f"/items/{ids[0]}/verdict"),
                             json={"quality": "high"},
                             headers={"Authorization": "Bearer nope"}).status_code == 401

    def test_unknown_item_404(self, server):
        self._ingest(server)
        assert requests.post(url(server, "/items/missing/verdict"),
                             json={"quality": "high"},
                             headers={"Authorization": "Bearer tok1"}).status_code == 404

    def test_invalid_edit_400(self, server):
        ids = self._ingest(server)
        response = requests.post(
            url(server, f"/items/{ids[0]}/verdict"),
            json={"quality": "high", "edited_tokens": ["a"], "edited_labels": ["I-ORG"]},
            headers={"Authorization": "Bearer tok1"})
        assert response.status_code == 400

    def test_agreement_endpoint(self, server):
        ids = self._ingest(server, 50)
        for i, item_id in enumerate(ids):
            for token, quality in (("tok1", "high"),
                                   ("tok2", "high" if i < 39 else "low")):
                requests.post(url(server, f"/items/{item_id}/verdict"),
                              json={"quality": quality},
                              headers={"Authorization": f"Bearer {token}"}).raise_for_status()
        data = requests.get(url(server, "/agreement")).json()
        assert data["agreement"] == pytest.approx(0.78)
        assert data["shared"] == 50

    def test_export_endpoint(self, server):
        ids = self._ingest(server)
        for item_id in ids:
            for token in ("tok1", "tok2"):
                requests.post(url(server, f"/items/{item_id}/verdict"),
                              json={"quality": "high"},
                              headers={"Authorization": f"Bearer {token}"})
        text = requests.get(url(server, "/export?policy=all-high")).text
        assert len(parse_conll(text)) == len(ids)

    def test_stats_endpoint(self, server):
        self._ingest(server)
        stats = requests.get(url(server, "/stats")).json()
        assert stats["items"] == 5


KILL_SCRIPT = """
import sys
from entshift.curation import make_server
httpd = make_server(sys.argv[1], port=int(sys.argv[2]))
print("ready", flush=True)
httpd.serve_forever()
"""


class TestCrashSafety:
    def test_kill_and_replay(self, tmp_path):
        store_path = tmp_path / "log.jsonl"
        originals, candidates, records = build_candidates(8)
        CurationStore(store_path).ingest(originals, candidates, records)

        import socket
        with socket.socket() as s:
            s.bind(("127.0.0.1", 0))
            port = s.getsockname()[1]

        proc = subprocess.Popen([sys.executable, "-c", KILL_SCRIPT,
                                 str(store_path), str(port)],
                                stdout=subprocess.PIPE, text=True)
        try:
            assert proc.stdout.readline().strip() == "ready"
            base = f"http://127.0.0.1:{port}"
            ids = [it["id"] for it in requests.get(f"{base}/items").json()["items"]]
            acked = []
            for item_id in ids[:4]:
                response = requests.post(f"{base}/items/{item_id}/verdict",
                                         json={"annotator": "ann1", "quality": "high"})
                assert response.status_code == 200
                acked.append(item_id)
        finally:
            proc.kill()
            proc.wait()

        replayed = CurationStore(store_path)
        for item_id in acked:
            assert replayed.get(item_id).verdicts["ann1"].quality == "high"


def test_load_tokens(tmp_path):
    path = tmp_path / "tokens.json"
    path.write_text('{"secret": "ann1"}')
    assert load_tokens(path) == {"secret": "ann1"}
    path.write_text('["not", "a", "map"]')
    with pytest.raises(CurationError):
        load_tokens(path)
