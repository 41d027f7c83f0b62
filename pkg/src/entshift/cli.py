"""Command-line entry point tying the pipeline together.

Every run writes a manifest (<output>.manifest.json) with the resolved
options, seed, input hashes, and tool version, so any output can be
regenerated bit-for-bit.  Errors exit nonzero with a JSON error object
on stderr.
"""

import argparse
import configparser
import hashlib
import json
import os
import random
import sys
import time
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from .attacks import METHODS, attack_corpus, harvest_inventory, write_attack_records
from .augment import (
    AugmentConfig,
    TRANSITIONS,
    augment_corpus,
    read_records,
    write_records,
)
from .conll import (
    Corpus,
    DEFAULT_TYPE_MAPPING,
    filter_by_entity_ratio,
    load_type_mapping,
    map_corpus_types,
    parse_conll,
    sample_fewshot,
    serialize_conll,
)
from .curation import (
    DEFAULT_CALIBRATION_SIZE,
    STORE_ENV_VAR,
    CurationStore,
    load_tokens,
    serve,
)
from .evaluation import entity_f1, format_report, per_transition_report
from .mixup import MixupConfig, config_for_percent
from .phrases import load_default_library, load_library, save_library, split_holdout
from .tagger import (
    TaggerConfig,
    load_model,
    predict_corpus,
    save_model,
    train,
    write_metrics,
)


class UsageError(ValueError):
    pass


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(primary_output, subcommand: str, options: dict,
                   inputs: dict, outputs: list, extra: dict | None = None) -> Path:
    manifest = {
        "tool": "entshift",
        "version": __version__,
        "subcommand": subcommand,
        "options": {k: v for k, v in sorted(options.items()) if k not in ("func",)},
        "inputs": {name: {"path": str(p),
                          "sha256": _sha256(p) if Path(p).exists() else None}
                   for name, p in inputs.items() if p is not None},
        "outputs": [str(p) for p in outputs],
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    }
    if extra:
        manifest.update(extra)
    path = Path(str(primary_output) + ".manifest.json")
    path.write_text(json.dumps(manifest, indent=2, default=str) + "\n", encoding="utf-8")
    return path


def load_config_file(path) -> dict:
    """Flat key = value file (an optional [section] header is tolerated)."""
    text = Path(path).read_text(encoding="utf-8")
    if not text.lstrip().startswith("["):
        text = "[defaults]\n" + text
    parser = configparser.ConfigParser()
    parser.read_string(text)
    merged = {}
    for section in parser.sections():
        for key, value in parser.items(section):
            merged[key.replace("-", "_")] = value
    return merged


def apply_config(args: argparse.Namespace) -> argparse.Namespace:
    """Fill in options the user left unset from --config, if given."""
    if not getattr(args, "config", None):
        return args
    for key, value in load_config_file(args.config).items():
        if getattr(args, key, None) is None:
            setattr(args, key, value)
    return args


def _resolve(value, default, cast):
    if value is None:
        return default
    return cast(value)


def _load_corpus(path, repair=False, entity_types="conll", source="synthetic"):
    text = Path(path).read_text(encoding="utf-8")
    if entity_types == "any":
        return parse_conll(text, repair=repair, source=source, entity_types=None)
    return parse_conll(text, repair=repair, source=source)


def _library(args) -> tuple:
    """(library, provenance info dict) honoring --phrases and --holdout."""
    if getattr(args, "phrases", None):
        lib = load_library(args.phrases)
        origin = str(args.phrases)
    else:
        lib = load_default_library()
        origin = "bundled"
    holdout = float(getattr(args, "holdout", 0) or 0)
    if holdout > 0:
        lib, _ = split_holdout(lib, holdout, random.Random(args.seed))
    return lib, {"phrases": origin, "holdout": holdout, "provenance": lib.provenance}


# ---------------------------------------------------------------------------
# subcommands


def cmd_augment(args) -> int:
    corpus = _load_corpus(args.infile, repair=args.repair_bio)
    library, lib_info = _library(args)
    transitions = tuple(f"to_{t.strip()}" for t in args.transitions.split(","))
    context_prob = {}
    for name in TRANSITIONS:
        flag = getattr(args, f"context_prob_{name.removeprefix('to_')}")
        if flag is not None:
            context_prob[name] = float(flag)
    cfg = AugmentConfig(library, transitions=transitions, percent=args.percent,
                        context_prob=context_prob, seed=args.seed)
    augmented, records = augment_corpus(corpus, cfg)
    Path(args.out).write_text(serialize_conll(augmented), encoding="utf-8")
    records_out = args.records_out or str(args.out) + ".records.jsonl"
    write_records(records, records_out)
    write_manifest(args.out, "augment", vars(args), {"in": args.infile},
                   [args.out, records_out],
                   extra={"library": lib_info, "n_augmented": len(records)})
    print(f"augmented {len(records)} of {len(corpus)} sentences -> {args.out}")
    return 0


def cmd_attack(args) -> int:
    corpus = _load_corpus(args.infile, repair=args.repair_bio)
    inventory = None
    if args.inventory_from:
        inventory = harvest_inventory(_load_corpus(args.inventory_from, repair=args.repair_bio))
    weights = None
    if args.weights:
        weights = {}
        for pair in args.weights.split(","):
            name, _, value = pair.partition("=")
            weights[name.strip()] = float(value)
    attacked, records = attack_corpus(corpus, args.method, percent=args.percent,
                                      seed=args.seed, inventory=inventory, weights=weights)
    Path(args.out).write_text(serialize_conll(attacked), encoding="utf-8")
    records_out = args.records_out or str(args.out) + ".records.jsonl"
    write_attack_records(records, records_out)
    write_manifest(args.out, "attack", vars(args),
                   {"in": args.infile, "inventory": args.inventory_from},
                   [args.out, records_out], extra={"n_attacked": len(records)})
    print(f"attacked {len(records)} of {len(corpus)} sentences -> {args.out}")
    return 0


def cmd_split_phrases(args) -> int:
    library = load_library(args.phrases) if args.phrases else load_default_library()
    train_lib, heldout_lib = split_holdout(library, args.fraction, random.Random(args.seed))
    save_library(train_lib, args.out_train)
    save_library(heldout_lib, args.out_heldout)
    write_manifest(Path(args.out_train) / "split", "split-phrases", vars(args), {},
                   [args.out_train, args.out_heldout],
                   extra={"sizes_train": {str(k): v for k, v in train_lib.sizes().items()},
                          "sizes_heldout": {str(k): v for k, v in heldout_lib.sizes().items()}})
    print(f"train split -> {args.out_train}; heldout -> {args.out_heldout}")
    return 0


def _tagger_config(args) -> TaggerConfig:
    mix_layers = None
    if args.mix_layers:
        mix_layers = tuple(int(m) for m in str(args.mix_layers).split(","))
    return TaggerConfig(
        vocab_size=_resolve(args.vocab_size, 1 << 16, int),
        dim=_resolve(args.dim, 32, int),
        depth=_resolve(args.depth, 12, int),
        mix_layers=mix_layers,
        learning_rate=_resolve(args.lr, 0.5, float),
        epochs=_resolve(args.epochs, 10, int),
        batch_size=_resolve(args.batch_size, 8, int),
        dropout=_resolve(args.dropout, 0.0, float),
        seed=args.seed,
    )


def _mixup_config(args, fewshot: bool) -> MixupConfig:
    base = config_for_percent(int(args.percent or 100), fewshot=fewshot)
    overrides = {}
    for name in ("alpha_orig", "beta_orig", "alpha_aug", "beta_aug",
                 "alpha_orig_ood", "beta_orig_ood", "alpha_aug_ood", "beta_aug_ood"):
        flag = getattr(args, name, None)
        if flag is not None:
            overrides[name] = float(flag)
    if not overrides:
        return base
    merged = asdict(base)
    merged.update(overrides)
    return MixupConfig(**merged)


def cmd_train(args) -> int:
    args = apply_config(args)
    corpus = _load_corpus(args.infile, repair=args.repair_bio)
    records = read_records(args.records) if args.records else None
    augmented = _load_corpus(args.aug, repair=args.repair_bio) if args.aug else None
    ood_corpus = _load_corpus(args.ood, repair=args.repair_bio) if args.ood else None
    ood_records = read_records(args.ood_records) if args.ood_records else None
    cfg = _tagger_config(args)
    mixcfg = _mixup_config(args, fewshot=ood_corpus is not None)
    result = train(corpus, cfg, args.mode, augmented=augmented, records=records,
                   mixcfg=mixcfg, ood_corpus=ood_corpus, ood_records=ood_records)
    save_model(args.out, result.params, cfg)
    outputs = [args.out]
    if args.metrics_out:
        write_metrics(args.metrics_out,
                      [{"epoch": h["epoch"], "split": "train", "loss": h["loss"]}
                       for h in result.history])
        outputs.append(args.metrics_out)
    write_manifest(args.out, "train", vars(args),
                   {"in": args.infile, "aug": args.aug, "records": args.records,
                    "ood": args.ood, "ood_records": args.ood_records},
                   outputs,
                   extra={"tagger": asdict(cfg), "mixup": asdict(mixcfg),
                          "final_loss": result.history[-1]["loss"]})
    print(f"trained {args.mode} for {cfg.epochs} epochs, "
          f"final loss {result.history[-1]['loss']:.4f} -> {args.out}")
    return 0


def cmd_eval(args) -> int:
    gold = _load_corpus(args.gold, repair=args.repair_bio)
    pred = _load_corpus(args.pred, repair=args.repair_bio)
    report = entity_f1(gold, pred)
    print(format_report(report))
    payload = json.loads(report.to_json())
    if args.records:
        records = read_records(args.records)
        breakdown = per_transition_report(gold, pred, records)
        payload["per_transition"] = {t: json.loads(r.to_json())
                                     for t, r in breakdown.items()}
        for transition, rep in sorted(breakdown.items()):
            print(f"\n[{transition}]")
            print(format_report(rep))
    if args.json:
        Path(args.json).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
        write_manifest(args.json, "eval", vars(args),
                       {"gold": args.gold, "pred": args.pred, "records": args.records},
                       [args.json])
    return 0


def cmd_predict(args) -> int:
    params, cfg = load_model(args.model)
    corpus = _load_corpus(args.infile, repair=True)
    predicted = predict_corpus(params, corpus, cfg)
    Path(args.out).write_text(serialize_conll(predicted), encoding="utf-8")
    write_manifest(args.out, "predict", vars(args),
                   {"model": args.model, "in": args.infile}, [args.out])
    print(f"labeled {len(predicted)} sentences -> {args.out}")
    return 0


def cmd_fewshot(args) -> int:
    mapping = load_type_mapping(Path(args.mapping).read_text(encoding="utf-8")) \
        if args.mapping else DEFAULT_TYPE_MAPPING
    rng = random.Random(args.seed)
    train_raw = _load_corpus(args.train, repair=args.repair_bio, entity_types="any")
    train_mapped = map_corpus_types(train_raw, mapping, source="OOD-train")
    shots = sample_fewshot(train_mapped, args.k, rng)
    Path(args.out_train).write_text(serialize_conll(shots), encoding="utf-8")
    outputs = [args.out_train]
    if args.test:
        test_raw = _load_corpus(args.test, repair=args.repair_bio, entity_types="any")
        test_mapped = map_corpus_types(test_raw, mapping, source="OOD-test")
        dense = filter_by_entity_ratio(test_mapped, args.min_ratio)
        n = min(args.ood_test_size, len(dense))
        picked = sorted(rng.sample(range(len(dense)), n))
        ood_test = Corpus(tuple(dense.sentences[i] for i in picked), source="OOD-test")
        Path(args.out_test).write_text(serialize_conll(ood_test), encoding="utf-8")
        outputs.append(args.out_test)
        print(f"{len(shots)} few-shot sentences; {len(ood_test)} test sentences "
              f"(ratio > {args.min_ratio})")
    else:
        print(f"{len(shots)} few-shot sentences")
    write_manifest(args.out_train, "fewshot", vars(args),
                   {"train": args.train, "test": args.test, "mapping": args.mapping},
                   outputs)
    return 0


def cmd_matrix(args) -> int:
    args = apply_config(args)
    train_corpus = _load_corpus(args.train, repair=args.repair_bio, source="ID-train")
    test_corpus = _load_corpus(args.test, repair=args.repair_bio, source="ID-test")
    library, lib_info = _library(args)
    full_library = load_library(args.phrases) if args.phrases else load_default_library()

    modes = [m.strip() for m in (args.modes or "plain,at,at_dropout,at_mixup,textflint").split(",")]
    percents = [int(p) for p in (args.percents or "10,30,50,100").split(",")]
    n_runs = _resolve(args.runs, 3, int)

    # the challenge split comes from the test set with the full phrase sets
    challenge, _ = augment_corpus(
        test_corpus, AugmentConfig(full_library, percent=100, seed=args.seed + 1000))

    ood_test = None
    ood_shots = None
    if args.ontonotes_train:
        mapping = DEFAULT_TYPE_MAPPING if not args.mapping else \
            load_type_mapping(Path(args.mapping).read_text(encoding="utf-8"))
        onto_train = map_corpus_types(
            _load_corpus(args.ontonotes_train, repair=True, entity_types="any"),
            mapping, source="OOD-train")
        ood_shots = sample_fewshot(onto_train, 5, random.Random(args.seed))
        if args.ontonotes_test:
            onto_test = map_corpus_types(
                _load_corpus(args.ontonotes_test, repair=True, entity_types="any"),
                mapping, source="OOD-test")
            dense = filter_by_entity_ratio(onto_test, 0.49)
            rng = random.Random(args.seed)
            picked = sorted(rng.sample(range(len(dense)), min(50, len(dense))))
            ood_test = Corpus(tuple(dense.sentences[i] for i in picked), source="OOD-test")

    rows = []
    for mode in modes:
        for percent in percents if mode != "plain" else [0]:
            seeds = [args.seed + i for i in range(n_runs)]
            split_scores: dict[str, list[float]] = {}
            for seed in seeds:
                cfg = _tagger_config(args)
                cfg.seed = seed
                records = None
                ood_records = None
                train_mode = mode
                if mode == "textflint":
                    attacked, _ = attack_corpus(train_corpus, "mix",
                                                percent=percent, seed=seed)
                    result = train(train_corpus, cfg, "at", augmented=attacked)
                elif mode == "plain":
                    result = train(train_corpus, cfg, "plain")
                else:
                    acfg = AugmentConfig(library, percent=percent, seed=seed)
                    _, records = augment_corpus(train_corpus, acfg)
                    if ood_shots is not None and mode == "at_mixup":
                        _, ood_records = augment_corpus(ood_shots, AugmentConfig(
                            library, percent=percent, seed=seed + 7))
                    mixcfg = config_for_percent(percent or 100,
                                                fewshot=ood_shots is not None)
                    result = train(train_corpus, cfg, mode, records=records,
                                   mixcfg=mixcfg, ood_corpus=ood_shots,
                                   ood_records=ood_records)
                splits = {"ID": test_corpus, "CS": challenge}
                if ood_test is not None:
                    splits["OOD"] = ood_test
                for split, gold in splits.items():
                    pred = predict_corpus(result.params, gold, cfg)
                    split_scores.setdefault(split, []).append(entity_f1(gold, pred).micro.f1)
            for split, scores in split_scores.items():
                rows.append({"mode": mode, "percent": percent or "", "split": split,
                             "f1_mean": round(float(np.mean(scores)), 4),
                             "n_runs": n_runs,
                             "seeds": ";".join(str(s) for s in seeds)})
                print(f"{mode:<10} {percent or '-':>4} {split:<4} "
                      f"F1={rows[-1]['f1_mean']:.4f} (n={n_runs})")

    import csv

    with open(args.out, "w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=["mode", "percent", "split",
                                               "f1_mean", "n_runs", "seeds"])
        writer.writeheader()
        writer.writerows(rows)
    write_manifest(args.out, "matrix", vars(args),
                   {"train": args.train, "test": args.test,
                    "ontonotes_train": args.ontonotes_train,
                    "ontonotes_test": args.ontonotes_test},
                   [args.out], extra={"library": lib_info})
    print(f"wrote {len(rows)} rows -> {args.out}")
    return 0


def cmd_curate_serve(args) -> int:
    store_path = args.store or os.environ.get(STORE_ENV_VAR)
    if not store_path:
        raise UsageError(f"--store or ${STORE_ENV_VAR} is required")
    tokens = load_tokens(args.tokens) if args.tokens else None
    static_dir = args.static
    if static_dir is None:
        bundled = Path(__file__).parent / "data" / "ui"
        static_dir = bundled if bundled.is_dir() else None
    print(f"serving curation store {store_path} on port {args.port}")
    serve(store_path, args.port, tokens=tokens, static_dir=static_dir)
    return 0


def cmd_curate_ingest(args) -> int:
    store_path = args.store or os.environ.get(STORE_ENV_VAR)
    if not store_path:
        raise UsageError(f"--store or ${STORE_ENV_VAR} is required")
    originals = _load_corpus(args.infile, repair=args.repair_bio)
    records = read_records(args.records)
    candidates = Corpus(tuple(r.result for r in records), source="CS")
    store = CurationStore(store_path, calibration_size=args.calibration_size)
    total = store.ingest(originals, candidates, records, seed=args.seed)
    print(f"store now holds {total} items "
          f"({len(store.calibration_ids)} in the calibration sample)")
    return 0


def cmd_curate_export(args) -> int:
    store_path = args.store or os.environ.get(STORE_ENV_VAR)
    if not store_path:
        raise UsageError(f"--store or ${STORE_ENV_VAR} is required")
    store = CurationStore(store_path)
    corpus = store.export(args.policy)
    Path(args.out).write_text(serialize_conll(corpus), encoding="utf-8")
    write_manifest(args.out, "curate-export", vars(args), {"store": store_path},
                   [args.out], extra={"n_exported": len(corpus)})
    print(f"exported {len(corpus)} sentences under policy {args.policy} -> {args.out}")
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entshift",
        description="Expert-guided entity-type transitions, mixup training, "
                    "and challenge-set curation for NER.")
    parser.add_argument("--version", action="version", version=f"entshift {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_common(p, seed=True):
        if seed:
            p.add_argument("--seed", type=int, default=0)
        p.add_argument("--repair-bio", action="store_true",
                       help="turn orphan I-X tags into B-X instead of failing")
        p.add_argument("--config", help="key=value file merged under the flags")

    p = sub.add_parser("augment", help="apply the guided entity-type transitions")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--records-out")
    p.add_argument("--percent", type=int, default=100)
    p.add_argument("--transitions", default="org,loc,per")
    p.add_argument("--phrases", help="phrase set directory (bundled sets by default)")
    p.add_argument("--holdout", type=float, default=0.0,
                   help="fraction of each phrase set withheld from augmentation")
    for t in ("org", "loc", "per"):
        p.add_argument(f"--context-prob-{t}", dest=f"context_prob_{t}", type=float)
    add_common(p)
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("attack", help="apply a baseline text attack")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--records-out")
    p.add_argument("--method", required=True, choices=METHODS + ("mix",))
    p.add_argument("--weights", help="mix weights, e.g. typos=1,concat=0.5")
    p.add_argument("--percent", type=int, default=100)
    p.add_argument("--inventory-from", help="corpus to harvest entity forms from")
    add_common(p)
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("split-phrases", help="hold out a fraction of each phrase set")
    p.add_argument("--phrases")
    p.add_argument("--fraction", type=float, default=0.25)
    p.add_argument("--out-train", required=True)
    p.add_argument("--out-heldout", required=True)
    add_common(p)
    p.set_defaults(func=cmd_split_phrases)

    def add_tagger_flags(p):
        p.add_argument("--vocab-size", type=int)
        p.add_argument("--dim", type=int)
        p.add_argument("--depth", type=int)
        p.add_argument("--mix-layers", help="comma list, e.g. 8,9,10")
        p.add_argument("--lr", type=float)
        p.add_argument("--epochs", type=int)
        p.add_argument("--batch-size", type=int)
        p.add_argument("--dropout", type=float)

    p = sub.add_parser("train", help="train the tagger")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--mode", default="plain",
                   choices=("plain", "at", "at_dropout", "at_mixup"))
    p.add_argument("--aug", help="augmented corpus (derived from --records if absent)")
    p.add_argument("--records", help="augmentation records JSONL")
    p.add_argument("--ood", help="few-shot out-of-domain corpus")
    p.add_argument("--ood-records", help="records for the ood corpus")
    p.add_argument("--percent", type=int,
                   help="augmentation percent; selects default beta parameters")
    for name in ("alpha-orig", "beta-orig", "alpha-aug", "beta-aug",
                 "alpha-orig-ood", "beta-orig-ood", "alpha-aug-ood", "beta-aug-ood"):
        p.add_argument(f"--{name}", dest=name.replace("-", "_"), type=float)
    p.add_argument("--out", required=True)
    p.add_argument("--metrics-out")
    add_tagger_flags(p)
    add_common(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="label a corpus with a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    add_common(p, seed=False)
    p.set_defaults(func=cmd_predict, seed=0)

    p = sub.add_parser("eval", help="entity-level F1 of predictions against gold")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--records", help="per-transition breakdown from these records")
    p.add_argument("--json", help="write the report as JSON here")
    add_common(p, seed=False)
    p.set_defaults(func=cmd_eval, seed=0)

    p = sub.add_parser("fewshot", help="build the few-shot out-of-domain splits")
    p.add_argument("--train", required=True, help="out-of-domain training corpus")
    p.add_argument("--test", help="out-of-domain test corpus")
    p.add_argument("--mapping", help="SOURCE<TAB>TARGET type mapping file")
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--min-ratio", type=float, default=0.49)
    p.add_argument("--ood-test-size", type=int, default=50)
    p.add_argument("--out-train", required=True)
    p.add_argument("--out-test")
    add_common(p)
    p.set_defaults(func=cmd_fewshot)

    p = sub.add_parser("matrix", help="mode x percent experiment grid")
    p.add_argument("--train", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--phrases")
    p.add_argument("--holdout", type=float, default=0.0)
    p.add_argument("--modes")
    p.add_argument("--percents")
    p.add_argument("--runs", type=int)
    p.add_argument("--ontonotes-train")
    p.add_argument("--ontonotes-test")
    p.add_argument("--mapping")
    p.add_argument("--out", required=True)
    add_tagger_flags(p)
    add_common(p)
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("curate", help="challenge-set curation service")
    csub = p.add_subparsers(dest="curate_command", required=True)

    c = csub.add_parser("serve", help="run the annotation backend")
    c.add_argument("--store", help=f"JSONL log path (or ${STORE_ENV_VAR})")
    c.add_argument("--port", type=int, default=8571)
    c.add_argument("--tokens", help="JSON file mapping bearer token -> annotator id")
    c.add_argument("--static", help="directory of frontend assets to serve")
    add_common(c, seed=False)
    c.set_defaults(func=cmd_curate_serve, seed=0)

    c = csub.add_parser("ingest", help="load augmented candidates into the store")
    c.add_argument("--store", help=f"JSONL log path (or ${STORE_ENV_VAR})")
    c.add_argument("--in", dest="infile", required=True, help="original corpus")
    c.add_argument("--records", required=True, help="augmentation records JSONL")
    c.add_argument("--calibration-size", type=int, default=DEFAULT_CALIBRATION_SIZE)
    add_common(c)
    c.set_defaults(func=cmd_curate_ingest)

    c = csub.add_parser("export", help="write the curated corpus")
    c.add_argument("--store", help=f"JSONL log path (or ${STORE_ENV_VAR})")
    c.add_argument("--policy", default="all-high")
    c.add_argument("--out", required=True)
    add_common(c, seed=False)
    c.set_defaults(func=cmd_curate_export, seed=0)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(json.dumps({"error": str(exc), "type": "UsageError"}), file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(json.dumps({"error": str(exc), "type": type(exc).__name__}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
