"""Command-line interface.

Subcommands: parse, classify, scale (search/induce/apply), tag
(baseline/train/predict/eval), embed (train/export/neighbors), overlap,
fixtures. Every command is deterministic given its flags and config; exit
codes are 0 (success), 1 (validation error), 2 (runtime failure).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .classifiers import DecisionTree, TrainingError
from .datasets import (
    DataError,
    augment_with_swaps,
    component_overlap_analysis,
    generate_swap_corpus,
    load_cc_list,
    load_ee_list,
    read_corpus,
    read_tagged_corpus,
    write_corpus,
    write_tagged_corpus,
)
from .embeddings import (
    EmbeddingParams,
    EmbeddingTable,
    OOVError,
    export_csv,
    load_embeddings,
    neighbors,
    save_embeddings,
    train_skipgram,
)
from .experiments import (
    DEFAULT_K_GRID,
    K_ALL,
    ExperimentConfig,
    importance_curve,
    run_classification_experiment,
)
from .features import FeatureError, load_space
from .fixtures import (
    make_ee_records,
    make_overlap_corpus,
    make_tagging_corpus,
    toy_language,
    write_ee_tsv,
)
from .phonology import (
    InventoryError,
    NoParse,
    PhonemeClass,
    data_dir,
    load_inventory,
    load_mc_readings,
    load_profile,
    parse_syllable,
    write_inventory,
)
from .scales import (
    ExpectedHalf,
    RandomCoin,
    ScaleError,
    induce_scale_from_tree,
    load_scale,
    rule_accuracy,
    save_scale,
    search_best_scale,
)
from .tagging import (
    TaggerParams,
    WindowTagger,
    baseline_tag,
    evaluate_tags,
    extract_word_embeddings,
    in_context_accuracy,
    tag_with_model,
    train_window_tagger,
)

VALIDATION_ERRORS = (DataError, InventoryError, ScaleError, FeatureError,
                     TrainingError, OOVError, NoParse, FileNotFoundError,
                     json.JSONDecodeError, ValueError, KeyError)

STAGE_ALIASES = {"parsable": "parsable", "regex": "parsable", "sim": "similarity",
                 "similarity": "similarity", "scale": "scale"}


class Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems are validation errors: exit 1
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _profile(args) -> "LanguageProfile":  # noqa: F821
    if getattr(args, "inventory", None):
        inv = load_inventory(args.inventory)
        focal = PhonemeClass(args.focal) if getattr(args, "focal", None) else \
            PhonemeClass.TONE
        from .phonology import LanguageProfile
        return LanguageProfile(inv.language, inv, focal)
    if not getattr(args, "lang", None):
        raise ValueError("either --lang or --inventory is required")
    return load_profile(args.lang, getattr(args, "data_dir", None))


def _records(args, profile):
    readings = load_mc_readings(args.mc_readings) if getattr(args, "mc_readings", None) \
        else None
    if getattr(args, "ee", None):
        return load_ee_list(args.ee, profile, readings)
    if getattr(args, "cc", None):
        return load_cc_list(args.cc, profile, readings)
    raise ValueError("either --ee or --cc is required")


def _parse_stages(spec: str) -> tuple[str, ...]:
    if spec.strip().lower() in ("none", ""):
        return ()
    out = []
    for name in spec.split(","):
        key = name.strip().lower()
        if key not in STAGE_ALIASES:
            raise ValueError(f"unknown stage {name!r}; use parsable, sim, scale or none")
        out.append(STAGE_ALIASES[key])
    return tuple(out)


def _parse_k_grid(spec: str) -> tuple[int, ...]:
    out = []
    for chunk in spec.split(","):
        chunk = chunk.strip().lower()
        out.append(K_ALL if chunk == "all" else int(chunk))
    return tuple(out)


def _out_dir(args) -> Path:
    out = Path(getattr(args, "out", None) or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


# --- parse ------------------------------------------------------------------------


def cmd_parse(args) -> int:
    profile = _profile(args)
    for token in args.tokens:
        try:
            s = parse_syllable(profile.inventory, token)
            print(f"{token}\t{s.onset}\t{s.rhyme}\t{s.tone}")
        except NoParse:
            print(f"{token}\tNOPARSE")
    return 0


# --- classify ---------------------------------------------------------------------


def _load_embeddings_for(cfg_doc: dict, base: Path) -> tuple[EmbeddingTable | None, str | None]:
    spec = cfg_doc.get("embeddings")
    if not spec:
        return None, None
    source = spec.get("source", "skipgram")
    if source == "tagger-standin":
        model = WindowTagger.load(base / spec["model"] if not Path(spec["model"]).is_absolute()
                                  else spec["model"])
        return extract_word_embeddings(model), "tagger-standin"
    if source == "skipgram":
        if "path" in spec:
            p = Path(spec["path"])
            return load_embeddings(p if p.is_absolute() else base / p), "sg"
        params = EmbeddingParams(**{k: v for k, v in spec.items()
                                    if k not in ("source", "corpus")})
        corpus_path = Path(spec["corpus"])
        corpus = read_corpus(corpus_path if corpus_path.is_absolute()
                             else base / corpus_path)
        return train_skipgram(corpus, params), "sg"
    raise ValueError(f"unknown embeddings source {source!r}")


def _resolve(base: Path, p: str) -> Path:
    path = Path(p)
    return path if path.is_absolute() else base / path


def cmd_classify(args) -> int:
    doc = json.loads(Path(args.config).read_text(encoding="utf-8"))
    base = Path(args.config).resolve().parent
    language = doc["language"]
    profile = load_profile(language, doc.get("data_dir") or getattr(args, "data_dir", None)) \
        if language in ("hmong", "lahu", "mandarin", "middle-chinese", "mc") else None
    if profile is None:
        from .phonology import LanguageProfile
        inv = load_inventory(_resolve(base, doc["inventory"]))
        profile = LanguageProfile(language, inv,
                                  PhonemeClass(doc.get("focal", "tone")))
    readings = load_mc_readings(_resolve(base, doc["mc_readings"])) \
        if doc.get("mc_readings") else None
    if doc.get("ee_list"):
        records = load_ee_list(_resolve(base, doc["ee_list"]), profile, readings)
    elif doc.get("cc_list"):
        records = load_cc_list(_resolve(base, doc["cc_list"]), profile, readings)
    else:
        raise ValueError("config needs ee_list or cc_list")

    emb, emb_label = _load_embeddings_for(doc, base)
    k_grid = tuple(K_ALL if k == "all" else int(k) for k in
                   doc.get("k_grid", [])) or DEFAULT_K_GRID
    if args.k_grid:
        k_grid = _parse_k_grid(args.k_grid)
    split = tuple(doc.get("split", (0.56, 0.14, 0.30)))
    cfg = ExperimentConfig(
        language=language,
        classifiers=tuple(doc.get("classifiers", ("rules", "tree", "rbf-svm"))),
        feature_sets=tuple(doc.get("feature_sets", ("focal", "all"))),
        seed=args.seed if args.seed is not None else int(doc.get("seed", 13)),
        unique_pairs=args.unique_pairs or bool(doc.get("unique_pairs", False)),
        repetitions=args.reps or int(doc.get("repetitions", 10)),
        k_grid=k_grid,
        split=split,  # type: ignore[arg-type]
        embeddings_source=emb_label,
        svm_c=float(doc.get("svm", {}).get("C", 1.0)),
        svm_gamma=doc.get("svm", {}).get("gamma"),
        svm_lambda=float(doc.get("svm", {}).get("lambda", 1e-4)),
        svm_epochs=int(doc.get("svm", {}).get("epochs", 30)),
    )
    scale = None
    if "rules" in cfg.classifiers:
        scale_path = _resolve(base, doc["scale"]) if doc.get("scale") else \
            data_dir() / f"{profile.language.replace('-', '_')}_table2.scale"
        scale = load_scale(scale_path, profile.focal)

    report = run_classification_experiment(cfg, records, profile, emb, scale)
    out = _out_dir(args)
    rows = report.as_rows()
    cols = ["language", "data", "classifier", "features", "accuracy", "n", "runs", "k"]
    from .reports import render_accuracy_bars, write_rows_csv, write_table
    write_rows_csv(rows, out / "classify.csv", cols)
    write_table(rows, out / "classify.txt", cols)
    (out / "config.json").write_text(
        json.dumps({"config": report.config, "fingerprint": report.fingerprint},
                   indent=1), encoding="utf-8")
    if not args.no_figures:
        render_accuracy_bars(rows, out / "classify.png",
                             title=f"{language}: classification accuracy")
    if args.dump_models and "tree" in cfg.classifiers:
        _dump_tree_models(cfg, records, profile, emb, out)
    if args.importance:
        if emb is None:
            raise ValueError("--importance needs an embeddings section in the config")
        points, natural = importance_curve(records, profile, emb, cfg)
        imp_rows = [{"k": p.k, "test_accuracy": round(p.test_accuracy, 4),
                     **{t: round(v, 4) for t, v in p.proportions.items()}}
                    for p in points]
        write_rows_csv(imp_rows, out / "importance.csv")
        write_table(imp_rows, out / "importance.txt")
        if not args.no_figures:
            from .reports import render_importance_curve
            render_importance_curve(points, natural, out / "importance.png")
    sys.stdout.write(format_report(rows, cols))
    return 0


def format_report(rows, cols) -> str:
    from .reports import format_table
    return format_table(rows, cols)


def _dump_tree_models(cfg: ExperimentConfig, records, profile, emb, out: Path) -> None:
    """Train and save one tree + feature space per feature set, for scale induce."""
    from .classifiers import train_tree
    from .datasets import split_then_augment
    from .experiments import _space_for
    from .features import encode_matrix, save_space
    for feature_set in cfg.feature_sets:
        if "embeddings" in feature_set and emb is None:
            continue
        space = _space_for(feature_set.replace("wv-sg", "embeddings")
                           .replace("wv-tagger-standin", "embeddings"),
                           profile, emb)
        split = split_then_augment(records, cfg.split_spec(cfg.seed))
        X, y = encode_matrix(split.train + split.dev, space, emb)
        tree = train_tree(X, y, cfg.tree, cfg.seed)
        slug = feature_set.replace("+", "_")
        tree.to_json(out / f"tree_{slug}.json")
        save_space(space, out / f"space_{slug}.json")


# --- scale ------------------------------------------------------------------------


def cmd_scale_search(args) -> int:
    profile = _profile(args)
    records = _records(args, profile)
    examples = augment_with_swaps(records, seed=args.seed)
    symbols = list(profile.inventory.symbols(profile.focal))
    scale, acc = search_best_scale(examples, symbols, profile.focal)
    if args.out:
        save_scale(scale, args.out)
    print(f"best scale: {scale}")
    print(f"train accuracy: {acc:.4f}")
    return 0


def cmd_scale_induce(args) -> int:
    tree = DecisionTree.from_json(args.tree)
    space, _ = load_space(args.space)
    focal = PhonemeClass(args.focal)
    scale = induce_scale_from_tree(tree, space, focal)
    if args.out:
        save_scale(scale, args.out)
    print(str(scale) if scale.groups else "(empty scale)")
    if scale.unranked:
        print("unranked: " + ",".join(sorted(scale.unranked)))
    return 0


def cmd_scale_apply(args) -> int:
    profile = _profile(args)
    scale = load_scale(args.scale, profile.focal)
    records = _records(args, profile)
    examples = augment_with_swaps(records, seed=args.seed)
    policy = RandomCoin(args.seed or 0) if args.policy == "coin" else ExpectedHalf()
    acc = rule_accuracy(scale, examples, policy)
    print(f"examples: {len(examples)}")
    print(f"accuracy: {acc:.4f}")
    return 0


# --- tag --------------------------------------------------------------------------


def cmd_tag_baseline(args) -> int:
    profile = _profile(args) if (args.lang or args.inventory) else None
    stages = _parse_stages(args.stages)
    emb = load_embeddings(args.emb) if args.emb else None
    scale = load_scale(args.scale, profile.focal if profile else None) \
        if args.scale else None
    corpus = read_corpus(args.corpus)
    tagged = baseline_tag(corpus, profile, emb, scale, args.alpha, stages)
    write_tagged_corpus(tagged, args.out)
    n_spans = sum(1 for s in tagged for t in s.tags if t == "B")
    print(f"tagged {n_spans} spans across {len(tagged)} sentences "
          f"(stages: {','.join(stages) or 'none'})")
    return 0


def cmd_tag_train(args) -> int:
    train = read_tagged_corpus(args.train)
    dev = read_tagged_corpus(args.dev) if args.dev else []
    profile = _profile(args) if (args.lang or args.inventory) else None
    params = TaggerParams(lr=args.lr, max_epochs=args.epochs, patience=args.patience,
                          seed=args.seed or 0, use_phonemes=args.phonemes)
    model = train_window_tagger(train, dev, params, profile)
    model.save(args.out)
    h = model.history
    print(f"trained {len(model.tags)}-tag model: epochs={h['epochs_run']} "
          f"best_epoch={h['best_epoch']} dev_span_f1={h['best_dev_span_f1']:.4f}")
    return 0


def cmd_tag_predict(args) -> int:
    profile = _profile(args) if (args.lang or args.inventory) else None
    model = WindowTagger.load(args.model, profile)
    corpus = read_corpus(args.corpus)
    write_tagged_corpus(tag_with_model(model, corpus), args.out)
    return 0


def cmd_tag_eval(args) -> int:
    pred = read_tagged_corpus(args.pred)
    gold = read_tagged_corpus(args.gold)
    metrics = evaluate_tags(pred, gold)
    from .reports import (render_confusion, tag_metrics_rows, write_confusion_csv,
                          write_rows_csv, write_table)
    rows = tag_metrics_rows(metrics, model=Path(args.pred).stem)
    out = _out_dir(args)
    write_rows_csv(rows, out / "metrics.csv")
    write_table(rows, out / "metrics.txt")
    write_confusion_csv(metrics.confusion, metrics.tag_order, out / "confusion.csv")
    if not args.no_figures:
        render_confusion(metrics.confusion, metrics.tag_order, out / "confusion.png")
    sys.stdout.write(format_report(rows, ["model", "level", "precision", "recall", "f1"]))
    has_fakes = any(t in ("B-fake", "I-fake") for s in gold for t in s.tags)
    if args.swap or has_fakes:
        acc = in_context_accuracy(metrics.confusion, metrics.tag_order)
        print(f"in-context accuracy: {acc:.4f}")
    return 0


# --- embed ------------------------------------------------------------------------


def cmd_embed_train(args) -> int:
    corpus = read_corpus(args.corpus)
    params = EmbeddingParams(dim=args.dim, window=args.window, negatives=args.negatives,
                             epochs=args.epochs, min_count=args.min_count,
                             lr=args.lr, seed=args.seed or 0)
    emb = train_skipgram(corpus, params)
    save_embeddings(emb, args.out)
    print(f"trained {len(emb.vocab)} x {emb.dim} embeddings (single worker)")
    return 0


def cmd_embed_export(args) -> int:
    export_csv(load_embeddings(args.emb), args.out)
    return 0


def cmd_embed_neighbors(args) -> int:
    emb = load_embeddings(args.emb)
    for tok, sim in neighbors(emb, args.word, args.k):
        print(f"{tok}\t{sim:.4f}")
    return 0


# --- overlap ----------------------------------------------------------------------


def cmd_overlap(args) -> int:
    profile = _profile(args)
    readings = load_mc_readings(args.mc_readings) if args.mc_readings else None
    train = load_ee_list(args.train_ee, profile, readings)
    test = load_ee_list(args.test_ee, profile, readings)
    cc = load_cc_list(args.cc, profile, readings) if args.cc else None
    corpus = read_corpus(args.corpus) if args.corpus else None
    counts = component_overlap_analysis(train, test, cc, corpus)
    out = _out_dir(args)
    from .reports import render_overlap_box, write_rows_csv
    rows = [{"test_pair": r[0], "same_order_ee": r[1], "reversed_ee": r[2],
             "same_order_cc": r[3], "reversed_cc": r[4]} for r in counts.per_test]
    write_rows_csv(rows, out / "overlap.csv")
    if not args.no_figures:
        render_overlap_box(counts.per_test, out / "overlap.png")
    print(f"same-order EE: {counts.same_order_ee}  reversed EE: {counts.reversed_ee}")
    print(f"same-order CC: {counts.same_order_cc}  reversed CC: {counts.reversed_cc}")
    return 0


# --- fixtures ---------------------------------------------------------------------


def cmd_fixtures(args) -> int:
    out = _out_dir(args)
    seed = args.seed or 0
    toy = toy_language(seed=seed)
    write_inventory(toy.inventory, out / "toy.inv")
    save_scale(toy.scale, out / "planted.scale")
    records = make_ee_records(toy, args.n_records, seed + 1)
    write_ee_tsv(records, out / "planted_ees.tsv")

    fx = make_tagging_corpus(n_sentences=args.n_sentences,
                             n_ees=max(20, args.n_sentences // 100),
                             n_distractors=max(40, args.n_sentences // 25),
                             seed=seed)
    write_inventory(fx.toy.inventory, out / "toy_rich.inv")
    save_scale(fx.toy.scale, out / "planted_rich.scale")
    write_tagged_corpus(fx.corpus, out / "tagging_gold.tsv")
    write_corpus([s.tokens for s in fx.corpus], out / "tagging_raw.txt")
    swap = generate_swap_corpus(fx.corpus, swap_frac=0.5, seed=seed)
    write_tagged_corpus(swap, out / "tagging_swap.tsv")

    ov = make_overlap_corpus(n_pairs=20, n_negatives=300, seed=seed)
    for name, corpus in (("train", ov.train), ("dev", ov.dev), ("test", ov.test)):
        write_tagged_corpus(corpus, out / f"overlap_{name}.tsv")
    write_ee_tsv(ov.train_records, out / "overlap_train_ees.tsv")
    write_ee_tsv(ov.test_records, out / "overlap_test_ees.tsv")

    from .fixtures import make_embedding_corpus
    corpus, planted, never = make_embedding_corpus(seed=seed)
    write_corpus(corpus, out / "emb_corpus.txt")

    config = {
        "language": "toy",
        "inventory": "toy.inv",
        "focal": "tone",
        "ee_list": "planted_ees.tsv",
        "scale": "planted.scale",
        "classifiers": ["rules", "tree", "linear-svm", "rbf-svm"],
        "feature_sets": ["focal", "all"],
        "seed": seed,
        "k_grid": [6, 12, "all"],
    }
    (out / "config_classify.json").write_text(json.dumps(config, indent=1),
                                              encoding="utf-8")
    print(f"fixtures written to {out}")
    return 0


# --- wiring -----------------------------------------------------------------------


def _add_profile_flags(p: Parser, focal_flag: bool = True) -> None:
    p.add_argument("--lang", help="shipped language profile "
                                  "(hmong, lahu, mandarin, middle-chinese)")
    p.add_argument("--inventory", help="inventory file overriding --lang")
    p.add_argument("--data-dir", dest="data_dir",
                   help="directory with inventories/scales (default: "
                        "EEORDER_DATA or the packaged data)")
    if focal_flag:
        p.add_argument("--focal", choices=["tone", "rhyme"],
                       help="focal constituent when using --inventory")


def build_parser() -> Parser:
    root = Parser(prog="eeorder",
                  description="Phonological and distributional models of "
                              "coordinate-compound word order")
    root.add_argument("--version", action="version", version=__version__)
    sub = root.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="decompose tokens into onset/rhyme/tone")
    _add_profile_flags(p)
    p.add_argument("tokens", nargs="+")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("classify", help="run the classification experiment matrix")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default="classify_out")
    p.add_argument("--seed", type=int)
    p.add_argument("--unique-pairs", action="store_true")
    p.add_argument("--reps", type=int)
    p.add_argument("--k-grid", dest="k_grid", help="comma list, e.g. 6,12,all")
    p.add_argument("--importance", action="store_true",
                   help="emit the linear-SVM feature-importance curve")
    p.add_argument("--dump-models", action="store_true",
                   help="save trained trees + feature spaces for scale induce")
    p.add_argument("--no-figures", action="store_true")
    p.add_argument("--data-dir", dest="data_dir")
    p.set_defaults(func=cmd_classify)

    scale = sub.add_parser("scale", help="search, induce, or apply ordering scales")
    ssub = scale.add_subparsers(dest="scale_command", required=True)
    p = ssub.add_parser("search", help="exhaustive search over focal orders")
    _add_profile_flags(p)
    p.add_argument("--ee")
    p.add_argument("--cc")
    p.add_argument("--mc-readings", dest="mc_readings")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_scale_search)
    p = ssub.add_parser("induce", help="derive a scale from a trained tree")
    p.add_argument("--tree", required=True)
    p.add_argument("--space", required=True)
    p.add_argument("--focal", choices=["tone", "rhyme"], default="tone")
    p.add_argument("--out")
    p.set_defaults(func=cmd_scale_induce)
    p = ssub.add_parser("apply", help="score a dataset against a scale file")
    _add_profile_flags(p)
    p.add_argument("--scale", required=True)
    p.add_argument("--ee")
    p.add_argument("--cc")
    p.add_argument("--mc-readings", dest="mc_readings")
    p.add_argument("--policy", choices=["expected-half", "coin"],
                   default="expected-half")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_scale_apply)

    tag = sub.add_parser("tag", help="EE tagging: baseline cascade, training, eval")
    tsub = tag.add_subparsers(dest="tag_command", required=True)
    p = tsub.add_parser("baseline", help="rule cascade over a raw corpus")
    _add_profile_flags(p)
    p.add_argument("--corpus", required=True)
    p.add_argument("--stages", default="none",
                   help="comma list of parsable,sim,scale, or none")
    p.add_argument("--alpha", type=float, default=0.4)
    p.add_argument("--emb")
    p.add_argument("--scale")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_tag_baseline)
    p = tsub.add_parser("train", help="train the windowed log-linear tagger")
    _add_profile_flags(p)
    p.add_argument("--train", required=True)
    p.add_argument("--dev")
    p.add_argument("--out", required=True)
    p.add_argument("--phonemes", action="store_true")
    p.add_argument("--lr", type=float, default=0.2)
    p.add_argument("--epochs", type=int, default=40)
    p.add_argument("--patience", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_tag_train)
    p = tsub.add_parser("predict", help="tag a raw corpus with a trained model")
    _add_profile_flags(p)
    p.add_argument("--model", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_tag_predict)
    p = tsub.add_parser("eval", help="compare predicted tags to gold")
    p.add_argument("--pred", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--out", default="tag_eval_out")
    p.add_argument("--swap", action="store_true",
                   help="require and print in-context swap accuracy")
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_tag_eval)

    embed = sub.add_parser("embed", help="train/export/query word embeddings")
    esub = embed.add_subparsers(dest="embed_command", required=True)
    p = esub.add_parser("train")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--dim", type=int, default=100)
    p.add_argument("--window", type=int, default=5)
    p.add_argument("--negatives", type=int, default=5)
    p.add_argument("--epochs", type=int, default=5)
    p.add_argument("--min-count", dest="min_count", type=int, default=5)
    p.add_argument("--lr", type=float, default=0.025)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_embed_train)
    p = esub.add_parser("export")
    p.add_argument("--emb", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_embed_export)
    p = esub.add_parser("neighbors")
    p.add_argument("--emb", required=True)
    p.add_argument("--word", required=True)
    p.add_argument("-k", type=int, default=10)
    p.set_defaults(func=cmd_embed_neighbors)

    p = sub.add_parser("overlap", help="component-overlap analysis of train vs test EEs")
    _add_profile_flags(p)
    p.add_argument("--train-ee", dest="train_ee", required=True)
    p.add_argument("--test-ee", dest="test_ee", required=True)
    p.add_argument("--cc")
    p.add_argument("--corpus")
    p.add_argument("--mc-readings", dest="mc_readings")
    p.add_argument("--out", default="overlap_out")
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_overlap)

    p = sub.add_parser("fixtures", help="generate the synthetic datasets used "
                                        "by the acceptance tests")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-records", dest="n_records", type=int, default=600)
    p.add_argument("--n-sentences", dest="n_sentences", type=int, default=2000)
    p.set_defaults(func=cmd_fixtures)

    return root


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except VALIDATION_ERRORS as e:
        print(f"eeorder {args.command}: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    except Exception as e:  # genuine runtime failure
        print(f"eeorder {args.command}: unexpected {type(e).__name__}: {e}",
              file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
