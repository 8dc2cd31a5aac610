"""Command-line front end for the segmentation pipeline.

One executable, eight subcommands: preprocess, cuts, train, segment, eval,
synth, render, serve.  Exit codes: 0 success, 1 runtime or data error,
2 usage error.  Machine-readable output goes to stdout (JSON whenever
--format json is passed); diagnostics go to stderr.
"""

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path

from . import corpus as corpus_mod
from .corpus import CorpusError
from .features import FeatureConfig
from .images import PgmError, load_image, save_pgm, to_gray
from .neural import ModelError, TrainConfig, load_model, save_model, train_ensemble
from .pathtrace import paths_from_json, paths_to_json, render_overlay
from .pipeline import preprocess, propose_cuts, segment_word
from .segmenter import SegParams, cuts_from_json, cuts_to_json
from .service import serve

CONFIG_ENV = "CURSIVE_CUT_CONFIG"

_CONFIG_SECTIONS = {
    "seg": SegParams,
    "features": FeatureConfig,
    "train": TrainConfig,
}


class UsageError(Exception):
    """Bad invocation that argparse cannot catch itself."""


def _load_config(args) -> dict:
    path = getattr(args, "config", None) or os.environ.get(CONFIG_ENV)
    if not path:
        return {}
    try:
        cfg = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise UsageError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ValueError(f"config file {path}: {exc}")
    if not isinstance(cfg, dict):
        raise ValueError(f"config file {path}: expected a JSON object")
    for section, klass in _CONFIG_SECTIONS.items():
        sub = cfg.get(section, {})
        known = {f.name for f in dataclasses.fields(klass)}
        unknown = set(sub) - known
        if unknown:
            raise ValueError(f"config section {section}: unknown keys {sorted(unknown)}")
    return cfg


def _build(klass, section: dict, overrides: dict):
    values = dict(section)
    values.update({k: v for k, v in overrides.items() if v is not None})
    return klass(**values)


def _seg_params(args, cfg: dict) -> SegParams:
    return _build(
        SegParams,
        cfg.get("seg", {}),
        {"n": getattr(args, "n", None), "char_width": getattr(args, "char_width", None)},
    )


def _feature_cfg(args, cfg: dict) -> FeatureConfig:
    return _build(FeatureConfig, cfg.get("features", {}), {})


def _train_cfg(args, cfg: dict) -> TrainConfig:
    return _build(
        TrainConfig, cfg.get("train", {}), {"rng_seed": getattr(args, "seed", None)}
    )


def _emit(args, payload: dict, text: str) -> None:
    if args.format == "json":
        print(json.dumps(payload))
    else:
        print(text)


# ---------------------------------------------------------------------------
# subcommands

def cmd_preprocess(args) -> int:
    _load_config(args)
    pre = preprocess(load_image(args.input))
    save_pgm(to_gray(pre.skeleton), args.output)
    payload = {
        "threshold": pre.threshold,
        "slant_angle": pre.slant_angle,
        "crop_top": pre.crop_top,
        "crop_left": pre.crop_left,
        "width": pre.skeleton.width,
        "height": pre.skeleton.height,
        "output": str(args.output),
    }
    text = (
        f"threshold {pre.threshold}\n"
        f"slant {pre.slant_angle} deg\n"
        f"size {pre.skeleton.width}x{pre.skeleton.height}\n"
        f"wrote {args.output}"
    )
    _emit(args, payload, text)
    return 0


def cmd_cuts(args) -> int:
    cfg = _load_config(args)
    params = _seg_params(args, cfg)
    pre = preprocess(load_image(args.input))
    cuts = propose_cuts(pre.skeleton, params)
    doc = cuts_to_json(cuts)
    if args.out:
        Path(args.out).write_text(doc + "\n")
    if args.format == "json":
        print(doc)
    else:
        lines = [f"{c.column:>6}  {c.status.value:<16} crossings {c.crossing_count}" for c in cuts]
        print("\n".join(lines) if lines else "(no cuts)")
    return 0


def cmd_train(args) -> int:
    cfg = _load_config(args)
    X, y, _ = corpus_mod.load_training_set(args.training)
    model, report = train_ensemble(X, y, _train_cfg(args, cfg))
    save_model(model, args.out)
    m = report.train

    def show(v):
        return "nan" if v is None else f"{v:.4f}"

    payload = {
        "rows": len(X),
        "rmse": m["rmse"],
        "r": m["r"],
        "si": m["si"],
        "mlp_epochs": len(report.mlp.epoch_mse),
        "mlp_final_mse": report.mlp.final_mse,
        "model": str(args.out),
    }
    text = (
        f"rows {len(X)}\n"
        f"RMSE {show(m['rmse'])}  R {show(m['r'])}  SI {show(m['si'])}\n"
        f"mlp epochs {len(report.mlp.epoch_mse)} final mse {report.mlp.final_mse:.6f}\n"
        f"wrote {args.out}"
    )
    _emit(args, payload, text)
    return 0


def cmd_segment(args) -> int:
    cfg = _load_config(args)
    if not Path(args.model).is_file():
        raise UsageError(f"model not found: {args.model}")
    model = load_model(args.model)
    result = segment_word(
        load_image(args.input),
        params=_seg_params(args, cfg),
        feature_cfg=_feature_cfg(args, cfg),
        model=model,
    )
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    files = []
    for seg in result.segments:
        name = outdir / f"char_{seg.index:02d}.pgm"
        save_pgm(seg.image, name)
        files.append(str(name))
    (outdir / "paths.json").write_text(paths_to_json(result.paths) + "\n")
    (outdir / "cuts.json").write_text(cuts_to_json(result.cuts) + "\n")
    payload = {
        "characters": len(result.segments),
        "paths": len(result.paths),
        "files": files,
        "outdir": str(outdir),
    }
    text = f"{len(result.segments)} characters, {len(result.paths)} paths -> {outdir}"
    _emit(args, payload, text)
    return 0


def cmd_eval(args) -> int:
    cfg = _load_config(args)
    records = corpus_mod.load_corpus(args.corpus)
    model = load_model(args.model) if args.model else None
    report = corpus_mod.evaluate_pipeline(
        records,
        model=model,
        params=_seg_params(args, cfg),
        feature_cfg=_feature_cfg(args, cfg),
        tolerance=args.tolerance,
        jobs=args.jobs,
    )
    _emit(args, corpus_mod.report_to_json(report), corpus_mod.render_report(report))
    return 0


def cmd_synth(args) -> int:
    _load_config(args)
    records = corpus_mod.synthesize_corpus(args.seed, args.count)
    manifest = corpus_mod.write_corpus(records, args.outdir)
    payload = {"words": len(records), "manifest": str(manifest)}
    _emit(args, payload, f"{len(records)} words -> {manifest}")
    return 0


def cmd_render(args) -> int:
    _load_config(args)
    pre = preprocess(load_image(args.input))
    cuts = cuts_from_json(Path(args.cuts).read_text()) if args.cuts else []
    paths = paths_from_json(Path(args.paths).read_text()) if args.paths else []
    render_overlay(pre.skeleton, cuts, paths, args.output)
    _emit(args, {"output": str(args.output)}, f"wrote {args.output}")
    return 0


def cmd_serve(args) -> int:
    cfg = _load_config(args)
    server = serve(
        args.corpus,
        labels_path=args.labels,
        port=args.port,
        params=_seg_params(args, cfg),
        feature_cfg=_feature_cfg(args, cfg),
        static_dir=args.static,
    )
    print(json.dumps({"port": server.port}), flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


# ---------------------------------------------------------------------------
# parser

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help=f"JSON config file (or ${CONFIG_ENV})")
    p.add_argument("--format", choices=("text", "json"), default="text")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cursivecut",
        description="Segment overlapped cursive words into characters.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preprocess", help="binarize, deslant, and thin a word image")
    p.add_argument("input")
    p.add_argument("output")
    _add_common(p)
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("cuts", help="propose heuristic cut candidates")
    p.add_argument("input")
    p.add_argument("--out", help="also write the cut list to this file")
    p.add_argument("--n", type=int, help="over-segmentation divisor")
    p.add_argument("--char-width", type=float, dest="char_width")
    _add_common(p)
    p.set_defaults(func=cmd_cuts)

    p = sub.add_parser("train", help="train the MLP+RBF ensemble")
    p.add_argument("training", help="JSON-lines training set")
    p.add_argument("--out", required=True, help="model JSON output path")
    p.add_argument("--seed", type=int, help="weight-init seed")
    _add_common(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("segment", help="full pipeline to per-character images")
    p.add_argument("input")
    p.add_argument("outdir")
    p.add_argument("--model", required=True, help="trained model JSON")
    p.add_argument("--n", type=int)
    p.add_argument("--char-width", type=float, dest="char_width")
    _add_common(p)
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("eval", help="score the pipeline against a corpus")
    p.add_argument("corpus", help="corpus directory with manifest.jsonl")
    p.add_argument("--model", help="trained model JSON (omit for heuristics only)")
    p.add_argument("--n", type=int)
    p.add_argument("--char-width", type=float, dest="char_width")
    p.add_argument("--tolerance", type=int, default=3)
    p.add_argument("--jobs", type=int, default=1)
    _add_common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("synth", help="generate a synthetic labeled corpus")
    p.add_argument("outdir")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=20)
    _add_common(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("render", help="overlay cuts and paths on a word image")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--cuts", help="cut-list JSON file")
    p.add_argument("--paths", help="paths JSON file")
    _add_common(p)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("serve", help="run the annotation HTTP service")
    p.add_argument("corpus", help="corpus directory")
    p.add_argument("--labels", help="label log path (default corpus/labels.jsonl)")
    p.add_argument("--port", type=int, default=0, help="0 = pick a free port")
    p.add_argument("--static", help="directory of UI assets served at /")
    _add_common(p)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (PgmError, ModelError, CorpusError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
