"""
Non-linear segmentation paths
=============================

A validated cut is only a column estimate. The tracer turns each one
into a top-to-bottom path that bends around ink instead of slicing
through it, then the word is split along those paths.
"""

from pathlib import Path

from cursivecut import (
    FeatureConfig,
    SegParams,
    load_model,
    render_overlay,
    save_pgm,
    segment_word,
    synthesize_corpus,
)

out = Path(__file__).parent / "out"
out.mkdir(exist_ok=True)

model_path = out / "model.json"
if not model_path.is_file():
    raise SystemExit("run 03_train_ensemble.py first to produce model.json")
model = load_model(model_path)

params = SegParams(n=29, char_width=2.0)
feat = FeatureConfig(window_cols=24, grid=8)

# A test-split word the model never saw during training.
word = next(w for w in synthesize_corpus(seed=42, word_count=60) if w.split == "test")
result = segment_word(word.image, params=params, feature_cfg=feat, model=model)

accepted = result.accepted_cuts
print(f"word {word.word_id}: {len(result.cuts)} candidates, "
      f"{len(accepted)} accepted by the ensemble")
print(f"core zone rows: {result.zone.top_row}..{result.zone.bottom_row}" if result.zone else "no core zone")

# Each path moves at most one column per row; the per-cell cost is the
# distance from the cut column plus a huge penalty for touching ink, so
# the DP detours through gaps whenever one is reachable.
for path in result.paths:
    bend = int(abs(path.columns - path.seed_column).max())
    print(f"  path at {path.seed_column}: max detour {bend}px")

print(f"{len(result.segments)} characters extracted")
for seg in result.segments:
    name = out / f"char_{seg.index:02d}.pgm"
    save_pgm(seg.image, name)
    print(f"  char {seg.index}: {seg.image.width}x{seg.image.height} at column {seg.left}")

render_overlay(result.preprocess.skeleton, result.cuts, result.paths,
               out / "paths_overlay.pgm")
print(f"wrote {out / 'paths_overlay.pgm'} and the char_*.pgm crops")
