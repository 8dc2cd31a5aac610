"""
Training the cut validator
==========================

Label the heuristic survivors against ground truth, extract features,
and fit the MLP + RBF ensemble that arbitrates each candidate cut.
"""

from pathlib import Path

import numpy as np

from cursivecut import (
    FeatureConfig,
    SegParams,
    TrainConfig,
    auto_label,
    export_training_set,
    save_model,
    synthesize_corpus,
    train_ensemble,
)

out = Path(__file__).parent / "out"
out.mkdir(exist_ok=True)

params = SegParams(n=29, char_width=2.0)
feat = FeatureConfig(window_cols=24, grid=8)

corpus = synthesize_corpus(seed=42, word_count=60)
train_words = [w for w in corpus if w.split == "train"]
print(f"{len(corpus)} words, {len(train_words)} in the train split")

# auto_label stands in for a human annotator: a surviving cut within
# 3 px of a true boundary is 'valid', everything else 'invalid'.
n_labels = auto_label(train_words, params=params)
rows = export_training_set(train_words, feature_cfg=feat, params=params,
                           out_path=out / "training.jsonl")
X = np.array([r["features"] for r in rows])
y = np.array([float(r["label"]) for r in rows])
print(f"{n_labels} labeled cuts -> {X.shape[0]} rows x {X.shape[1]} features, "
      f"{y.mean():.0%} valid")

cfg = TrainConfig(max_epochs=300, target_mse=0.02, hidden=16,
                  rbf_centers=20, rng_seed=0)
model, report = train_ensemble(X, y, cfg)

print()
print(f"mlp: {len(report.mlp.epoch_mse)} epochs, final mse {report.mlp.final_mse:.4f}")
print(f"rbf: final mse {report.rbf.final_mse:.4f}")

# RMSE measures attained-vs-target error, R the correlation, SI the
# error normalized by the target mean.
m = report.train
print(f"train fit: RMSE {m['rmse']:.4f}  R {m['r']:.4f}  SI {m['si']:.4f}")

save_model(model, out / "model.json")
print(f"wrote {out / 'model.json'}")
