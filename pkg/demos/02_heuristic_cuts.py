"""
Heuristic over-segmentation
===========================

Propose evenly spaced cuts, reject the ones that slice through loops,
merge near-duplicates, and render the survivors.
"""

from collections import Counter
from pathlib import Path

from cursivecut import (
    SegParams,
    preprocess,
    propose_cuts,
    render_overlay,
    synthesize_corpus,
)

out = Path(__file__).parent / "out"
out.mkdir(exist_ok=True)

word = synthesize_corpus(seed=4, word_count=1)[0]
pre = preprocess(word.image)

# n controls the proposal density: one candidate every width/n columns.
# char_width is the merge radius; None would estimate it from the cuts.
params = SegParams(n=29, char_width=2.0)
cuts = propose_cuts(pre.skeleton, params)

print(f"word width {pre.skeleton.width}px, n={params.n} "
      f"-> {len(cuts)} candidates")
print()
print(f"{'column':>8}  {'crossings':>9}  status")
for cut in cuts:
    print(f"{cut.column:>8}  {cut.crossing_count:>9}  {cut.status.value}")

counts = Counter(c.status.value for c in cuts)
print()
print("tally:", dict(counts))

# A cut crossing more than one vertical ink run would slice through a
# loop (an 'o', an 'e'), so it is rejected outright. Rejected columns,
# surviving columns, and (later) traced paths each get their own gray
# level in the overlay.
render_overlay(pre.skeleton, cuts, [], out / "cuts_overlay.pgm")
print(f"wrote {out / 'cuts_overlay.pgm'}")

# Ground truth for this word, mapped to the same frame the cuts live in:
gt = [g - pre.crop_left for g in word.gt_boundaries]
print(f"true boundaries (skeleton frame): {gt}")
