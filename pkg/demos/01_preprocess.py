"""
Preprocessing a word image
==========================

Binarize with Otsu's threshold, straighten the slant, thin to a skeleton.
"""

from pathlib import Path

from cursivecut import GrayImage, preprocess, save_pgm, synthesize_corpus, to_gray

out = Path(__file__).parent / "out"
out.mkdir(exist_ok=True)

# Grab one synthetic word. Any dark-on-light PGM works the same way;
# the corpus generator just gives us something reproducible.
word = synthesize_corpus(seed=4, word_count=1)[0]
save_pgm(word.image, out / "word_raw.pgm")
print(f"input: {word.image.width}x{word.image.height}, "
      f"{int((word.image.pixels < 128).sum())} dark pixels")

pre = preprocess(word.image)

# The threshold is picked by maximizing between-class variance over all
# 256 candidate levels; ink is everything strictly below it.
print(f"otsu threshold: {pre.threshold}")
print(f"binary ink count: {pre.binary.foreground_count()}")

# Slant correction searches shear angles and keeps the one whose vertical
# projection has the highest variance (upright strokes pile into sharp
# column peaks). Synthetic words are upright, so expect 0 here.
print(f"detected slant: {pre.slant_angle} degrees")
print(f"content crop offset: top {pre.crop_top}, left {pre.crop_left}")

# Thinning erodes every stroke to single-pixel width while preserving
# connectivity, so crossing counts later mean "strokes", not "pixels".
skel = pre.skeleton
print(f"skeleton: {skel.width}x{skel.height}, {skel.foreground_count()} pixels "
      f"({skel.foreground_count() / pre.binary.foreground_count():.0%} of binary ink)")

save_pgm(to_gray(skel), out / "word_skeleton.pgm")
print(f"wrote {out / 'word_raw.pgm'} and {out / 'word_skeleton.pgm'}")
