"""Convert the upstream VADER lexicon (token, mean, std, ratings) into the
two-column `token<TAB>valence` file bundled with stockcast-core.

Entries that are not lowercase are dropped (the scorer looks tokens up in
lowercase, so they can never match). Duplicate tokens keep their last value.
"""
import sys

src, dst = sys.argv[1], sys.argv[2]
entries = {}
with open(src, encoding="utf-8") as f:
    for line in f:
        line = line.rstrip("\n")
        if not line:
            continue
        token, valence = line.strip().split("\t")[0:2]
        if token != token.lower():
            continue
        entries[token] = valence
with open(dst, "w", encoding="utf-8") as f:
    f.write("# Sentiment lexicon derived from the VADER lexicon (MIT License, C.J. Hutto).\n")
    f.write("# Format: token<TAB>mean valence in [-4, 4].\n")
    for token, valence in entries.items():
        f.write(f"{token}\t{valence}\n")
