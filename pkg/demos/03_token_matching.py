"""
Token-level matching and the lexical backend
============================================

The semantic term of the score is a BERTScore-style greedy token matching:
every reference token is matched to its most similar prediction token (and
vice versa), and the two directions combine into an F1. Any embedding
backend can drive it; the built-in lexical backend embeds tokens as hashed
character-trigram vectors, so related word forms land near each other
without any model download.
"""

import numpy as np

from navscore import lexical_backend, token_match_f1, weighted_directional_similarity

backend = lexical_backend()
print("backend:", backend.identity)

# Character trigrams give partial credit to shared morphology.
[embedded] = backend.embed(["walk walking table"])
walk, walking, table = embedded.vectors
print()
print("cosine(walk, walking):", round(float(walk @ walking), 4))
print("cosine(walk, table):  ", round(float(walk @ table), 4))
print("vector norms:", np.linalg.norm(embedded.vectors, axis=1))

# Greedy matching F1 over two instructions.
ref = "walk forward to the large table"
pred = "walking forward toward the table"
result = token_match_f1(ref, pred, backend)
print()
print(f"precision={result.precision:.4f} recall={result.recall:.4f} f1={result.f1:.4f}")

# Identical sentences reach exactly 1.0.
print("identity f1:", token_match_f1(ref, ref, backend).f1)

# Direction words can be up-weighted so a directional miss costs more than
# a filler-word miss. Compare the same filler disagreement with and without
# a directional disagreement, boosted 4x.
same_direction = weighted_directional_similarity(
    "turn left now", "turn left please", backend, boost_factor=4.0
)
different_direction = weighted_directional_similarity(
    "turn left now", "turn around now", backend, boost_factor=4.0
)
print()
print("boosted f1, direction preserved:", round(same_direction.f1, 4))
print("boosted f1, direction changed:  ", round(different_direction.f1, 4))
