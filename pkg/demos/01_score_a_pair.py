"""
Scoring a single reference/prediction pair
==========================================

The quickest way to use navscore: hand two instruction strings to
``score_texts`` and read the breakdown. The final score blends a
token-matching F1 with an enhanced score that folds in directional
structure, step flow, and paraphrase detection.
"""

from navscore import score_texts

# A reference instruction and a model prediction that paraphrases it.
reference = "Turn left at the counter and walk forward to the window."
prediction = "Take a left at the counter, then go straight to the window."

breakdown = score_texts(reference, prediction)

print("reference: ", reference)
print("prediction:", prediction)
print()

# The breakdown carries every intermediate component, not just the blend.
for name, value in breakdown.to_dict().items():
    print(f"  {name:20} {value}")

# An identical pair scores exactly 1.0 — no tolerance needed.
perfect = score_texts(reference, reference)
print()
print("identity final_score:", perfect.final_score)
assert perfect.final_score == 1.0

# A reversed pair trips the critical-mismatch rule: the enhanced score is
# zeroed outright and only the token-matching term survives the blend.
reversed_pair = score_texts(
    "Turn left then walk forward.",
    "Walk forward then turn left.",
)
print()
print("reversal enhanced_score:", reversed_pair.enhanced_score)
print("reversal critical_mismatch:", reversed_pair.critical_mismatch)
print("reversal final_score:", round(reversed_pair.final_score, 6))
