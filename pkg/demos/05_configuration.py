"""
Tuning the metric configuration
===============================

Every weight in the composite score is a ``MetricConfig`` field. The three
component weights must sum to one (enforced, not silently rebalanced), the
blend weight ``w`` slides between pure token matching and the pure enhanced
score, and the conflict policy decides what an opposing-direction pair does
to the enhanced score.
"""

from navscore import ConflictPolicy, MetricConfig, score_texts

reference = "Turn left at the door and go straight."
prediction = "Turn left at the door, then go forward a few steps."

# Sweep the blend weight: w=0 is exactly the token-matching F1, w=1 is
# exactly the enhanced score.
print(f"{'w':>5}  {'final_score':>11}")
for w in (0.0, 0.25, 0.5, 0.7, 1.0):
    breakdown = score_texts(reference, prediction, cfg=MetricConfig(w=w))
    print(f"{w:>5.2f}  {breakdown.final_score:>11.4f}")

baseline = score_texts(reference, prediction)
print()
print("bert_f1:       ", round(baseline.bert_f1, 4))
print("enhanced_score:", round(baseline.enhanced_score, 4))

# Conflict policies: "zero" kills the enhanced score, "penalize(f)" scales
# it by (1 - f). The pair below conflicts in its third step but keeps
# enough shared ordering to stay above the critical threshold, so the
# policy is what decides the outcome.
ref = "go forward then turn left then turn right"
pred = "go forward then turn left then turn left"
print()
print(f"{'policy':>15}  {'enhanced':>8}  {'final':>8}")
for policy in ("zero", "penalize(0.25)", "penalize(0.75)"):
    cfg = MetricConfig(conflict_policy=policy)
    b = score_texts(ref, pred, cfg=cfg)
    print(f"{str(cfg.conflict_policy):>15}  {b.enhanced_score:>8.4f}  {b.final_score:>8.4f}")

# The component weights are validated at construction time.
try:
    MetricConfig(alpha=0.9, beta=0.3, gamma=0.3)
except Exception as exc:
    print()
    print("rejected:", exc)

# ConflictPolicy also parses from configuration strings.
policy = ConflictPolicy.parse("penalize(0.5)")
print()
print("parsed policy:", policy, "-> applies 0.8 to", policy.apply(0.8))
