"""
Directional actions, conflicts, and flow
========================================

Underneath the composite score sit three structural analyses: extracting
directional actions from text, checking opposing-direction conflicts, and
comparing step flow between reference and prediction.
"""

from navscore import (
    ConflictPairSet,
    DirectionLexicon,
    MetricConfig,
    analyze_flow,
    detect_conflict,
    extract_actions,
    normalize,
)

lexicon = DirectionLexicon.default()
pairs = ConflictPairSet.default()
cfg = MetricConfig()

# Extraction scans left to right, longest phrase first, and records the
# index of the last token of each matched phrase.
instruction = normalize("Go straight past the bar, then take a left upstairs.")
actions = extract_actions(instruction, lexicon)
print("tokens:", instruction.tokens)
for action in actions:
    print(f"  {action.direction}  index={action.token_index}  surface={action.surface!r}")

# Conflict detection compares aligned positions first ...
ref = extract_actions(normalize("turn left then go forward"), lexicon)
pred = extract_actions(normalize("turn right then go forward"), lexicon)
report = detect_conflict(ref, pred, pairs)
print()
print("aligned conflict:", report.conflict)
for ref_action, pred_action in report.witnesses:
    print(f"  {ref_action.direction} vs {pred_action.direction}")

# ... and falls back to unmatched ("lone") directions only when the aligned
# pass finds nothing — here FORWARD in the reference vs a lone BACKWARD.
ref = extract_actions(normalize("walk forward past the bar"), lexicon)
pred = extract_actions(normalize("turn around and go back"), lexicon)
report = detect_conflict(ref, pred, pairs)
print()
print("fallback conflict:", report.conflict)
for ref_action, pred_action in report.witnesses:
    print(f"  {ref_action.direction} vs {pred_action.direction}")

# Flow analysis scores ordering with a longest-common-subsequence ratio and
# penalizes step-count drift. A reordering below the threshold is critical:
# the flow bonus is zeroed and the composite score will be too.
ref = extract_actions(normalize("left then forward then right"), lexicon)
pred = extract_actions(normalize("left then right"), lexicon)
flow = analyze_flow(ref, pred, cfg)
print()
print("ref steps:", flow.ref_steps, " pred steps:", flow.pred_steps)
print("order_similarity:", round(flow.order_similarity, 4))
print("critical_mismatch:", flow.critical_mismatch)
print("flow_bonus:", round(flow.flow_bonus, 4))

reversal = analyze_flow(
    extract_actions(normalize("turn left then walk forward"), lexicon),
    extract_actions(normalize("walk forward then turn left"), lexicon),
    cfg,
)
print()
print("reversal order_similarity:", reversal.order_similarity)
print("reversal critical_mismatch:", reversal.critical_mismatch)
print("reversal flow_bonus:", reversal.flow_bonus)
