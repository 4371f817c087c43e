"""
MOST, Adam and a GA on XOR
==========================

The same comparison the ``mostopt compare`` command prints. Takes about a
minute on one core; pass a smaller seed list to go faster.
"""

from mostopt.harness import ExperimentConfig, compare

seeds = range(1, 11)
cmp = compare([ExperimentConfig("xor", optimizer=o, seeds=seeds) for o in ("most", "adam", "ga")])
print(cmp.to_text())

# %%
# The table's last column is the median over seeds of the largest output on a
# 0-target row. Smaller is better; rounding below 0.5 counts as correct.
for name in ("most", "adam", "ga"):
    rep = cmp.report(name)
    print(name, rep.success_count, "/", len(rep.results), "rounded-correct")
