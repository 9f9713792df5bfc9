"""
Mining premise patterns
=======================

Each fact's direct dependencies form a transaction. Frequent itemsets show
premises that are used together; association rules turn them into
suggestions for a proof that already uses some of them.
"""

import numpy as np

from depnet import (DepEdge, Entity, EntityKind, GraphBuilder, association_rules,
                    extract_transactions, frequent_itemsets, suggest_premises)

rng = np.random.default_rng(3)
b = GraphBuilder()
constants = ["plus", "times", "zero", "one", "le"]
lemmas = ["add_comm", "add_assoc", "mult_comm", "distrib", "le_refl"]
for c in constants:
    b.add_entity(Entity(c, EntityKind.CONSTANT))
for f in lemmas:
    b.add_entity(Entity(f, EntityKind.FACT))
# algebraic facts tend to use plus, zero and add_comm together
for i in range(40):
    f = f"thm{i:02d}"
    b.add_entity(Entity(f, EntityKind.FACT))
    picks = {"plus", "add_comm"} if rng.random() < 0.6 else set()
    if picks and rng.random() < 0.7:
        picks.add("zero")
    picks |= set(rng.choice(constants + lemmas, size=rng.integers(1, 3), replace=False).tolist())
    for p in sorted(picks):
        b.add_edge(DepEdge(f, p))
graph = b.seal()

transactions = extract_transactions(graph)
print(f"{len(transactions)} transactions")

# %%
itemsets = frequent_itemsets(transactions, min_support=12)
for s in itemsets:
    print(f"  {{{', '.join(s.items)}}}: {s.support}")

# %%
rules = association_rules(itemsets, transactions, min_confidence=0.7)
for r in rules[:6]:
    print(f"  {', '.join(r.antecedent)} -> {', '.join(r.consequent)}  "
          f"support={r.support} confidence={r.confidence:.2f}")

# %%
# A proof that already uses plus: which premises are likely next?
print("suggest after {plus}:", suggest_premises(rules, {"plus"}, k=3))
