"""Keyed tactical knowledge: exact per-class retrieval and prompt-context
assembly under a character budget.

Run:  python demos/04_knowledge_store.py
"""

from microarena import build_knowledge_context, load_knowledge_base

store = load_knowledge_base()
print(f"{len(store)} classes in the bundled base\n")

marine = store.retrieve("Marine")
print(f"Marine: dps {marine.dps}, range {marine.range}, speed {marine.speed}")
print(f"  strong against: {', '.join(marine.strong_against)}")
print(f"  weak against:   {', '.join(marine.weak_against)}")
for tip in marine.insights:
    print(f"  - {tip}")

# Context assembly keeps priority order and drops whole blocks past the cap.
context = build_knowledge_context(["Baneling", "Marine", "SiegeTank"], store,
                                  max_context_chars=700)
print("\n--- 700-char context (rank order, whole blocks only) ---")
print(context)
print(f"\n({len(context)} chars)")
