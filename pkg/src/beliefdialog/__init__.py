"""Belief-driven dialog management for a course-advisor chatbot.

Pipeline per turn: classify the user's latent belief, extract triples
and assert facts, enrich them from the course ontology, forward-chain
the epistemic rulebase, then re-weight and skip/ask the states of the
dialog FSM.
"""

__version__ = "0.1.0"
