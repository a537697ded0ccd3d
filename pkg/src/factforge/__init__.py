"""factforge: LLM-driven synthetic text-claim pair generation, sentence-fact
entailment tables, and hallucination scanning for fact-checking models."""

__version__ = "0.1.0"
