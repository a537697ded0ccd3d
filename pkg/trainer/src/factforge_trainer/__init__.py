"""Encoder fine-tuning and batch prediction for text-claim fact checking."""

__version__ = "0.1.0"
