"""Evaluation harness for decision-making agents in turn-based strategy games."""

__version__ = "0.1.0"
