"""GPT Circuits - evaluate operational circuits in generalized probabilistic theories."""

__version__ = "1.0.0"
