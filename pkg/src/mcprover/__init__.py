"""First-order connection prover with iterative-deepening and Monte Carlo tree search engines."""

__version__ = "0.1.0"
