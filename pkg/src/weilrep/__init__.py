"""Exact computational engine for Heisenberg-Weil representations over
finite fields: torus character sums and their square-root-cancellation
bounds, eigenspace multiplicities, self-reducibility comparisons, and
quantized cat-map experiments at hbar = 1/p."""

__version__ = "0.1.0"

from .gfq import FieldCtx

__all__ = ["FieldCtx", "__version__"]
