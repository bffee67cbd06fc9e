"""Exact weighted sums of generalized Fibonacci products: closed forms, oracles, series and a miner."""

from .sequences import FIB, LUCAS, STANDARD_SEEDS, Seed, fib, gen_at, lucas

__version__ = "0.1.0"

__all__ = ["FIB", "LUCAS", "STANDARD_SEEDS", "Seed", "fib", "gen_at", "lucas", "__version__"]
