"""Typed stacks and the execution environment."""
from __future__ import annotations

from typing import Optional

import numpy as np

# Ephemeral random constant ranges; *.rand instructions use the same ranges.
ERC_FLOAT_LO, ERC_FLOAT_HI = -10.0, 10.0
ERC_INT_LO, ERC_INT_HI = -10, 10


class Environment:
    """Per-execution environment: search dimension, box bounds, RNG and the
    instruction registry.  Bounds are stored both as tuples (for pushing to
    the input stack) and numpy arrays (for vector sampling)."""

    __slots__ = ("dimension", "bounds_lo", "bounds_hi", "rng", "registry",
                 "exec_budget", "_lo_arr", "_hi_arr")

    def __init__(self, dimension: int, bounds_lo, bounds_hi,
                 rng: Optional[np.random.Generator] = None,
                 registry=None, exec_budget: int = 100):
        if dimension < 1:
            raise ValueError("dimension must be >= 1")
        self.dimension = dimension
        self.bounds_lo = tuple(float(x) for x in bounds_lo)
        self.bounds_hi = tuple(float(x) for x in bounds_hi)
        if len(self.bounds_lo) != dimension or len(self.bounds_hi) != dimension:
            raise ValueError("bounds length must equal dimension")
        self.rng = rng if rng is not None else np.random.default_rng()
        if registry is None:
            from .instructions import default_registry

            registry = default_registry()
        self.registry = registry
        self.exec_budget = exec_budget
        self._lo_arr = np.asarray(self.bounds_lo, dtype=float)
        self._hi_arr = np.asarray(self.bounds_hi, dtype=float)


class PushState:
    """The set of typed stacks.  Stacks are Python lists with the top at the
    end.  Vectors are tuples of floats of length ``env.dimension``.  The
    input stack is read-only during execution: instructions only peek at it
    and push copies onto the matching typed stacks."""

    __slots__ = ("booleans", "integers", "floats", "vectors", "code",
                 "exec_stack", "inputs", "env", "budget_left")

    def __init__(self, env: Environment):
        self.env = env
        self.booleans: list = []
        self.integers: list = []
        self.floats: list = []
        self.vectors: list = []
        self.code: list = []
        self.exec_stack: list = []
        self.inputs: list = []
        self.budget_left = 0

    def clear(self) -> None:
        self.booleans.clear()
        self.integers.clear()
        self.floats.clear()
        self.vectors.clear()
        self.code.clear()
        self.exec_stack.clear()
        self.inputs.clear()

    def push_input_item(self, item) -> None:
        """Push a copy of an input-stack item onto its typed stack."""
        t = type(item)
        if t is bool:
            self.booleans.append(item)
        elif t is int:
            self.integers.append(item)
        elif t is float:
            self.floats.append(item)
        elif t is tuple:
            self.vectors.append(item)
        else:  # pragma: no cover - harness only loads the four types above
            raise TypeError(f"unsupported input item type {t!r}")
