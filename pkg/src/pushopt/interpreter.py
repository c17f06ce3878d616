"""Program execution and random program generation.

Execution pops atoms off the exec stack one at a time: literals go to their
typed stack, sublists expand (first element ends up on top), instruction
names dispatch through the registry.  Every popped atom, including sublist
expansions and atoms run inside ``vector.apply`` / ``vector.zip`` code
blocks, costs one unit of the per-invocation budget.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .program import Program
from .state import (ERC_FLOAT_HI, ERC_FLOAT_LO, ERC_INT_HI, ERC_INT_LO,
                    Environment, PushState)

HALT_EXEC_EMPTY = "exec-stack-empty"
HALT_BUDGET = "budget-exhausted"


@dataclass
class ExecutionReport:
    instructions_executed: int
    halted_reason: str
    state: PushState


def _dispatch(st: PushState, atom, get_handler) -> None:
    t = type(atom)
    if t is str:
        handler = get_handler(atom)
        if handler is not None:
            handler(st)
    elif t is tuple:
        st.exec_stack.extend(reversed(atom))
    elif t is float:
        st.floats.append(atom)
    elif t is bool:
        st.booleans.append(atom)
    elif t is int:
        st.integers.append(atom)


def run_nested(st: PushState, atom) -> bool:
    """Run one atom on a private exec stack under the shared budget.  Used
    by vector.apply / vector.zip.  Returns False when the budget ran out
    before the nested code finished."""
    get_handler = st.env.registry.get
    outer = st.exec_stack
    inner = st.exec_stack = [atom]
    try:
        while inner and st.budget_left > 0:
            st.budget_left -= 1
            _dispatch(st, inner.pop(), get_handler)
        return not inner
    finally:
        st.exec_stack = outer


def execute(program: Program, state: PushState, budget: int) -> ExecutionReport:
    """Execute ``program`` against ``state`` under an instruction budget.

    The exec stack is reset for the call; all other stacks are left as they
    are, so state carries over between invocations (the move loop relies on
    this).  The input stack is never mutated here."""
    get_handler = state.env.registry.get
    ex = state.exec_stack
    ex.clear()
    ex.append(program.root)
    state.budget_left = budget
    # dispatch inlined: this loop dominates evolution runtime
    floats = state.floats
    booleans = state.booleans
    integers = state.integers
    while ex and state.budget_left > 0:
        state.budget_left -= 1
        atom = ex.pop()
        t = type(atom)
        if t is str:
            handler = get_handler(atom)
            if handler is not None:
                handler(state)
        elif t is tuple:
            ex.extend(reversed(atom))
        elif t is float:
            floats.append(atom)
        elif t is bool:
            booleans.append(atom)
        elif t is int:
            integers.append(atom)
    executed = budget - state.budget_left
    reason = HALT_EXEC_EMPTY if not ex else HALT_BUDGET
    return ExecutionReport(executed, reason, state)


def new_state(dimension: int, bounds_lo, bounds_hi,
              rng: np.random.Generator | None = None,
              registry=None, exec_budget: int = 100) -> PushState:
    env = Environment(dimension, bounds_lo, bounds_hi, rng=rng,
                      registry=registry, exec_budget=exec_budget)
    return PushState(env)


# ---------------------------------------------------------------------------
# random program generation

def _random_atom(rng: np.random.Generator, names: tuple):
    name = names[int(rng.integers(0, len(names)))]
    if name == "float.erc":
        return float(rng.uniform(ERC_FLOAT_LO, ERC_FLOAT_HI))
    if name == "integer.erc":
        return int(rng.integers(ERC_INT_LO, ERC_INT_HI + 1))
    if name == "true":
        return True
    if name == "false":
        return False
    return name


def _random_body(budget: int, rng: np.random.Generator, names: tuple,
                 nest_probability: float) -> tuple:
    """Build a list body consuming exactly ``budget`` points (the enclosing
    list's own point is already accounted for by the caller)."""
    out = []
    remaining = budget
    while remaining > 0:
        if remaining >= 2 and rng.random() < nest_probability:
            sub = int(rng.integers(1, remaining + 1))
            out.append(_random_body(sub - 1, rng, names, nest_probability))
            remaining -= sub
        else:
            out.append(_random_atom(rng, names))
            remaining -= 1
    return tuple(out)


def random_program(max_points: int, rng: np.random.Generator,
                   registry=None, nest_probability: float = 0.2) -> Program:
    """Generate a random program of uniformly sampled size <= ``max_points``.

    Atoms are drawn uniformly from the registry names; the ``*.erc`` tokens
    expand to fresh literals at generation time."""
    if max_points < 1:
        raise ValueError("max_points must be >= 1")
    if registry is None:
        from .instructions import default_registry

        registry = default_registry()
    target = int(rng.integers(1, max_points + 1))
    root = _random_body(target - 1, rng, registry.names, nest_probability)
    return Program.from_root(root)


def random_subtree(max_points: int, rng: np.random.Generator,
                   registry=None, nest_probability: float = 0.2):
    """A random replacement node: either a bare atom or a list of at most
    ``max_points`` points.  Used by the mutation operator."""
    if registry is None:
        from .instructions import default_registry

        registry = default_registry()
    size = int(rng.integers(1, max_points + 1))
    if size == 1 and rng.random() < 0.75:
        return _random_atom(rng, registry.names)
    return _random_body(size - 1, rng, registry.names, nest_probability)
