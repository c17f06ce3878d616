"""The instruction set: generic stack manipulators for the boolean, float,
integer and vector stacks, plus the boolean / exec / float / input / integer
specials and the ``true`` / ``false`` literals.  Vector-specific instructions
live in :mod:`pushopt.vector_instructions`.

Conventions (matching Push3 / Psh behaviour):

* an instruction whose operands are missing or ill-typed is a no-op that
  leaves every stack unchanged;
* protected arithmetic: division and modulo by zero are no-ops, as are
  ``ln`` / ``log`` of non-positive arguments;
* non-finite floats produced by arithmetic propagate on the float stack;
* ``yank`` / ``yankdup`` / ``shove`` take their index from the integer stack;
  indices are stack positions counted from the bottom (0 = oldest item) and
  wrap modulo the stack size, the same rule ``input.index`` and the vector
  ``dim`` instructions use, so a drifting integer stack keeps every
  position reachable.
"""
from __future__ import annotations

import math
from typing import Callable, Dict, Iterable, Mapping

from .state import (ERC_FLOAT_HI, ERC_FLOAT_LO, ERC_INT_HI, ERC_INT_LO,
                    PushState)

Handler = Callable[[PushState], None]

_STACK_TYPES = ("boolean", "float", "integer", "vector")
_STACK_ATTR = {"boolean": "booleans", "float": "floats",
               "integer": "integers", "vector": "vectors"}


class InstructionRegistry:
    """Immutable name-to-handler mapping.  ``names`` preserves registration
    order so that random sampling is deterministic across runs."""

    def __init__(self, handlers: Mapping[str, Handler]):
        self._handlers: Dict[str, Handler] = dict(handlers)
        self.names: tuple = tuple(self._handlers)

    def __contains__(self, name: str) -> bool:
        return name in self._handlers

    def get(self, name: str):
        return self._handlers.get(name)

    def with_instructions(self, extra: Mapping[str, Handler]) -> "InstructionRegistry":
        merged = dict(self._handlers)
        merged.update(extra)
        return InstructionRegistry(merged)


# ---------------------------------------------------------------------------
# generic stack manipulators

def _make_dup(attr):
    def dup(st):
        s = getattr(st, attr)
        if s:
            s.append(s[-1])
    return dup


def _make_flush(attr):
    def flush(st):
        getattr(st, attr).clear()
    return flush


def _make_pop(attr):
    def pop(st):
        s = getattr(st, attr)
        if s:
            s.pop()
    return pop


def _make_rot(attr):
    def rot(st):
        s = getattr(st, attr)
        if len(s) >= 3:
            s.append(s.pop(-3))
    return rot


def _make_shove(attr, same_stack):
    def shove(st):
        s = getattr(st, attr)
        need = 2 if same_stack else 1
        if len(st.integers) < 1 or len(s) < need:
            return
        pos = st.integers.pop()
        item = s.pop()
        s.insert(pos % (len(s) + 1), item)
    return shove


def _make_stackdepth(attr):
    def stackdepth(st):
        st.integers.append(len(getattr(st, attr)))
    return stackdepth


def _make_swap(attr):
    def swap(st):
        s = getattr(st, attr)
        if len(s) >= 2:
            s[-1], s[-2] = s[-2], s[-1]
    return swap


def _make_yank(attr, same_stack):
    def yank(st):
        s = getattr(st, attr)
        need = 2 if same_stack else 1
        if len(st.integers) < 1 or len(s) < need:
            return
        pos = st.integers.pop() % len(s)
        s.append(s.pop(pos))
    return yank


def _make_yankdup(attr, same_stack):
    def yankdup(st):
        s = getattr(st, attr)
        need = 2 if same_stack else 1
        if len(st.integers) < 1 or len(s) < need:
            return
        pos = st.integers.pop() % len(s)
        s.append(s[pos])
    return yankdup


def _boolean_rand(st):
    st.booleans.append(bool(st.env.rng.integers(0, 2)))


def _float_rand(st):
    st.floats.append(float(st.env.rng.uniform(ERC_FLOAT_LO, ERC_FLOAT_HI)))


def _integer_rand(st):
    st.integers.append(int(st.env.rng.integers(ERC_INT_LO, ERC_INT_HI + 1)))


def _vector_rand(st):
    draw = st.env.rng.uniform(ERC_FLOAT_LO, ERC_FLOAT_HI, size=st.env.dimension)
    st.vectors.append(tuple(draw.tolist()))


_RAND = {"boolean": _boolean_rand, "float": _float_rand,
         "integer": _integer_rand, "vector": _vector_rand}


# ---------------------------------------------------------------------------
# boolean specials

def _bool_eq(st):
    s = st.booleans
    if len(s) >= 2:
        b, a = s.pop(), s.pop()
        s.append(a == b)


def _bool_and(st):
    s = st.booleans
    if len(s) >= 2:
        b, a = s.pop(), s.pop()
        s.append(a and b)


def _bool_or(st):
    s = st.booleans
    if len(s) >= 2:
        b, a = s.pop(), s.pop()
        s.append(a or b)


def _bool_xor(st):
    s = st.booleans
    if len(s) >= 2:
        b, a = s.pop(), s.pop()
        s.append(a != b)


def _bool_not(st):
    s = st.booleans
    if s:
        s.append(not s.pop())


def _bool_fromfloat(st):
    if st.floats:
        st.booleans.append(st.floats.pop() != 0.0)


def _bool_frominteger(st):
    if st.integers:
        st.booleans.append(st.integers.pop() != 0)


# ---------------------------------------------------------------------------
# float specials

def _make_float_binary(op):
    def handler(st):
        s = st.floats
        if len(s) >= 2:
            b, a = s.pop(), s.pop()
            s.append(op(a, b))
    return handler


def _float_div(st):
    s = st.floats
    if len(s) >= 2 and s[-1] != 0.0:
        b, a = s.pop(), s.pop()
        s.append(a / b)


def _float_mod(st):
    # Floored modulo (sign follows the divisor), per the Push3 description.
    s = st.floats
    if len(s) >= 2 and s[-1] != 0.0:
        b, a = s.pop(), s.pop()
        try:
            s.append(a % b)
        except (ValueError, OverflowError):
            s.append(math.nan)


def _make_float_compare(op):
    def handler(st):
        s = st.floats
        if len(s) >= 2:
            b, a = s.pop(), s.pop()
            st.booleans.append(op(a, b))
    return handler


def _make_float_unary(fn):
    def handler(st):
        s = st.floats
        if s:
            s.append(fn(s.pop()))
    return handler


def _safe_trig(fn):
    def wrapped(x):
        try:
            return fn(x)
        except (ValueError, OverflowError):
            return math.nan  # tan/sin/cos of non-finite input
    return wrapped


def _float_exp(st):
    s = st.floats
    if s:
        x = s.pop()
        try:
            s.append(math.exp(x))
        except OverflowError:
            s.append(math.inf)


def _float_ln(st):
    s = st.floats
    if s and s[-1] > 0.0:
        s.append(math.log(s.pop()))


def _float_log(st):
    s = st.floats
    if s and s[-1] > 0.0:
        s.append(math.log10(s.pop()))


def _float_pow(st):
    s = st.floats
    if len(s) < 2:
        return
    b, a = s[-1], s[-2]
    try:
        r = math.pow(a, b)
    except ValueError:
        return  # complex result or 0 ** negative: no-op
    except OverflowError:
        r = math.inf
        if a < 0 and b == int(b) and int(b) % 2:
            r = -math.inf
    s.pop()
    s.pop()
    s.append(r)


def _float_fromboolean(st):
    if st.booleans:
        st.floats.append(1.0 if st.booleans.pop() else 0.0)


def _float_frominteger(st):
    if st.integers:
        i = st.integers.pop()
        try:
            st.floats.append(float(i))
        except OverflowError:
            st.floats.append(math.inf if i > 0 else -math.inf)


# ---------------------------------------------------------------------------
# integer specials

def _make_int_binary(op):
    def handler(st):
        s = st.integers
        if len(s) >= 2:
            b, a = s.pop(), s.pop()
            s.append(op(a, b))
    return handler


def _int_div(st):
    # Quotient truncated toward zero, Psh style.
    s = st.integers
    if len(s) >= 2 and s[-1] != 0:
        b, a = s.pop(), s.pop()
        q = abs(a) // abs(b)
        s.append(q if (a < 0) == (b < 0) else -q)


def _int_mod(st):
    s = st.integers
    if len(s) >= 2 and s[-1] != 0:
        b, a = s.pop(), s.pop()
        s.append(a % b)


def _make_int_compare(op):
    def handler(st):
        s = st.integers
        if len(s) >= 2:
            b, a = s.pop(), s.pop()
            st.booleans.append(op(a, b))
    return handler


def _int_abs(st):
    s = st.integers
    if s:
        s.append(abs(s.pop()))


def _int_neg(st):
    s = st.integers
    if s:
        s.append(-s.pop())


def _int_ln(st):
    s = st.integers
    if s and s[-1] > 0:
        s.append(int(math.log(s.pop())))


def _int_log(st):
    s = st.integers
    if s and s[-1] > 0:
        s.append(int(math.log10(s.pop())))


def _int_pow(st):
    s = st.integers
    if len(s) < 2 or s[-1] < 0:
        return
    b, a = s[-1], s[-2]
    try:
        r = int(math.pow(a, b))
    except (OverflowError, ValueError):
        return
    s.pop()
    s.pop()
    s.append(r)


def _int_fromboolean(st):
    if st.booleans:
        st.integers.append(1 if st.booleans.pop() else 0)


def _int_fromfloat(st):
    if st.floats and math.isfinite(st.floats[-1]):
        st.integers.append(int(st.floats.pop()))


# ---------------------------------------------------------------------------
# exec specials

DO_RANGE = "exec.do*range"


def _exec_eq(st):
    from .program import atoms_equal

    ex = st.exec_stack
    if len(ex) >= 2:
        a, b = ex.pop(), ex.pop()
        st.booleans.append(atoms_equal(a, b))


def _exec_if(st):
    ex = st.exec_stack
    if len(ex) >= 2 and st.booleans:
        if st.booleans.pop():
            del ex[-2]
        else:
            ex.pop()


def _exec_iflt(st):
    # "if less than": compares the top two floats (deeper operand on the
    # left, mirroring float.<) and keeps the matching branch on exec.
    ex = st.exec_stack
    s = st.floats
    if len(ex) >= 2 and len(s) >= 2:
        b, a = s.pop(), s.pop()
        if a < b:
            del ex[-2]
        else:
            ex.pop()


def _exec_do_range(st):
    ex = st.exec_stack
    if len(st.integers) < 2 or not ex:
        return
    dest = st.integers.pop()
    current = st.integers.pop()
    body = ex.pop()
    st.integers.append(current)
    if current == dest:
        ex.append(body)
    else:
        nxt = current + 1 if current < dest else current - 1
        ex.append((nxt, dest, DO_RANGE, body))
        ex.append(body)


def _exec_do_count(st):
    ex = st.exec_stack
    if not st.integers or not ex or st.integers[-1] <= 0:
        return
    n = st.integers.pop()
    body = ex.pop()
    ex.append((0, n - 1, DO_RANGE, body))


def _exec_do_times(st):
    ex = st.exec_stack
    if not st.integers or not ex or st.integers[-1] <= 0:
        return
    n = st.integers.pop()
    body = ex.pop()
    ex.append((0, n - 1, DO_RANGE, ("integer.pop", body)))


def _noop(st):
    pass


# ---------------------------------------------------------------------------
# input specials (read-only: items are peeked, never removed)

def _input_index(st):
    if not st.integers or not st.inputs:
        return
    idx = st.integers.pop() % len(st.inputs)
    st.push_input_item(st.inputs[idx])


def _input_inall(st):
    for item in st.inputs:
        st.push_input_item(item)


def _input_inallrev(st):
    for item in reversed(st.inputs):
        st.push_input_item(item)


# ---------------------------------------------------------------------------
# literal pseudo-instructions (the parser turns these tokens into literals;
# handlers exist so the names are ordinary registry members)

def _push_true(st):
    st.booleans.append(True)


def _push_false(st):
    st.booleans.append(False)


def _build_default_handlers() -> Dict[str, Handler]:
    h: Dict[str, Handler] = {}
    for typ in _STACK_TYPES:
        attr = _STACK_ATTR[typ]
        same = typ == "integer"
        h[f"{typ}.dup"] = _make_dup(attr)
        h[f"{typ}.flush"] = _make_flush(attr)
        h[f"{typ}.pop"] = _make_pop(attr)
        h[f"{typ}.rand"] = _RAND[typ]
        h[f"{typ}.rot"] = _make_rot(attr)
        h[f"{typ}.shove"] = _make_shove(attr, same)
        h[f"{typ}.stackdepth"] = _make_stackdepth(attr)
        h[f"{typ}.swap"] = _make_swap(attr)
        h[f"{typ}.yank"] = _make_yank(attr, same)
        h[f"{typ}.yankdup"] = _make_yankdup(attr, same)

    h["boolean.="] = _bool_eq
    h["boolean.and"] = _bool_and
    h["boolean.fromfloat"] = _bool_fromfloat
    h["boolean.frominteger"] = _bool_frominteger
    h["boolean.not"] = _bool_not
    h["boolean.or"] = _bool_or
    h["boolean.xor"] = _bool_xor

    h["exec.="] = _exec_eq
    h["exec.do*count"] = _exec_do_count
    h["exec.do*range"] = _exec_do_range
    h["exec.do*times"] = _exec_do_times
    h["exec.if"] = _exec_if
    h["exec.iflt"] = _exec_iflt
    h["exec.noop"] = _noop
    # Not in the headline instruction table, but published evolved programs
    # contain it; same semantics as exec.noop and it consumes budget normally.
    h["code.noop"] = _noop

    h["float.%"] = _float_mod
    h["float.*"] = _make_float_binary(lambda a, b: a * b)
    h["float.+"] = _make_float_binary(lambda a, b: a + b)
    h["float.-"] = _make_float_binary(lambda a, b: a - b)
    h["float./"] = _float_div
    h["float.<"] = _make_float_compare(lambda a, b: a < b)
    h["float.="] = _make_float_compare(lambda a, b: a == b)
    h["float.>"] = _make_float_compare(lambda a, b: a > b)
    h["float.abs"] = _make_float_unary(abs)
    h["float.cos"] = _make_float_unary(_safe_trig(math.cos))
    h["float.erc"] = _float_rand  # generation-time token; executes like rand
    h["float.exp"] = _float_exp
    h["float.fromboolean"] = _float_fromboolean
    h["float.frominteger"] = _float_frominteger
    h["float.ln"] = _float_ln
    h["float.log"] = _float_log
    h["float.max"] = _make_float_binary(lambda a, b: max(a, b))
    h["float.min"] = _make_float_binary(lambda a, b: min(a, b))
    h["float.neg"] = _make_float_unary(lambda x: -x)
    h["float.pow"] = _float_pow
    h["float.sin"] = _make_float_unary(_safe_trig(math.sin))
    h["float.tan"] = _make_float_unary(_safe_trig(math.tan))

    h["input.inall"] = _input_inall
    h["input.inallrev"] = _input_inallrev
    h["input.index"] = _input_index

    h["integer.%"] = _int_mod
    h["integer.*"] = _make_int_binary(lambda a, b: a * b)
    h["integer.+"] = _make_int_binary(lambda a, b: a + b)
    h["integer.-"] = _make_int_binary(lambda a, b: a - b)
    h["integer./"] = _int_div
    h["integer.<"] = _make_int_compare(lambda a, b: a < b)
    h["integer.="] = _make_int_compare(lambda a, b: a == b)
    h["integer.>"] = _make_int_compare(lambda a, b: a > b)
    h["integer.abs"] = _int_abs
    h["integer.erc"] = _integer_rand
    h["integer.fromboolean"] = _int_fromboolean
    h["integer.fromfloat"] = _int_fromfloat
    h["integer.ln"] = _int_ln
    h["integer.log"] = _int_log
    h["integer.max"] = _make_int_binary(lambda a, b: max(a, b))
    h["integer.min"] = _make_int_binary(lambda a, b: min(a, b))
    h["integer.neg"] = _int_neg
    h["integer.pow"] = _int_pow

    from .vector_instructions import vector_special_handlers

    h.update(vector_special_handlers())

    h["false"] = _push_false
    h["true"] = _push_true
    return h


_DEFAULT_REGISTRY: InstructionRegistry = None  # built lazily


def default_registry() -> InstructionRegistry:
    """The default instruction registry; built once and shared (handlers are
    stateless, so sharing across threads is safe)."""
    global _DEFAULT_REGISTRY
    if _DEFAULT_REGISTRY is None:
        _DEFAULT_REGISTRY = InstructionRegistry(_build_default_handlers())
    return _DEFAULT_REGISTRY
