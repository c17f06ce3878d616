"""Vector-stack instructions.

Vectors are fixed-length tuples of floats; every instruction produces
vectors of length ``env.dimension``.  Operand order for non-commutative
binary operations follows the float-stack convention: the second-popped
(deeper) vector is the left operand, so ``vector.-`` on a stack holding
``[a, b]`` (b on top) computes ``a - b``.

``vector.wrand`` deserves a note.  It samples a random point inside the
search bounds; when a float is available it is popped and its magnitude
tightens the per-component range to ``[-|x|, |x|]`` intersected with the
bounds.  Evolved programs exploit this heavily: a small float upstream of
``vector.wrand`` yields a local neighbourhood sample, while a huge or
infinite float degenerates to a full-bounds draw (a restart).  A zero or
NaN float makes the instruction a protected no-op, and with an empty float
stack the draw simply covers the whole bounded box.
"""
from __future__ import annotations

import math
from typing import Dict

from .state import PushState


def _pop2_vectors(st: PushState):
    s = st.vectors
    b = s.pop()
    a = s.pop()
    return a, b


def _vec_add(st):
    if len(st.vectors) >= 2:
        a, b = _pop2_vectors(st)
        st.vectors.append(tuple(x + y for x, y in zip(a, b)))


def _vec_sub(st):
    if len(st.vectors) >= 2:
        a, b = _pop2_vectors(st)
        st.vectors.append(tuple(x - y for x, y in zip(a, b)))


def _vec_mul(st):
    if len(st.vectors) >= 2:
        a, b = _pop2_vectors(st)
        st.vectors.append(tuple(x * y for x, y in zip(a, b)))


def _vec_div(st):
    # Protected per component: a zero divisor passes the numerator through.
    if len(st.vectors) >= 2:
        a, b = _pop2_vectors(st)
        st.vectors.append(tuple(x / y if y != 0.0 else x for x, y in zip(a, b)))


def _vec_scale(st):
    if st.vectors and st.floats:
        x = st.floats.pop()
        v = st.vectors.pop()
        st.vectors.append(tuple(c * x for c in v))


def _vec_dprod(st):
    if len(st.vectors) >= 2:
        a, b = _pop2_vectors(st)
        st.floats.append(sum(x * y for x, y in zip(a, b)))


def _vec_mag(st):
    if st.vectors:
        v = st.vectors.pop()
        st.floats.append(math.sqrt(sum(c * c for c in v)))


def _make_dim_modify(op):
    # Protected against non-finite floats: writing inf/NaN into a component
    # would poison the search point (the harness scores such points +inf).
    def handler(st):
        if (st.vectors and st.integers and st.floats
                and math.isfinite(st.floats[-1])):
            i = st.integers.pop()
            x = st.floats.pop()
            v = st.vectors.pop()
            k = i % len(v)
            st.vectors.append(tuple(op(c, x) if j == k else c
                                    for j, c in enumerate(v)))
    return handler


def _vec_between(st):
    if len(st.vectors) >= 2 and st.floats:
        t = st.floats.pop()
        a, b = _pop2_vectors(st)
        st.vectors.append(tuple(x + t * (y - x) for x, y in zip(a, b)))


def _vec_urand(st):
    d = st.env.dimension
    rng = st.env.rng
    while True:
        draw = rng.standard_normal(d).tolist()
        norm = math.sqrt(sum(x * x for x in draw))
        if norm > 0.0:
            break
    st.vectors.append(tuple(x / norm for x in draw))


def _vec_wrand(st):
    env = st.env
    lo = env.bounds_lo
    hi = env.bounds_hi
    floats = st.floats
    r = math.inf
    if floats:
        r = abs(floats[-1])
        if r != r or r == 0.0:
            return  # protected: no usable range
        floats.pop()
    u = env.rng.random(env.dimension).tolist()
    if r is math.inf or not math.isfinite(r):
        st.vectors.append(tuple(l + (h - l) * ui
                                for l, h, ui in zip(lo, hi, u)))
        return
    out = []
    for i, ui in enumerate(u):
        l, h = lo[i], hi[i]
        if l < -r:
            l = -r
        if h > r:
            h = r
        if l > h:  # range and bounds disjoint: snap to the nearest bound
            l = h = min(max(0.0, lo[i]), hi[i])
        out.append(l + (h - l) * ui)
    st.vectors.append(tuple(out))


def _run_code_on_floats(st, code_item, pushes) -> bool:
    """Push the given floats, run ``code_item`` under the shared budget and
    report whether it ran to completion."""
    from .interpreter import run_nested

    st.floats.extend(pushes)
    return run_nested(st, code_item)


def _vec_apply(st):
    if not st.vectors or not st.code:
        return
    code_item = st.code.pop()
    v = st.vectors.pop()
    out = []
    for c in v:
        if not _run_code_on_floats(st, code_item, (c,)):
            return  # budget exhausted: operands consumed, result discarded
        out.append(st.floats.pop() if st.floats else c)
    st.vectors.append(tuple(out))


def _vec_zip(st):
    if len(st.vectors) < 2 or not st.code:
        return
    code_item = st.code.pop()
    b = st.vectors.pop()
    a = st.vectors.pop()
    out = []
    for x, y in zip(a, b):
        if not _run_code_on_floats(st, code_item, (x, y)):
            return
        out.append(st.floats.pop() if st.floats else x)
    st.vectors.append(tuple(out))


def vector_special_handlers() -> Dict[str, object]:
    return {
        "vector.*": _vec_mul,
        "vector./": _vec_div,
        "vector.+": _vec_add,
        "vector.-": _vec_sub,
        "vector.apply": _vec_apply,
        "vector.between": _vec_between,
        "vector.dim+": _make_dim_modify(lambda c, x: c + x),
        "vector.dim*": _make_dim_modify(lambda c, x: c * x),
        "vector.dprod": _vec_dprod,
        "vector.mag": _vec_mag,
        "vector.scale": _vec_scale,
        "vector.urand": _vec_urand,
        "vector.wrand": _vec_wrand,
        "vector.zip": _vec_zip,
    }
