"""Program representation: parsing, formatting and point counting.

A program is a nested tuple of atoms. Atoms are plain Python values:

* ``bool``  - boolean literal (``true`` / ``false`` in source text)
* ``int``   - integer literal
* ``float`` - float literal
* ``str``   - instruction name
* ``tuple`` - sublist of atoms

The concrete syntax is whitespace-separated tokens inside nested
parentheses, e.g. ``(5 3 integer.+)``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Union

Atom = Union[bool, int, float, str, tuple]

_INT_RE = re.compile(r"[+-]?[0-9]+$")
_TOKEN_RE = re.compile(r"[()]|[^\s()]+")


class PushParseError(ValueError):
    """Raised for malformed program text. ``position`` is a 0-based offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


class UnknownInstructionError(PushParseError):
    def __init__(self, token: str, position: int):
        super().__init__(f"unknown instruction {token!r}", position)
        self.token = token


def count_points(root: tuple) -> int:
    """Size of a program: one per atom plus one per list, root included."""
    n = 1
    for atom in root:
        n += count_points(atom) if type(atom) is tuple else 1
    return n


@dataclass(frozen=True)
class Program:
    root: tuple
    points: int

    @classmethod
    def from_root(cls, root: tuple) -> "Program":
        return cls(root=root, points=count_points(root))

    def __str__(self) -> str:
        return format_program(self)


def _classify_token(token: str, position: int, names) -> Atom:
    if token == "true":
        return True
    if token == "false":
        return False
    if _INT_RE.match(token):
        return int(token)
    try:
        return float(token)
    except ValueError:
        pass
    if names is not None and token not in names:
        raise UnknownInstructionError(token, position)
    return token


def parse(text: str, instructions=None) -> Program:
    """Parse program text into a :class:`Program`.

    ``instructions`` is a container of valid instruction names; when omitted
    the default registry is used.  A single top-level list becomes the
    program root; multiple top-level forms are wrapped in an implicit root
    list (the syntax used by some published multi-expression programs).
    """
    if instructions is None:
        from .instructions import default_registry

        instructions = default_registry().names
    forms: list = []
    stack: list = []
    open_positions: list = []
    for match in _TOKEN_RE.finditer(text):
        token = match.group()
        pos = match.start()
        if token == "(":
            stack.append([])
            open_positions.append(pos)
        elif token == ")":
            if not stack:
                raise PushParseError("unbalanced ')'", pos)
            done = tuple(stack.pop())
            open_positions.pop()
            if stack:
                stack[-1].append(done)
            else:
                forms.append(done)
        else:
            atom = _classify_token(token, pos, instructions)
            if stack:
                stack[-1].append(atom)
            else:
                forms.append(atom)
    if stack:
        raise PushParseError("unbalanced '('", open_positions[-1])
    if not forms:
        raise PushParseError("empty program text", 0)
    if len(forms) == 1 and type(forms[0]) is tuple:
        root = forms[0]
    else:
        root = tuple(forms)
    return Program.from_root(root)


def _format_atom(atom: Atom) -> str:
    t = type(atom)
    if t is tuple:
        return "(" + " ".join(_format_atom(a) for a in atom) + ")"
    if t is bool:
        return "true" if atom else "false"
    if t is float:
        return repr(atom)
    return str(atom)


def format_program(program: Union[Program, tuple]) -> str:
    """Render a program as parseable text.  Floats keep full precision, so
    ``parse(format_program(p))`` is structurally identical to ``p``."""
    root = program.root if isinstance(program, Program) else program
    return _format_atom(root)


def atoms_equal(a: Atom, b: Atom) -> bool:
    """Structural equality; NaN literals compare equal to themselves."""
    ta, tb = type(a), type(b)
    if ta is not tb:
        return False
    if ta is tuple:
        return len(a) == len(b) and all(atoms_equal(x, y) for x, y in zip(a, b))
    if ta is float and math.isnan(a):
        return math.isnan(b)
    return a == b


def iter_atoms(root: tuple) -> Iterator[Atom]:
    """Yield every non-list atom in depth-first order."""
    for atom in root:
        if type(atom) is tuple:
            yield from iter_atoms(atom)
        else:
            yield atom


def subtree_at(root: tuple, index: int) -> Atom:
    """Return the node at ``index`` in preorder (0 is the root list)."""
    node, _ = _walk_to(root, index)
    return node


def replace_subtree(root: tuple, index: int, replacement: Atom) -> tuple:
    """Return a copy of ``root`` with the preorder node ``index`` replaced.
    Index 0 (the root itself) is not replaceable."""
    if index <= 0:
        raise IndexError("cannot replace the program root")
    new_root, remaining = _rebuild(root, index, replacement)
    if remaining is not None:
        raise IndexError(f"subtree index {index} out of range")
    return new_root


def _walk_to(node: Atom, index: int):
    """Depth-first search for the node with the given preorder index.
    Returns (node, None) when found, else (None, atoms consumed)."""
    if index == 0:
        return node, None
    consumed = 1
    if type(node) is tuple:
        for child in node:
            found, used = _walk_to(child, index - consumed)
            if used is None:
                return found, None
            consumed += used
    return None, consumed


def _rebuild(node: Atom, index: int, replacement: Atom):
    if index == 0:
        return replacement, None
    if type(node) is not tuple:
        return node, index - 1
    remaining = index - 1
    out = []
    replaced = False
    for child in node:
        if replaced or remaining is None:
            out.append(child)
            continue
        new_child, remaining = _rebuild(child, remaining, replacement)
        out.append(new_child)
        if remaining is None:
            replaced = True
            remaining = None
    if replaced:
        return tuple(out), None
    return tuple(out), remaining
