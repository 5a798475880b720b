"""Bitmask and array encodings of a ground task used by search and heuristics.

A :class:`Compiled` object depends only on the atom and action tables, so it can
be shared by every task produced with :meth:`GroundTask.rebind`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..pddl.grounding import GroundAction, GroundTask
from . import _kernels


def mask(ids) -> int:
    m = 0
    for i in ids:
        m |= 1 << i
    return m


@dataclass(eq=False)
class Compiled:
    n_atoms: int
    actions: tuple[GroundAction, ...]
    pre: list[int]
    neg: list[int]
    add: list[int]
    dele: list[int]
    cost: np.ndarray
    # flattened precondition lists; atom n_atoms is a padding atom that is always true,
    # n_atoms + 1 one that is always false
    pre_flat: np.ndarray
    pre_starts: np.ndarray
    pre_count: np.ndarray
    neg_flat: np.ndarray
    neg_starts: np.ndarray
    add_atoms: np.ndarray  # add entries sorted by atom
    add_acts: np.ndarray
    add_starts: np.ndarray
    add_targets: np.ndarray  # distinct atoms with at least one achiever
    # CSR tables for the compiled relaxed exploration
    act_add_flat: np.ndarray
    act_add_starts: np.ndarray
    pre_of_flat: np.ndarray
    pre_of_starts: np.ndarray
    del_flat: np.ndarray
    del_starts: np.ndarray
    neg_bounds: np.ndarray
    deleters: dict[int, list[int]] = field(default_factory=dict)
    pre_lists: list[tuple[int, ...]] = field(default_factory=list)
    min_cost: float = 0.0

    @property
    def true_atom(self) -> int:
        return self.n_atoms

    @property
    def false_atom(self) -> int:
        return self.n_atoms + 1

    def bits(self, state: int) -> np.ndarray:
        """0/1 vector of length ``n_atoms + 2`` including the padding atoms."""
        n = self.n_atoms + 2
        raw = (state | (1 << self.n_atoms)).to_bytes((n + 7) // 8, "little")
        return np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[:n]

    def applicable(self, state: int, bits: np.ndarray | None = None) -> np.ndarray:
        if bits is None:
            bits = self.bits(state)
        return _kernels.applicable(bits, self.pre_flat, self.pre_starts, self.pre_count, self.neg_flat,
                                   self.neg_bounds)

    def succ(self, state: int, a: int) -> int:
        return (state & ~self.dele[a]) | self.add[a]


_warmed = False


def _warm():
    global _warmed
    if not _warmed:
        _kernels.warm_up()
        _warmed = True


def _csr(rows: list) -> tuple[np.ndarray, np.ndarray]:
    starts = np.zeros(len(rows) + 1, dtype=np.int64)
    starts[1:] = np.cumsum([len(r) for r in rows])
    flat = np.array([x for r in rows for x in r], dtype=np.int64)
    return flat, starts


def compile_task(task: GroundTask) -> Compiled:
    _warm()
    acts = task.actions
    n = len(task.atoms)
    pre_flat, pre_starts, pre_count = [], [], []
    neg_flat, neg_starts = [], []
    add_entries = []
    deleters: dict[int, list[int]] = {}
    pre_lists = []
    for i, a in enumerate(acts):
        p = sorted(a.pre_pos)
        pre_lists.append(tuple(p))
        pre_starts.append(len(pre_flat))
        pre_flat.extend(p or [n])
        pre_count.append(len(p) or 1)
        neg_starts.append(len(neg_flat))
        neg_flat.extend(sorted(a.pre_neg) or [n + 1])
        add_entries.extend((atom, i) for atom in a.add)
        for atom in a.delete:
            deleters.setdefault(atom, []).append(i)
    add_entries.sort()
    add_atoms = np.array([e[0] for e in add_entries], dtype=np.int64)
    add_acts = np.array([e[1] for e in add_entries], dtype=np.int64)
    if len(add_atoms):
        boundary = np.flatnonzero(np.diff(add_atoms)) + 1
        add_starts = np.concatenate(([0], boundary)).astype(np.int64)
    else:
        add_starts = np.zeros(0, dtype=np.int64)
    cost = np.array([a.cost for a in acts], dtype=np.float64)
    act_add_flat, act_add_starts = _csr([sorted(a.add) for a in acts])
    pre_of: list[list[int]] = [[] for _ in range(n + 2)]
    for i, a in enumerate(acts):
        for p in pre_lists[i] or (n,):
            pre_of[p].append(i)
    pre_of_flat, pre_of_starts = _csr(pre_of)
    del_flat, del_starts = _csr([deleters.get(i, []) for i in range(n + 2)])
    return Compiled(
        n_atoms=n,
        actions=acts,
        pre=[mask(a.pre_pos) for a in acts],
        neg=[mask(a.pre_neg) for a in acts],
        add=[mask(a.add) for a in acts],
        dele=[mask(a.delete) for a in acts],
        cost=cost,
        pre_flat=np.array(pre_flat, dtype=np.int64),
        pre_starts=np.array(pre_starts, dtype=np.int64),
        pre_count=np.array(pre_count, dtype=np.int64),
        neg_flat=np.array(neg_flat, dtype=np.int64),
        neg_starts=np.array(neg_starts, dtype=np.int64),
        add_atoms=add_atoms,
        add_acts=add_acts,
        add_starts=add_starts,
        add_targets=add_atoms[add_starts] if len(add_atoms) else add_atoms,
        act_add_flat=act_add_flat,
        act_add_starts=act_add_starts,
        pre_of_flat=pre_of_flat,
        pre_of_starts=pre_of_starts,
        del_flat=del_flat,
        del_starts=del_starts,
        neg_bounds=np.append(np.array(neg_starts, dtype=np.int64), len(neg_flat)),
        deleters=deleters,
        pre_lists=pre_lists,
        min_cost=float(cost.min()) if len(cost) else 0.0,
    )
