"""Compiled inner loops for relaxed exploration.

``explore`` is a generalized Dijkstra over the delete relaxation: an action
fires once all its preconditions have final costs, and its value is the sum
(h_add) or max (h_max) of those costs plus its own cost.
"""

from __future__ import annotations

import numpy as np
from numba import njit

INF = np.inf


@njit(cache=True)
def _push(keys, vals, size, k, v):
    i = size
    keys[i] = k
    vals[i] = v
    while i > 0:
        parent = (i - 1) >> 1
        if keys[parent] <= keys[i]:
            break
        keys[parent], keys[i] = keys[i], keys[parent]
        vals[parent], vals[i] = vals[i], vals[parent]
        i = parent
    return size + 1


@njit(cache=True)
def _pop(keys, vals, size):
    k = keys[0]
    v = vals[0]
    size -= 1
    keys[0] = keys[size]
    vals[0] = vals[size]
    i = 0
    while True:
        left = 2 * i + 1
        if left >= size:
            break
        child = left
        if left + 1 < size and keys[left + 1] < keys[left]:
            child = left + 1
        if keys[i] <= keys[child]:
            break
        keys[child], keys[i] = keys[i], keys[child]
        vals[child], vals[i] = vals[i], vals[child]
        i = child
    return k, v, size


@njit(cache=True)
def explore(bits, pre_count, cost, add_flat, add_starts, pre_of_flat, pre_of_starts, use_max):
    n_atoms = bits.shape[0]
    n_act = cost.shape[0]
    atom = np.full(n_atoms, INF)
    sup = np.full(n_atoms, -1, np.int64)
    act = np.full(n_act, INF)
    acc = np.zeros(n_act)
    unsat = pre_count.copy()
    done = np.zeros(n_atoms, np.bool_)
    cap = n_atoms + add_flat.shape[0] + 1
    keys = np.empty(cap)
    vals = np.empty(cap, np.int64)
    size = 0
    for p in range(n_atoms):
        if bits[p]:
            atom[p] = 0.0
            size = _push(keys, vals, size, 0.0, p)
    while size > 0:
        c, p, size = _pop(keys, vals, size)
        if done[p] or c > atom[p]:
            continue
        done[p] = True
        for j in range(pre_of_starts[p], pre_of_starts[p + 1]):
            a = pre_of_flat[j]
            if use_max:
                if c > acc[a]:
                    acc[a] = c
            else:
                acc[a] += c
            unsat[a] -= 1
            if unsat[a] == 0:
                v = acc[a] + cost[a]
                act[a] = v
                for t in range(add_starts[a], add_starts[a + 1]):
                    q = add_flat[t]
                    if v < atom[q]:
                        atom[q] = v
                        sup[q] = a
                        size = _push(keys, vals, size, v, q)
    return atom, act, sup


@njit(cache=True)
def cheapest_deleter(g, act, del_flat, del_starts):
    best = -1
    best_v = INF
    for j in range(del_starts[g], del_starts[g + 1]):
        a = del_flat[j]
        if act[a] < best_v:
            best_v = act[a]
            best = a
    return best, best_v


@njit(cache=True)
def relaxed_plan(bits, atom, act, sup, goal_pos, goal_neg, del_flat, del_starts, pre_flat, pre_starts,
                 pre_count, neg_flat, neg_starts, cost):
    """Cost of the supporter-based relaxed plan and its applicable actions.

    Returns (inf, empty) when some goal is relaxed-unreachable.
    """
    n_act = cost.shape[0]
    chosen = np.zeros(n_act, np.bool_)
    seen = np.zeros(bits.shape[0], np.bool_)
    stack = np.empty(bits.shape[0] + n_act, np.int64)
    top = 0
    order = np.empty(n_act, np.int64)
    n_chosen = 0
    for g in goal_pos:
        if not bits[g]:
            if atom[g] == INF:
                return INF, np.empty(0, np.int64)
            stack[top] = g
            top += 1
    for g in goal_neg:
        if bits[g]:
            a, v = cheapest_deleter(g, act, del_flat, del_starts)
            if a < 0 or v == INF:
                return INF, np.empty(0, np.int64)
            if not chosen[a]:
                chosen[a] = True
                order[n_chosen] = a
                n_chosen += 1
                for j in range(pre_starts[a], pre_starts[a] + pre_count[a]):
                    p = pre_flat[j]
                    if not bits[p] and not seen[p]:
                        stack[top] = p
                        top += 1
    while top > 0:
        top -= 1
        p = stack[top]
        if seen[p]:
            continue
        seen[p] = True
        a = sup[p]
        if chosen[a]:
            continue
        chosen[a] = True
        order[n_chosen] = a
        n_chosen += 1
        for j in range(pre_starts[a], pre_starts[a] + pre_count[a]):
            q = pre_flat[j]
            if not bits[q] and not seen[q]:
                stack[top] = q
                top += 1
    value = 0.0
    preferred = np.empty(n_chosen, np.int64)
    n_pref = 0
    for i in range(n_chosen):
        a = order[i]
        value += cost[a]
        ok = True
        for j in range(pre_starts[a], pre_starts[a] + pre_count[a]):
            if not bits[pre_flat[j]]:
                ok = False
                break
        if ok:
            for j in range(neg_starts[a], neg_starts[a + 1]):
                if bits[neg_flat[j]]:
                    ok = False
                    break
        if ok:
            preferred[n_pref] = a
            n_pref += 1
    return value, np.sort(preferred[:n_pref])


@njit(cache=True)
def applicable(bits, pre_flat, pre_starts, pre_count, neg_flat, neg_bounds):
    n_act = pre_count.shape[0]
    out = np.empty(n_act, np.int64)
    n = 0
    for a in range(n_act):
        ok = True
        for j in range(pre_starts[a], pre_starts[a] + pre_count[a]):
            if not bits[pre_flat[j]]:
                ok = False
                break
        if ok:
            for j in range(neg_bounds[a], neg_bounds[a + 1]):
                if bits[neg_flat[j]]:
                    ok = False
                    break
        if ok:
            out[n] = a
            n += 1
    return out[:n]


def warm_up():
    """Load or build the compiled kernels outside any search deadline."""
    bits = np.array([1, 1, 0], dtype=np.uint8)
    one = np.array([1], dtype=np.int64)
    zero = np.array([0], dtype=np.int64)
    starts = np.array([0, 1], dtype=np.int64)
    cost = np.array([1.0])
    atom, act, sup = explore(bits, one, cost, zero, starts, np.array([0], dtype=np.int64),
                             np.array([0, 0, 1, 1], dtype=np.int64), False)
    explore(bits, one, cost, zero, starts, np.array([0], dtype=np.int64),
            np.array([0, 0, 1, 1], dtype=np.int64), True)
    empty = np.zeros(0, dtype=np.int64)
    relaxed_plan(bits, atom, act, sup, empty, empty, empty, np.zeros(4, dtype=np.int64), one, zero, one,
                 np.array([2], dtype=np.int64), starts, cost)
    cheapest_deleter(0, act, empty, np.zeros(4, dtype=np.int64))
    applicable(bits, one, zero, one, np.array([2], dtype=np.int64), starts)
