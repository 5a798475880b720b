import heapq
import math
import random
import time
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from antplan.harness import random_instances
from antplan.household import parse_literal
from antplan.pddl import State, apply, ground, parse_domain, parse_problem, validate
from antplan.planner import BudgetExceeded, SearchConfig, compile_task, h_add, h_ff, h_max, optimal_oracle, plan
from antplan.planner.heuristics import reference_h_add, reference_h_max
from antplan.planner.search import HEURISTICS, STRATEGIES

PDDL = Path(__file__).parent / "fixtures" / "pddl"


def delivery(problem_text=None):
    domain = parse_domain((PDDL / "deliver_domain.pddl").read_text())
    text = problem_text or (PDDL / "deliver_milk.pddl").read_text()
    return ground(domain, parse_problem(text, domain))


def two_items(goal):
    return delivery(f"""(define (problem two) (:domain delivery)
      (:objects milk bread - item kitchen desk - place left right - slot)
      (:init (agent_at kitchen) (item_at milk kitchen) (item_at bread kitchen) (free left) (free right))
      (:goal (and {goal})))""")


def milk_dijkstra():
    """Hand-coded state graph: (agent place, where the milk is); costs 5 / 5 / 30."""
    start, goal = ("kitchen", "kitchen"), "desk"
    dist, heap = {start: 0}, [(0, start)]
    while heap:
        d, (agent, milk) = heapq.heappop(heap)
        if milk == goal:
            return d
        if d > dist[(agent, milk)]:
            continue
        succ = [(("desk" if agent == "kitchen" else "kitchen", milk), 30)]
        if milk == agent:
            succ.append(((agent, "hand"), 5))
        if milk == "hand":
            succ.append(((agent, agent), 5))
        for s, c in succ:
            if d + c < dist.get(s, math.inf):
                dist[s] = d + c
                heapq.heappush(heap, (d + c, s))
    return math.inf


# deliver-milk micro problem ---------------------------------------------------

def test_micro_plan_matches_dijkstra():
    task = delivery()
    res = plan(task, SearchConfig(deadline=5))
    assert [a.name for a in res.plan] == ["pickup", "move", "putdown"]
    assert res.cost == milk_dijkstra() == 40
    assert res.proven_optimal and validate(res.plan, task)
    assert optimal_oracle(task).cost == 40


def test_goal_already_true():
    task = delivery().rebind([], [])
    res = plan(task, SearchConfig(deadline=1))
    assert res.plan is not None and len(res.plan) == 0 and res.proven_optimal
    assert len(optimal_oracle(task).plan) == 0


def test_unsolvable_goal():
    task = two_items("(item_at milk desk) (holding milk left) (holding milk right)")
    res = plan(task, SearchConfig(deadline=5))
    assert res.plan is None and res.unsolvable and not res.timed_out
    # delete relaxation cannot see the single milk being in two slots
    assert math.isfinite(h_add(task.init, task))
    assert optimal_oracle(task).plan is None


@pytest.mark.parametrize("heuristic", HEURISTICS)
@pytest.mark.parametrize("strategy", STRATEGIES)
def test_config_matrix_solves_micro(heuristic, strategy):
    res = plan(two_items("(item_at milk desk) (item_at bread desk)"),
               SearchConfig(deadline=5, heuristic=heuristic, strategy=strategy))
    assert res.cost == 5 + 5 + 30 + 5 + 5


def test_joint_delivery_beats_sequential():
    joint = optimal_oracle(two_items("(item_at milk desk) (item_at bread desk)"))
    first = optimal_oracle(two_items("(item_at milk desk)"))
    s = State.initial(first_task := two_items("(item_at milk desk)"))
    for a in first.plan:
        s = apply(s, a)
    second_task = first_task.rebind([first_task.atoms[i] for i in s.atoms],
                                    [parse_literal("(item_at bread desk)")])
    second = optimal_oracle(second_task)
    assert joint.cost < first.cost + second.cost
    # both in hand at once: 5+5+30+5+5, versus 40 then 30+5+30+5
    assert (joint.cost, first.cost + second.cost) == (50, 110)


def test_budget_exceeded(world):
    task = world.task_for(world.init, ["iron_clothes", "water_roses"])
    with pytest.raises(BudgetExceeded):
        optimal_oracle(task, node_budget=100, compiled=world.compiled)


def test_config_validation():
    for bad in [dict(deadline=0), dict(heuristic="lm_cut"), dict(strategy="dfs"), dict(weights=(0.5,)),
                dict(weights=()), dict(max_expansions=0)]:
        with pytest.raises(ValueError):
            SearchConfig(**bad)


# heuristics ---------------------------------------------------------------------

def test_heuristic_values_on_micro():
    task = delivery()
    assert h_add(task.init, task) > 0
    assert h_add(task.init, task) == reference_h_add(task.init, task) == 40
    assert h_max(task.init, task) <= 40
    goal_state = State.initial(task)
    for a in plan(task, SearchConfig(deadline=2)).plan:
        goal_state = apply(goal_state, a)
    assert h_add(goal_state, task) == h_max(goal_state, task) == h_ff(goal_state, task) == 0


@settings(max_examples=40)
@given(seed=st.integers(0, 10**6), steps=st.integers(0, 25))
def test_kernels_match_reference(world, seed, steps):
    rng = random.Random(seed)
    s = State(world.init)
    for _ in range(steps):
        options = [a for a in world.base.actions if a.pre_pos <= s.atoms and not (a.pre_neg & s.atoms)]
        s = apply(s, rng.choice(options))
    task = world.task_for(s.atoms, rng.sample(sorted(world.goal_map.goals), 3))
    assert h_add(s, task, world.compiled) == reference_h_add(s, task)
    assert h_max(s, task, world.compiled) == reference_h_max(s, task)
    assert h_max(s, task, world.compiled) <= h_add(s, task, world.compiled)


def test_hmax_admissible_on_small_instances(rosters):
    for inst in random_instances(6, rosters, seed=11, sizes=(1,)):
        opt = optimal_oracle(inst.task, compiled=inst.world.compiled)
        assert h_max(inst.task.init, inst.task, inst.world.compiled) <= opt.cost


# search contract ------------------------------------------------------------------

def test_plans_valid_and_anytime_monotone(rosters):
    for i, inst in enumerate(random_instances(20, rosters, seed=3, sizes=(1, 2, 3))):
        res = plan(inst.task, SearchConfig(deadline=1.0, seed=i), inst.world.compiled)
        assert res.plan is not None, inst.tasks
        rep = validate(res.plan, inst.task)
        assert rep.valid and rep.cost == res.cost
        assert all(a > b for a, b in zip(res.incumbents, res.incumbents[1:]))
        assert res.incumbents[-1] == res.cost


def test_deadline_respected(world):
    task = world.task_for(world.init, ["iron_clothes", "water_roses", "bake_cake", "make_bed"])
    for d in (0.05, 0.3, 1.0):
        t = time.monotonic()
        res = plan(task, SearchConfig(deadline=d), world.compiled)
        assert time.monotonic() - t <= d + 0.1
        assert res.elapsed <= d + 0.1


def test_optimal_when_exhausted(rosters):
    checked = 0
    for inst in random_instances(8, rosters, seed=21, sizes=(1, 2)):
        try:
            opt = optimal_oracle(inst.task, 300_000, inst.world.compiled)
        except BudgetExceeded:
            continue
        checked += 1
        res = plan(inst.task, SearchConfig(deadline=10), inst.world.compiled)
        assert res.cost <= 1.25 * opt.cost
        if res.proven_optimal:
            assert res.cost == opt.cost
    assert checked >= 4


def test_joint_dominance_at_optimality(rosters):
    """cost(G1 and G2) <= cost(G1) + cost(G2 after G1) whenever all three are optimal."""
    checked = 0
    for inst in random_instances(10, rosters, seed=8, sizes=(2,)):
        w, (t1, t2) = inst.world, inst.tasks
        try:
            joint = optimal_oracle(inst.task, 300_000, w.compiled)
            first = optimal_oracle(w.task_for(w.init, [t1]), 300_000, w.compiled)
            s = State(w.init)
            for a in first.plan:
                s = apply(s, a)
            second = optimal_oracle(w.task_for(s.atoms, [t2]), 300_000, w.compiled)
        except BudgetExceeded:
            continue
        assert joint.cost <= first.cost + second.cost
        checked += 1
    assert checked >= 5


def test_max_expansions_makes_runs_repeatable(world):
    task = world.task_for(world.init, ["serve_milk", "make_coffee", "serve_coffee"])
    cfg = SearchConfig(deadline=60, max_expansions=3000, seed=4)
    a, b = plan(task, cfg, world.compiled), plan(task, cfg, world.compiled)
    assert [str(x) for x in a.plan] == [str(x) for x in b.plan]
    assert a.expanded == b.expanded and a.incumbents == b.incumbents


def test_first_plan_only():
    task = two_items("(item_at milk desk) (item_at bread desk)")
    res = plan(task, SearchConfig(deadline=5, anytime=False))
    assert len(res.incumbents) == 1 and not res.proven_optimal


def test_compile_is_reusable_across_goals(world):
    c = compile_task(world.base)
    assert c.n_atoms == len(world.base.atoms)
    for key in ("serve_milk", "wash_dishes"):
        res = plan(world.task_for(world.init, [key]), SearchConfig(deadline=2), c)
        assert validate(res.plan, world.task_for(world.init, [key]))
