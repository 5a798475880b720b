"""End-to-end acceptance checks, one test per criterion.

Each test prints a single PASS/FAIL line and records it for the terminal
summary, then asserts. Criterion 1 replays the full paired planning
experiment and takes roughly a quarter of an hour on one core.
"""

import math
import random
import time
from itertools import combinations
from pathlib import Path

import pytest
from scipy.stats import kendalltau

from antplan.harness import (
    World,
    load_script,
    planning_summary,
    random_instances,
    run_anticipation_eval,
    run_planning_experiment,
    run_script,
)
from antplan.harness.interrupt import bundled_script_path
from antplan.household import ScenarioSpec, load_layout
from antplan.metrics import krcc
from antplan.pddl import State, apply, format_domain, parse_domain, validate
from antplan.planner import BudgetExceeded, SearchConfig, optimal_oracle, plan

from conftest import ACCEPTANCE

PDDL = Path(__file__).parent / "fixtures" / "pddl"


def report(n, ok, detail):
    ACCEPTANCE[n] = (bool(ok), detail)
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def brute_krcc(truth, predicted):
    pos_t = {t: i for i, t in enumerate(truth)}
    pos_p = {t: i for i, t in enumerate(predicted)}
    common = [t for t in truth if t in pos_p]
    s = sum((pos_t[a] - pos_t[b]) * (pos_p[a] - pos_p[b]) > 0 for a, b in combinations(common, 2))
    d = sum((pos_t[a] - pos_t[b]) * (pos_p[a] - pos_p[b]) < 0 for a, b in combinations(common, 2))
    return (s - d) / (len(common) * (len(common) - 1) / 2)


@pytest.mark.slow
def test_1_anticipation_lowers_cost():
    start = time.monotonic()
    trials = run_planning_experiment(reps=10, ks=(0, 1, 3, 6), time_unit=2.0, routine_length=10, seed=0)
    summary = planning_summary(trials)
    cost = [summary[f"k={k}"]["cost_ratio"] for k in (0, 1, 3, 6)]
    length = summary["k=6"]["length_ratio"]
    failures = sum(len(t.failures) for t in trials)
    monotone = all(b <= a + 0.03 for a, b in zip(cost, cost[1:]))
    ok = cost[3] <= 0.85 and length <= 0.95 and monotone and failures == 0
    report(1, ok, f"cost ratios k=0,1,3,6 {[round(c, 3) for c in cost]}, length ratio k=6 {length:.3f}, "
                  f"{failures} failed episodes, {time.monotonic() - start:.0f}s")


def test_2_joint_goal_beats_sequential():
    start = time.monotonic()
    w = World.create(ScenarioSpec(objects=("milk", "mug")))
    joint = optimal_oracle(w.task_for(w.init, ["serve_milk", "serve_coffee"]), compiled=w.compiled)
    first = optimal_oracle(w.task_for(w.init, ["serve_milk"]), compiled=w.compiled)
    s = State(w.init)
    for a in first.plan:
        s = apply(s, a)
    second = optimal_oracle(w.task_for(s.atoms, ["serve_coffee"]), compiled=w.compiled)
    elapsed = time.monotonic() - start
    ok = joint.cost < first.cost + second.cost and elapsed < 10
    report(2, ok, f"joint {joint.cost} vs sequential {first.cost}+{second.cost}={first.cost + second.cost}, "
                  f"{elapsed:.1f}s")


def test_3_planner_soundness(rosters):
    deadlines = (0.2, 0.5, 1.0)
    invalid, overruns, returned, worst = [], [], 0, 0.0
    for i, inst in enumerate(random_instances(100, rosters, seed=1, sizes=(1, 2, 3))):
        d = deadlines[i % 3]
        t = time.monotonic()
        res = plan(inst.task, SearchConfig(deadline=d, seed=i), inst.world.compiled)
        over = time.monotonic() - t - d
        worst = max(worst, over)
        if over > 0.1:
            overruns.append((inst.tasks, round(over, 3)))
        if res.plan is not None:
            returned += 1
            if not validate(res.plan, inst.task):
                invalid.append(inst.tasks)
    report(3, not invalid and not overruns,
           f"{returned}/100 plans returned, {len(invalid)} invalid, {len(overruns)} overruns "
           f"(worst {max(worst, 0) * 1000:.0f} ms past deadline)")


def test_4_planner_quality(rosters):
    ratios, skipped = [], 0
    for inst in random_instances(200, rosters, seed=4, sizes=(1, 2)):
        if len(ratios) >= 50:
            break
        try:
            opt = optimal_oracle(inst.task, node_budget=1_000_000, compiled=inst.world.compiled)
        except BudgetExceeded:
            skipped += 1
            continue
        if opt.plan is None:
            skipped += 1
            continue
        res = plan(inst.task, SearchConfig(deadline=10.0), inst.world.compiled)
        ratios.append(math.inf if res.plan is None else res.cost / opt.cost if opt.cost else float(res.cost == 0))
    n = len(ratios)
    equal = sum(r == 1.0 for r in ratios)
    ok = n >= 50 and max(ratios) <= 1.25 and equal >= 0.8 * n
    report(4, ok, f"{n} instances ({skipped} skipped), worst ratio {max(ratios):.3f}, optimal on {equal}/{n}")


def test_5_krcc_matches_pair_counting():
    rng = random.Random(2024)
    mismatches = 0
    for _ in range(1000):
        n = rng.randint(2, 20)
        truth = [f"t{i}" for i in range(n)]
        pred = rng.sample(truth, n)
        ours = krcc(truth, pred)
        tau = kendalltau(range(n), [pred.index(t) for t in truth]).statistic
        mismatches += ours != brute_krcc(truth, pred) or not math.isclose(ours, tau, abs_tol=1e-12)
    ends = all(krcc(x, x) == 1.0 and krcc(x, x[::-1]) == -1.0
               for x in ([f"t{i}" for i in range(n)] for n in range(2, 11)))
    report(5, mismatches == 0 and ends, f"{mismatches} mismatches on 1000 permutations, identity/reverse ok={ends}")


def test_6_anticipation_protocol(catalog):
    start = time.monotonic()
    oracle = run_anticipation_eval(500, "oracle", seed=0, catalog=catalog)
    markov = run_anticipation_eval(500, "markov", seed=0, catalog=catalog)
    elapsed = time.monotonic() - start
    ok = ((oracle.miss_ratio, oracle.poc, oracle.krcc) == (0.0, 1.0, 1.0)
          and markov.miss_ratio > 0.2 and markov.repeats > 0 and markov.incorrect > 0 and markov.krcc < 1
          and elapsed < 120)
    report(6, ok, f"oracle miss/poc/krcc {oracle.miss_ratio}/{oracle.poc}/{oracle.krcc}; markov miss "
                  f"{markov.miss_ratio:.3f} repeats {markov.repeats:.2f} incorrect {markov.incorrect:.2f} "
                  f"krcc {markov.krcc:.3f}; {elapsed:.0f}s")


def test_7_dusting_round_trip():
    domain = parse_domain((PDDL / "dusting_domain.pddl").read_text())
    again = parse_domain(format_domain(domain))
    d = again.action("dusting")
    negs = [str(a) for a in d.pre_neg]
    ok = again == domain and d.cost == 10 and negs == ["(dusted ?o ?l)"]
    report(7, ok, f"identical AST {again == domain}, cost {d.cost}, negative preconditions {negs}")


def test_8_interrupt_demo():
    start = time.monotonic()
    t = run_script(load_script(bundled_script_path()))
    elapsed = time.monotonic() - start
    back = "(obj_in vegetables fridge)" in t.final_facts
    cut = "(cut vegetables)" in t.final_facts
    ok = t.ok and back and cut and elapsed < 60
    report(8, ok, f"checks {t.checks}, vegetables back in fridge {back}, still cut {cut}, {elapsed:.0f}s")


def test_9_scale_audit(catalog, world):
    layout = load_layout()
    types = {o["type"] for o in layout.objects.values()}
    cfg = SearchConfig(deadline=30, max_expansions=1500)
    lengths = {}
    for t in catalog.task_ids:
        task = world.task_for(world.init, [catalog.all_tasks[t].goal_key])
        res = plan(task, cfg, world.compiled)
        lengths[t] = len(res.plan) if res.plan is not None and validate(res.plan, task) else None
    bad = {t: n for t, n in lengths.items() if n is None or not 1 <= n <= 16}
    ok = (len(layout.rooms) == 5 and len(layout.objects) == 33 and 5 <= len(types) <= 10
          and len(layout.receptacles) == 19 and len(world.base.actions) >= 33 and not bad)
    spread = sorted(n for n in lengths.values() if n is not None)
    report(9, ok, f"{len(layout.rooms)} rooms, {len(layout.objects)} objects of {len(types)} types, "
                  f"{len(layout.receptacles)} receptacles, {len(world.base.actions)} ground actions, "
                  f"plan lengths {spread[0]}..{spread[-1]}, out of range {bad}")
