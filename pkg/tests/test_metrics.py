import math
import random
from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from antplan.metrics import (
    ConstraintCheck,
    EmptyList,
    EmptyTruth,
    TooFewCommon,
    incorrect_and_repeats,
    krcc,
    miss_ratio,
    poc,
    score,
    success_ratio,
    summarize,
)


def brute_krcc(truth, predicted):
    """Independent O(n^2) concordant/discordant count over common tasks."""
    common = [t for t in truth if t in predicted]
    pr = {t: predicted.index(t) for t in common}
    tr = {t: truth.index(t) for t in common}
    nc = nd = 0
    for a, b in combinations(common, 2):
        s = (tr[a] - tr[b]) * (pr[a] - pr[b])
        nc += s > 0
        nd += s < 0
    n0 = len(common) * (len(common) - 1) / 2
    return (nc - nd) / math.sqrt(n0 * n0)


def brute_poc(truth, predicted):
    common = [t for t in truth if t in predicted]
    pairs = list(combinations(common, 2))
    if not pairs:
        return 1.0
    return sum(predicted.index(a) < predicted.index(b) for a, b in pairs) / len(pairs)


words = st.lists(st.sampled_from("ABCDEFGHIJKL"), unique=True, min_size=2, max_size=12)


def test_miss_ratio_examples():
    t = [f"t{i}" for i in range(18)]
    assert miss_ratio(t, list(reversed(t))) == 0.0
    assert miss_ratio(list("ABCD"), list("AC")) == 0.5
    assert miss_ratio(list("ABCD"), list("AC"), denominator=8) == 0.25
    with pytest.raises(EmptyTruth):
        miss_ratio([], ["A"])


def test_poc_examples():
    assert poc(list("ABC"), list("ABC")) == 1.0
    assert poc(list("ABC"), list("CBA")) == 0.0
    assert poc(list("ABCD"), list("ACBD")) == pytest.approx(5 / 6)
    assert poc(list("AB"), list("XY")) == 1.0


def test_krcc_examples():
    assert krcc(list("ABCD"), list("ABCD")) == 1.0
    assert krcc(list("ABCD"), list("DCBA")) == -1.0
    assert krcc(list("ABCD"), list("ACBD")) == pytest.approx(4 / 6)
    with pytest.raises(TooFewCommon):
        krcc(list("AB"), list("AX"))


def test_krcc_repeats_deduplicated():
    assert krcc(list("ABC"), list("ABAC")) == 1.0


def test_incorrect_and_repeats():
    assert incorrect_and_repeats(list("AB"), list("AB")) == (0, 0)
    assert incorrect_and_repeats(list("AB"), list("AXA")) == (1, 1)


def test_success_ratio():
    assert success_ratio([True, True, False, True]) == 0.75
    assert success_ratio([True] * 5) == 1.0
    with pytest.raises(EmptyList):
        success_ratio([])


def test_krcc_matches_brute_force_on_random_permutations():
    rng = random.Random(7)
    for _ in range(1000):
        n = rng.randint(2, 15)
        truth = [f"t{i}" for i in range(n)]
        pred = truth[:]
        rng.shuffle(pred)
        assert krcc(truth, pred) == brute_krcc(truth, pred)


@given(words)
def test_krcc_identity_and_reverse(x):
    assert krcc(x, x) == 1.0
    assert krcc(x, x[::-1]) == -1.0


@given(words, st.randoms(use_true_random=False))
def test_poc_matches_brute_force(truth, rnd):
    pred = truth[:]
    rnd.shuffle(pred)
    pred = pred[: rnd.randint(0, len(pred))]
    assert poc(truth, pred) == pytest.approx(brute_poc(truth, pred))


@given(words, st.lists(st.sampled_from("uvwxyz"), max_size=5), st.randoms(use_true_random=False))
def test_extraneous_tasks_only_change_incorrect(truth, extra, rnd):
    pred = truth[:]
    rnd.shuffle(pred)
    noisy = pred[:]
    for e in extra:
        noisy.insert(rnd.randint(0, len(noisy)), e)
    assert miss_ratio(truth, noisy) == miss_ratio(truth, pred)
    assert poc(truth, noisy) == poc(truth, pred)
    assert incorrect_and_repeats(truth, noisy)[0] == len(extra)


@given(words, st.randoms(use_true_random=False))
def test_ranges(truth, rnd):
    pred = [rnd.choice(truth + ["zz"]) for _ in range(rnd.randint(0, 15))]
    s = score(truth, pred)
    assert 0 <= s.miss_ratio <= 1 and 0 <= s.poc <= 1
    assert s.krcc is None or -1 <= s.krcc <= 1
    assert s.incorrect >= 0 and s.repeats >= 0


def test_perfect_score():
    s = score(list("ABCDE"), list("ABCDE"))
    assert (s.miss_ratio, s.poc, s.krcc, s.incorrect, s.repeats) == (0.0, 1.0, 1.0, 0, 0)


def test_constraint_check():
    check = ConstraintCheck(("a", "b"), ("x",), (("a", "b"),))
    assert check(["a", "c", "b"])
    assert not check(["b", "a"])
    assert not check(["a", "b", "x"])
    assert not check(["a"])


def test_summarize_counts_undefined_krcc():
    rep = summarize([score(list("AB"), list("AB")), score(list("AB"), ["A"])], n_failed=1)
    assert rep.n_trials == 2 and rep.n_failed == 1
    assert rep.krcc == 1.0 and rep.n_krcc_undefined == 1
    assert rep.miss_ratio == 0.25
