from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from demandaware.core import (
    MatrixFamilyId,
    Topology,
    enumerate_regular_topologies,
    family_corpus,
    identity,
    paper_matrix,
    random_doubly_stochastic,
)
from demandaware.oracle import (
    direct_throughput,
    relation_audit,
    throughput,
    verify_flow_plan,
    weak_direct_throughput,
)
from demandaware.rounding import fractional_part
from demandaware.synthesis import (
    BadRounding,
    KappaOutOfRange,
    best_known,
    construct_weak_direct,
    greedy_direct,
    maxcost_weak_direct,
    oblivious_baseline,
    stage_quantities,
    synthesize,
    two_stage_aware,
    two_stage_search,
)

M1 = paper_matrix(MatrixFamilyId("M1"))
M2 = paper_matrix(MatrixFamilyId("M2"))
FIG = paper_matrix(MatrixFamilyId("fig-second-stage"))
FIG_C = [[1, 0, 1], [1, 1, 0], [0, 1, 1]]


def test_greedy_examples():
    G = greedy_direct(M2)
    assert G.counts == ((2, 1), (1, 2))
    assert direct_throughput(G, M2).value == F(20, 27)
    for n in (1, 2, 4):
        G = greedy_direct(identity(n))
        assert G.counts == tuple(tuple(2 * n - 1 if i == j else 0 for j in range(n)) for i in range(n))
        assert direct_throughput(G, identity(n)).value == 1
    assert direct_throughput(greedy_direct(M1), M1).value == F(2, 3)


@settings(max_examples=25)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 2**32))
def test_greedy_lower_bound(n, k, seed):
    M = random_doubly_stochastic(n, k, seed)
    assert direct_throughput(greedy_direct(M), M).value >= F(n, 2 * n - 1)


def test_maxcost_examples():
    G, v = maxcost_weak_direct(paper_matrix(MatrixFamilyId("fig-flow-example")))
    assert v == F(67, 75)
    assert maxcost_weak_direct(identity(3))[1] == 1
    assert maxcost_weak_direct(M1)[1] == F(5, 6)


@pytest.mark.parametrize("n", [2, 3])
def test_optimality_against_enumeration(n):
    topos = list(enumerate_regular_topologies(n, 2 * n - 1))
    mats = [m for _, m in family_corpus(n)] + [random_doubly_stochastic(n, n + 1, 1000 + s) for s in range(6)]
    for M in mats:
        best_direct = max(direct_throughput(G, M).value for G in topos)
        best_wd = max(weak_direct_throughput(G, M).value for G in topos)
        assert direct_throughput(greedy_direct(M), M).value == best_direct
        assert maxcost_weak_direct(M)[1] == best_wd


def test_construct_examples():
    G = construct_weak_direct(M1)
    assert G.counts in (((2, 1), (1, 2)), ((1, 2), (2, 1)))
    assert weak_direct_throughput(G, M1).value == F(5, 6)
    assert construct_weak_direct(identity(3)).counts == ((5, 0, 0), (0, 5, 0), (0, 0, 5))
    M = random_doubly_stochastic(3, 4, 11)
    assert weak_direct_throughput(construct_weak_direct(M), M).value >= F(17, 20)


@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 2**32))
def test_construct_bound(n, k, seed):
    M = random_doubly_stochastic(n, k, seed)
    assert weak_direct_throughput(construct_weak_direct(M), M).value >= F(7 * n - 4, 8 * n - 4)


def test_stage_quantities_worked_example():
    sq = stage_quantities(FIG, F(5, 8), FIG_C)
    assert sq.b == [[F(3, 4), F(1, 2), F(3, 4)], [F(3, 4), F(3, 4), F(1, 2)], [F(1, 2), F(3, 4), F(3, 4)]]
    assert sq.d == [[2, 1, 2], [2, 2, 1], [1, 2, 2]]
    assert sq.eta == [[1, F(1, 2), 1], [1, 1, F(1, 2)], [F(1, 2), 1, 1]]
    assert sq.sigma == [
        [F(27, 64), F(9, 32), F(27, 64)],
        [F(27, 64), F(27, 64), F(9, 32)],
        [F(9, 32), F(27, 64), F(27, 64)],
    ]
    assert sq.zeta == [[2, 2, F(5, 2)], [F(5, 2), 2, 2], [2, F(5, 2), 2]]


def test_stage_quantities_errors():
    with pytest.raises(KappaOutOfRange):
        stage_quantities(FIG, F(1, 3), FIG_C)
    with pytest.raises(BadRounding):
        stage_quantities(FIG, F(5, 8), [[1, 1, 1], [0, 1, 0], [0, 1, 0]])
    with pytest.raises(BadRounding):
        stage_quantities(FIG, F(5, 8), [[2, 0, 0], [0, 1, 1], [0, 1, 1]])


@settings(max_examples=20)
@given(st.integers(2, 5), st.integers(1, 5), st.integers(0, 2**32))
def test_stage_invariants(n, k, seed):
    from demandaware.rounding import cycle_round

    M = random_doubly_stochastic(n, k, seed)
    bits = cycle_round(fractional_part(M.scaled(n - 1))).bits
    sq = stage_quantities(M, F(n - 1, 2 * n - 1), bits)
    assert all(sum(r) == 2 * n - 1 for r in sq.d)
    assert all(sum(c) == 2 * n - 1 for c in zip(*sq.d))
    assert all(0 <= e <= 1 for r in sq.eta for e in r)
    assert all(s >= 0 for r in sq.sigma for s in r)


def _stage2_load(plan, n):
    load = [[F(0)] * n for _ in range(n)]
    for rt in plan:
        if len(rt.path) == 2:
            for u, v in rt.path:
                load[u][v] += rt.amount * (2 * n - 1)
    return load


def test_two_stage_zero_overflow():
    for n in (2, 3, 4):
        U = paper_matrix(MatrixFamilyId("uniform", n))
        res = two_stage_aware(U, F(n - 1, 2 * n - 1), 4, 0)
        assert res is not None
        assert all(s == 0 for r in res.stages.sigma for s in r)
        assert verify_flow_plan(res.topology, U, res.plan, "general-strict", res.kappa).feasible


def test_two_stage_m1_all_successes_verify():
    for seed in range(10):
        res = two_stage_aware(M1, F(2, 3), 4, seed)
        if res is not None:
            assert verify_flow_plan(res.topology, M1, res.plan, "general-strict", F(2, 3)).feasible


def test_two_stage_kappa_range():
    with pytest.raises(KappaOutOfRange):
        two_stage_aware(M1, F(1, 4))
    with pytest.raises(KappaOutOfRange):
        two_stage_aware(M1, F(3, 2))


def test_two_stage_search_worked_example():
    res = two_stage_search(FIG, seed=0, bits=10)
    assert res.kappa >= F(2, 5)
    assert verify_flow_plan(res.topology, FIG, res.plan, "general-strict", res.kappa).feasible
    load = _stage2_load(res.plan, 3)
    assert all(load[a][b] <= res.stages.eta[a][b] for a in range(3) for b in range(3))
    assert throughput(res.topology, FIG).value >= res.kappa


def test_oblivious_examples():
    assert oblivious_baseline(1).counts == ((1,),)
    G = oblivious_baseline(2)
    assert G.counts == ((1, 2), (2, 1))
    assert throughput(G, M1).value == F(8, 9)
    M = random_doubly_stochastic(3, 4, 5)
    assert throughput(oblivious_baseline(3), M).value >= F(3, 5)


def test_best_known():
    G, rep = best_known(M2, "general-strict")
    assert rep.value >= F(100, 114)
    for mode in ("direct-strict", "direct-weak", "general-strict", "general-weak"):
        assert best_known(identity(2), mode)[1].value == 1
    assert best_known(M1, "direct-strict")[1].value == F(2, 3)
    G, rep = best_known(M1, "general-weak", seed=3)
    assert (G, rep.value) == (best_known(M1, "general-weak", seed=3)[0], rep.value)


def test_synthesize_unknown():
    with pytest.raises(ValueError):
        synthesize(M1, "magic")


@pytest.mark.parametrize("algo", ["greedy", "maxcost", "weakdir-construct", "two-stage", "oblivious"])
def test_synthesized_topologies_are_regular_and_audited(algo):
    for _, M in family_corpus(2):
        G = synthesize(M, algo, 0)
        assert isinstance(G, Topology) and G.degree == 3
        relation_audit(G, M)
