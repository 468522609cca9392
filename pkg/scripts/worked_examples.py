"""Recompute the worked examples: two-node separations, the max-cost flow
example and the second-stage grids. Prints exact values."""

from fractions import Fraction as F

from demandaware.core import MatrixFamilyId, Topology, enumerate_regular_topologies, fmt, paper_matrix
from demandaware.oracle import relation_audit, throughput, weak_direct_throughput, weak_throughput
from demandaware.synthesis import maxcost_weak_direct, stage_quantities


def grid(rows):
    return "[" + ", ".join("[" + ", ".join(fmt(x) for x in r) + "]" for r in rows) + "]"


def main():
    M1 = paper_matrix(MatrixFamilyId("M1"))
    M2 = paper_matrix(MatrixFamilyId("M2"))
    topos = list(enumerate_regular_topologies(2, 3))
    print("two-node topologies:", [list(map(list, G.counts)) for G in topos])
    for name, M in (("M1", M1), ("M2", M2)):
        for G in topos:
            d, wd, s, w = relation_audit(G, M)
            print(f"  {name} on {G}: direct={fmt(d)} weak_direct={fmt(wd)} strict={fmt(s)} weak={fmt(w)}")
    print("strict on [[1,2],[2,1]] for M1:", fmt(throughput(topos[1], M1).value))
    print("best strict for M2:", fmt(max(throughput(G, M2).value for G in topos)))
    N = paper_matrix(MatrixFamilyId("weak-upper-2x2"))
    print("best weak for (1/9)[[5,4],[4,5]]:", fmt(max(weak_throughput(G, N).value for G in topos)))

    ex = paper_matrix(MatrixFamilyId("fig-flow-example"))
    G, v = maxcost_weak_direct(ex)
    print("max-cost topology:", G, "value", fmt(v))
    ref_G = Topology.from_counts([[0, 1, 4], [1, 4, 0], [4, 0, 1]])
    print("reference topology value:", fmt(weak_direct_throughput(ref_G, ex).value))

    fig = paper_matrix(MatrixFamilyId("fig-second-stage"))
    sq = stage_quantities(fig, F(5, 8), [[1, 0, 1], [1, 1, 0], [0, 1, 1]])
    for name in ("b", "d", "eta", "sigma", "zeta"):
        print(f"{name:>5} = {grid(getattr(sq, name))}")


if __name__ == "__main__":
    main()
