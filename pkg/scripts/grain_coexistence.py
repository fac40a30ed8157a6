"""Grain search on two independent pairs of correlated NOT elements.

Each pair updates both of its elements to NOR of the pair, so a pair behaves
like a single NOT once coarse-grained. Prints every grain that reaches the
maximal phi, and optionally the full phi-vs-grain table as CSV.

    python scripts/grain_coexistence.py --state 1010 --csv grains.csv
"""
import argparse

from cee.algebra import tensor_product
from cee.grain import GrainBudget, grain_search
from cee.report import grain_csv, write_atomic
from cee.states import SystemState
from cee.tpm import tpm_from_functions


def nor_pair():
    return tpm_from_functions(2, lambda b: [1 - (b[0] | b[1])] * 2)


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--state", default="1010", help="micro state, element 0 first")
    p.add_argument("--strides", type=int, nargs="+", default=[1, 2, 4])
    p.add_argument("--csv", help="write phi for every evaluated grain here")
    args = p.parse_args()

    tpm = tensor_product(nor_pair(), nor_pair())
    state = SystemState.parse(args.state, tpm.n)
    result = grain_search(tpm, state.index, GrainBudget(strides=tuple(args.strides)))
    print(f"{len(result.evaluated)} grains evaluated, max phi {result.max_phi:.6g}, {len(result.maximal)} maximal:")
    for g, phi in result.maximal:
        groups = " ".join("{" + ",".join(map(str, grp)) + "}" for grp in g.groups)
        print(f"  {groups:<22} thresholds={list(g.thresholds)} stride={g.stride}  phi={phi:.6g}")
    if args.csv:
        write_atomic(args.csv, grain_csv(result))


if __name__ == "__main__":
    main()
