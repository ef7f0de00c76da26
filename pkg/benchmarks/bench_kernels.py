"""Compare the compiled and pure-Python combinatorial kernels.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import timeit

from crosscov import _kernels_py as py

try:
    from crosscov import _ckernels as cy
except ImportError:  # extension not built
    cy = None


def cases():
    rgs8, rgs9, rgs10 = py.nc_rgs(8), py.nc_rgs(9), py.nc_rgs(10)
    pairs16 = py.nc2_partners(16)
    lab10, eta10 = [0, 1] * 5, [0, 1, 1, 0, 0, 1, 0, 1, 1, 0]
    lab16, eta16 = [0, 0, 1, 1] * 4, [0, 1] * 8
    yield "nc_rgs(10)", lambda k: k.nc_rgs(10)
    yield "nc_rgs(11)", lambda k: k.nc_rgs(11)
    yield "nc2_partners(16)", lambda k: k.nc2_partners(16)
    yield "mobius_to_top(NC(8))", lambda k: k.mobius_to_top(rgs8)
    yield "mobius_to_top(NC(9))", lambda k: k.mobius_to_top(rgs9)
    yield "cc_tally(NC(10), 2 labels)", lambda k: k.cc_tally(rgs10, lab10, eta10, 2)
    yield "pair_tally(NC2(16), 2 labels)", lambda k: k.pair_tally(pairs16, lab16, eta16, 2)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print(f"{'kernel':32s} {'python [s]':>12s} {'cython [s]':>12s} {'speedup':>9s}")
    for name, fn in cases():
        t_py = min(timeit.repeat(lambda: fn(py), number=1, repeat=args.repeat))
        if cy is None:
            print(f"{name:32s} {t_py:12.4f} {'n/a':>12s} {'':>9s}")
            continue
        t_cy = min(timeit.repeat(lambda: fn(cy), number=1, repeat=args.repeat))
        print(f"{name:32s} {t_py:12.4f} {t_cy:12.4f} {t_py / t_cy:8.1f}x")


if __name__ == "__main__":
    main()
