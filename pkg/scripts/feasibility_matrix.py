"""Which variants fit which coupling map, with and without CNOT direction reversal."""

import argparse
import time

from bellsim import VARIANTS, build
from bellsim.connectivity import BUILTIN_MAPS, check_feasibility, load_coupling_map


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--maps", nargs="+", default=list(BUILTIN_MAPS), help="builtin names or map files")
    args = ap.parse_args()

    maps = [load_coupling_map(m) for m in args.maps]
    for strict in (False, True):
        print("strict direction" if strict else "direction flips allowed")
        print(f"  {'variant':<15}" + "".join(f"{m.name:>11}" for m in maps))
        for variant in VARIANTS:
            spec = build(variant, "QS" if variant in ("I", "II") else None)
            cells = []
            for cmap in maps:
                start = time.perf_counter()
                ok = check_feasibility(spec, cmap, allow_direction_flip=not strict).feasible
                ms = (time.perf_counter() - start) * 1e3
                cells.append(f"{'yes' if ok else 'no':>6}{ms:>4.0f}ms")
            print(f"  {variant:<15}" + "".join(cells))


if __name__ == "__main__":
    main()
