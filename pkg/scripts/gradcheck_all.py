"""Finite-difference check of all 18 architectures, in both difference precisions.

    python scripts/gradcheck_all.py --seeds 10 --precision double extended
"""

import argparse
import time
from itertools import product

from reactsent.neural.cells import CELLS
from reactsent.neural.gradcheck import gradient_check, random_instance
from reactsent.neural.model import ModelSpec


def run(precision: str, seeds: int, hidden: int, tol: float) -> None:
    start = time.perf_counter()
    errors = []
    for cell, bi, layers in product(CELLS, (False, True), (1, 2, 3)):
        spec = ModelSpec(cell, bi, layers, hidden=hidden)
        for seed in range(seeds):
            model, x, mask, y = random_instance(spec, seed=seed)
            res = gradient_check(model, x, mask, y, fd_precision=precision)
            worst = max(res.per_param, key=res.per_param.get)
            errors.append((res.max_rel_error, spec.name, seed, worst))
    errors.sort(reverse=True)
    over = [e for e in errors if e[0] >= tol]
    print(f"[{precision}] {len(over)}/{len(errors)} instances at or above {tol:g}; "
          f"worst {errors[0][0]:.3e}; {time.perf_counter() - start:.0f} s")
    for err, name, seed, param in errors[:5]:
        print(f"    {err:.3e}  {name:<18} seed {seed}  {param}")


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--seeds", type=int, default=10)
    parser.add_argument("--hidden", type=int, default=3)
    parser.add_argument("--tolerance", type=float, default=1e-4)
    parser.add_argument("--precision", nargs="+", default=["double", "extended"], choices=["double", "extended"])
    args = parser.parse_args()
    for precision in args.precision:
        run(precision, args.seeds, args.hidden, args.tolerance)


if __name__ == "__main__":
    main()
