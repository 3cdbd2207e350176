"""Run the transversal harness on one case, e.g. ``python demos/kepka_case.py case3``."""

import sys

from multloop import kepka

name = sys.argv[1] if len(sys.argv) > 1 else "case1"
for r in kepka.run_case(name):
    extra = f" rank {r.params['rank']}" if r.check == "generation" else ""
    print(f"{r.check:14s} {r.case:28s} passed={r.passed!s:5s} residual={r.max_residual:.3g}{extra}")
