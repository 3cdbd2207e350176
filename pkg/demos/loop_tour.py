"""Build a few loops and print what the checks say about them."""

import numpy as np

from multloop import loopcore as lc

for fam, expr in [("family_a", "z^2"), ("family_a", "2*z"), ("family_b", "x*z"), ("family_c", "sin(z)")]:
    loop = lc.get_family(fam, expr)
    ax = lc.axioms_check(loop)
    assoc = lc.associator_report(loop)
    print(f"{fam:9s} {expr:7s} axioms {ax.max_residual:.1e}  largest associator {assoc.max_residual:.3g}")

loop = lc.family_a("z^2")
a, b, c = np.array([0, 0, 1.0]), np.array([0, 0, 1.0]), np.array([1.0, 0, 0])
print("associator", a, b, c, "->", lc.associator(loop, a, b, c))

sec = lc.case_section(1)
L1 = lc.loop_from_section(sec)
rep = lc.nilpotency_class2_check(L1, sec.central_dirs[0])
print("case-1 section loop: class", rep.params["class"], "passed", rep.passed)
print("bijectivity witness for z^2:", lc.bijectivity_witness("z^2"))
