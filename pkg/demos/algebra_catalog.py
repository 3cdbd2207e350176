"""Print fingerprints of the non-stub catalog algebras."""

from multloop import liealg

for name, alg in sorted(liealg.CATALOG.items()):
    if alg.is_stub:
        continue
    fp = liealg.fingerprint(alg)
    print(f"{name:8s} dim {fp.dim}  derived {list(fp.derived)}  lower central {list(fp.lower_central)}"
          f"  centre {fp.center_dim}")
