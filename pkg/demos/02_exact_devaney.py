"""Build an exactly Devaney chaotic map on the triod and read its manifest."""

import json

from peano_chaos.construct import exact_devaney
from peano_chaos.spaces import triod

build = exact_devaney(triod(), "1/2", 3, seed=1)
manifest = build.manifest("exact-devaney")
for r in manifest["rounds"]:
    failed = [k for k, v in r["clauses"].items() if v != "PASS"]
    print(f"round {r['round']}: {r['cells']:5d} cells  mesh {r['mesh']:>8}  "
          f"{r['periodic_points']:5d} periodic points  {r['pieces']:6d} pieces  "
          f"{'all clauses PASS' if not failed else 'FAIL ' + ','.join(failed)}")
print("verdict:", manifest["verdict"])
print(json.dumps(manifest["params"]))
