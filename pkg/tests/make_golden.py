"""Regenerate the frozen files in tests/golden (run by hand, not by pytest).

The Du Val table comes from the brute-force oracles; the index sets for
the window [1/2, 1) come from the verified sweep, as first derived.
"""

import json
import math
import sys
from pathlib import Path

from oracles import cyclic_cartier_index, mld_cyclic_dense
from toricmld import explorer as ex

GOLDEN = Path(__file__).parent / "golden"


def du_val_indices(R=50):
    found = set()
    for r in range(1, R + 1):
        for a1 in range(r):
            for a2 in range(r):
                if math.gcd(r, a1, a2) == 1 and mld_cyclic_dense(r, a1, a2) == 1:
                    found.add(cyclic_cartier_index(r, (a1, a2)))
    return sorted(found)


def write(name, obj):
    GOLDEN.mkdir(exist_ok=True)
    (GOLDEN / name).write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")


def main(argv):
    write("du_val_index_r50.json",
          {"dim": 2, "rmax": 50, "window": "[1,1]", "indices": du_val_indices(50)})
    if "--sweep" in argv:
        records = list(ex.enumerate_cyclic(2, 500))
        (row,) = ex.index_table(records, [ex.Window.parse("[1/2,1)")], R1=100)
        write("index_half_one.json", {"dim": 2, "window": str(row.window), "r1": 100, "r2": 500,
                                      "indices_r1": row.indices_r1, "indices_r2": row.indices})


if __name__ == "__main__":
    main(sys.argv[1:])
