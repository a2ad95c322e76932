#!/usr/bin/env python3
"""Writes configs/device_d3.json: a 17-qubit distance-3 rotated surface code layout."""
import json
import math
import sys

# Rotated-code lattice: data on odd-odd sites, measure on plaquette centers.
data = [(x, y) for x in (1, 3, 5) for y in (1, 3, 5)]
measure = [(2, 2), (2, 4), (4, 2), (4, 4), (4, 0), (2, 6), (0, 2), (6, 4)]


def chip(x, y):
    return (x + y) // 2 - 1, (x - y) // 2 + 2


def gamma1_table(seed):
    # Smooth background plus one TLS bump per qubit.
    rows = []
    bump = 5.6 + 0.07 * (seed % 13)
    for k in range(41):
        f = 5.0 + 0.05 * k
        rate = 0.04 + 0.004 * (f - 5.0) + 0.03 * math.exp(-((f - bump) / 0.03) ** 2)
        rows.append([round(f, 4), round(rate, 6)])
    return rows


qubits = []
for i, (x, y) in enumerate(sorted(measure) + sorted(data)):
    row, col = chip(x, y)
    is_measure = (x, y) in measure
    k = (7 * i + 3) % 17
    f_r = 4.55 + 0.015 * k
    lo = 5.35 + 0.02 * (k % 5) if is_measure else 6.0 + 0.02 * (k % 5)
    qubits.append({
        "row": row,
        "col": col,
        "role": "measure" if is_measure else "data",
        "alpha_GHz": round(-0.21 + 0.002 * (k % 7), 4),
        "g_eff": round(0.036 + 0.0005 * (k % 5), 5),
        "f_r_GHz": round(f_r, 4),
        "eta": round(0.35 + 0.01 * (k % 9), 3),
        "kappa_MHz": round(3.2 + 0.1 * (k % 11), 3),
        "amp_ref": 0.6,
        "search_band_GHz": [round(lo, 4), round(lo + 0.6, 4)],
        "gamma1_table": gamma1_table(k),
    })

qubits.sort(key=lambda q: (q["row"], q["col"]))
out = sys.argv[1] if len(sys.argv) > 1 else "configs/device_d3.json"
with open(out, "w") as fh:
    json.dump({"qubits": qubits}, fh, indent=1)
    fh.write("\n")
