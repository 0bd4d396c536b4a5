"""Compare fabrication methods, materials, and growth effects statistically.

The bundled sample table holds synthetic as-built errors for 15 robots
(tape/weld/loop x ldpe/fabric, minus the weld-ldpe combo whose bodies tear),
each measured before and after repeated growth. The analysis checks
homogeneity of variance first, then picks ANOVA or Kruskal-Wallis for the
method factor, t or Welch for the material factor, and a paired t-test for
growth, with Tukey HSD locating the differing method pairs.
"""

import csv
import os

from vinefab import analyze_table, group_summary
from vinefab.formats import read_samples, write_json

HERE = os.path.dirname(__file__)
OUT = os.path.join(HERE, "out")
os.makedirs(OUT, exist_ok=True)

table = read_samples(os.path.join(HERE, "data", "dh_samples.csv"))
print(f"{len(table)} observations, parameters {table.parameters()}\n")

report = analyze_table(table)
for notice in report["notices"]:
    print(f"note: {notice}")
print()

for param, factors in report["parameters"].items():
    method = factors["method"]
    print(f"=== {param} ===")
    for level, s in method["groups"].items():
        ci = (f"[{s['ci_low']:.2f}, {s['ci_high']:.2f}]"
              if s["ci_low"] is not None else "(n = 1)")
        print(f"  {level:<5} n={s['n']:<3} mean {s['mean']:7.2f}  95% CI {ci}")
    omnibus = method["omnibus"]
    print(f"  method effect: {omnibus['test']} p = {omnibus['p_value']:.3g}")
    for pair in method["pairwise"]:
        if pair["significant"]:
            print(f"    {pair['a']} vs {pair['b']}: p = "
                  f"{pair['p_value']:.3g} {pair['stars']}")
    mat = factors["material"]["omnibus"]
    ph = factors["phase"]["omnibus"]
    print(f"  material effect: {mat['test']} p = {mat['p_value']:.3g}")
    print(f"  growth effect: {ph['test']} p = {ph['p_value']:.3g} "
          f"(mean shift {ph['mean_diff']:+.3f})")
    print()

write_json(report, os.path.join(OUT, "method_report.json"))

# the growth tables are plain CSVs; summarize minimum pressures per combo
with open(os.path.join(HERE, "data", "growth_pressures.csv")) as fh:
    rows = list(csv.DictReader(fh))
by_combo = {}
for r in rows:
    key = f"{r['method']}/{r['material']}"
    by_combo.setdefault(key, []).append(float(r["min_pressure_kpa"]))
print("minimum growth pressure by combo (synthetic, kPa):")
for combo, s in group_summary(by_combo).items():
    print(f"  {combo:<12} mean {s.mean:5.1f}  CI [{s.ci_low:5.1f}, {s.ci_high:5.1f}]")

print(f"\nwrote {os.path.join(OUT, 'method_report.json')}")
