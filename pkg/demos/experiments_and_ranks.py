"""Seeded resample experiments, a results file, and a rank comparison."""

import io
from pathlib import Path

from tdeclf.dataset_io import load_ucr_split
from tdeclf.harness import ClassifierSpec, read_results, run_experiment, score_matrix, write_results
from tdeclf.stats import format_report, mean_ranks_and_cliques

data = Path(__file__).resolve().parent.parent / "data"
splits = [load_ucr_split(data, name) for name in ("ItalyPowerDemand", "ArrowHead")]
specs = [
    ClassifierSpec.of("1NN-ED", "ed"),
    ClassifierSpec.of("cBOSS", "cboss", k=20, s=10),
    ClassifierSpec.of("TDE", "tde", k=20, s=10),
]
results = run_experiment(splits, specs, n_resamples=3, base_seed=0)
text = write_results(results)
print(text)

datasets, names, matrix = score_matrix(read_results(io.StringIO(text)), "accuracy")
for d, row in zip(datasets, matrix):
    print(d, {n: round(float(v), 3) for n, v in zip(names, row)})

# the rank test needs at least five rows, so treat each (dataset, resample) as one
per_cell = {}
for r in results:
    per_cell.setdefault((r.dataset, r.resample), {})[r.classifier] = r.accuracy
rows = [[per_cell[key][n] for n in names] for key in sorted(per_cell)]
print(format_report(mean_ranks_and_cliques(rows, names), "accuracy"))
