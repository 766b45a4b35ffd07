"""
Wrong side of the tracks: leakage through a proxy, end to end
=============================================================

Graduation depends only on fitness; fitness depends on which playground a
child grew up near. Sample a population, estimate the joint, equalize, and
audit. The same pipeline is then run through the command-line tool.
"""

import subprocess
import sys
import tempfile
from pathlib import Path

from outcome_equal import S, W, audit, estimate_joint, ground_truth_joint, mutual_information, outcome_equalize, sample
from outcome_equal.audit import ThresholdPolicy
from outcome_equal.fixtures import playground

config = playground(n=100_000, seed=2015)
truth = ground_truth_joint(config)
print(f"ground truth I(outcome; neighborhood) = {mutual_information(truth, S, W):.4f} nats")

data = sample(config)
est, diag = estimate_joint(data)
print(f"{diag.n_records} records, {diag.empty_cell_count} empty cells")
print(f"total variation to truth: {0.5 * abs(est.mass - truth.mass).sum():.4f}")

# %%
eq = outcome_equalize(est)
report = audit(est, eq, ThresholdPolicy("grad", 0.6))
print()
print(report.to_table())

# %%
# Same thing from the shell. Every artifact embeds the run manifest.
here = Path(__file__).resolve().parent
with tempfile.TemporaryDirectory() as tmp:
    def cli(*args):
        cmd = [sys.executable, "-m", "outcome_equal", *map(str, args)]
        print("$ outcome-equal", " ".join(map(str, args)))
        proc = subprocess.run(cmd, cwd=tmp, capture_output=True, text=True)
        print(proc.stdout + proc.stderr, end="")
        print(f"(exit {proc.returncode})\n")

    cli("synth", "--input", here / "data" / "playground.synth.json", "--output", "pg.csv")
    cli("estimate", "--input", "pg.csv", "--schema", "pg.schema.json", "--output", "est.json")
    cli("equalize", "--input", "est.json", "--output", "eq.json")
    cli("verify", "--input", "eq.json")
    cli("audit", "--input", "est.json", "eq.json", "--target", "grad", "--tau", "0.6", "--output", "audit.json")
