"""
Driving the command line
========================

Generate a graph, cache it as a snapshot, and run the analysis subcommands
against it. The same calls work from a shell as ``depnet <command> ...``.
"""

import os
import tempfile

from depnet.cli import run_cli

work = tempfile.mkdtemp(prefix="depnet-")
tables = os.path.join(work, "pa")
snap = os.path.join(work, "pa.snap")


def depnet(*argv):
    print("$ depnet", " ".join(argv))
    code = run_cli(list(argv))
    print(f"[exit {code}]\n")


depnet("generate", "pa", "--n", "5000", "--m", "3", "--seed", "1", "--out", tables)
depnet("ingest", "--graph", tables, "--out", snap)
depnet("stats", "--graph", snap)
depnet("fit", "--graph", snap, "--bootstrap", "50", "--seed", "2")

# %%
# Degree histograms are written as ``deg,count`` CSV for plotting tools.
depnet("degree", "--graph", snap, "--direction", "in", "--out", os.path.join(work, "deg.csv"))
with open(os.path.join(work, "deg.csv")) as fh:
    print("".join(fh.readlines()[:6]))

# %%
# Validation errors exit with code 1; usage errors with code 2.
depnet("stats", "--graph", os.path.join(work, "missing"))
depnet("frobnicate")
