import json
import subprocess
import sys
import time
from pathlib import Path

import numpy as np

from fpns.averaging import ModelSpec
from fpns.coupling import SimConfig, run

# ---- tiny two-bump run, no files ----
cfg = SimConfig(Nx=16, Nv=16, V=6.0, T_final=0.05, dt=1e-3, record_every=0.01)
t0 = time.perf_counter()
res = run(cfg)
t1 = time.perf_counter()
print("run ok        ", res.status, len(res.records), f"{t1 - t0:.2f}s")
rec0, recN = res.records[0], res.records[-1]
print("mass drift    ", abs(recN["mass"] - rec0["mass"]))
print("Ebar mono     ", all(res.records[i + 1]["Ebar"] <= res.records[i]["Ebar"] + 1e-10 for i in range(len(res.records) - 1)))
print("X1 drift      ", abs(recN["X1_1"] - rec0["X1_1"]), abs(recN["X1_2"] - rec0["X1_2"]))
print("residual mid  ", res.records[2]["entropy_residual"])
print("min f         ", recN["min_f"])
print("t grid        ", [round(r["t"], 6) for r in res.records])

# ---- T_final = 0 ----
res0 = run(SimConfig(Nx=16, Nv=16, T_final=0.0))
print("T=0 records   ", len(res0.records), res0.records[0]["t"])

# ---- with output dir + determinism ----
outA, outB = Path("/tmp/fpns_A"), Path("/tmp/fpns_B")
for d in (outA, outB):
    if d.exists():
        for p in d.iterdir():
            p.unlink()
resA = run(cfg, out_dir=outA)
resB = run(cfg, out_dir=outB)
same = (outA / "records.csv").read_bytes() == (outB / "records.csv").read_bytes()
print("CSV identical ", same)
same_sum = (outA / "summary.json").read_bytes() == (outB / "summary.json").read_bytes()
print("summary ident ", same_sum)
man = json.loads((outA / "manifest.json").read_text())
print("manifest      ", man["status"], len(man["files"]), man["grid"]["Nx"])
listed = {f["name"]: f["bytes"] for f in man["files"]}
ok_sizes = all((outA / n).stat().st_size == b for n, b in listed.items())
print("sizes ok      ", ok_sizes, sorted(listed)[:4])

# ---- resume via CLI ----
snaps = sorted(outA.glob("snapshot_*.bin"))
print("snapshots     ", [s.name for s in snaps])
cfg_path = Path("/tmp/fpns_cfg.json")
cfg_path.write_text(json.dumps({
    "Nx": 16, "Nv": 16, "T_final": 0.05, "dt": 1e-3, "record_every": 0.01,
    "preset": "two-bump", "model": {"variant": "CS", "r0": 0.25},
}))
r = subprocess.run([sys.executable, "-m", "fpns.cli", "presets"], capture_output=True, text=True)
print("presets rc    ", r.returncode, r.stdout.strip().splitlines())
r = subprocess.run(
    [sys.executable, "-m", "fpns.cli", "resume", "--snapshot", str(snaps[-1]),
     "--out", "/tmp/fpns_R", "--t-final", "0.07"],
    capture_output=True, text=True)
print("resume rc     ", r.returncode, r.stdout.strip() or r.stderr.strip())
r = subprocess.run([sys.executable, "-m", "fpns.cli", "check-model", "--config", str(cfg_path)],
                   capture_output=True, text=True)
print("check rc      ", r.returncode)
print(r.stdout if r.returncode == 0 else r.stderr)
r = subprocess.run([sys.executable, "-m", "fpns.cli", "gap", "--config", str(cfg_path), "--thickness-sweep"],
                   capture_output=True, text=True)
print("gap rc        ", r.returncode)
print(r.stdout if r.returncode == 0 else r.stderr)
r = subprocess.run([sys.executable, "-m", "fpns.cli", "run", "--bogus"], capture_output=True, text=True)
print("bad flag rc   ", r.returncode)
r = subprocess.run([sys.executable, "-m", "fpns.cli", "run", "--config", "/tmp/nope.json", "--out", "/tmp/x"],
                   capture_output=True, text=True)
print("missing cfg   ", r.returncode, r.stderr.strip()[:90])
