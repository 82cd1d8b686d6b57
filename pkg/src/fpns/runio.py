"""Run outputs: snapshot binary, records CSV, plot data, summary, manifest.

Snapshot layout (version 1, little-endian): magic b"FPNS", u32 version,
i64 Nx, i64 Nv, f64 L, f64 V, f64 sigma, then f (Nx*Nx*Nv*Nv f64, row-major),
u (2*Nx*Nx f64), and a trailing f64 t.  Reload reproduces the stored arrays
bit for bit.

The records CSV has one row per DiagnosticsRecord in RECORD_COLUMNS order,
every value printed with %.17g, so identical runs produce byte-identical
files.  The manifest is written last via an atomic rename and carries the
resolved config, code version, grid sizes, wall clock, exit status, and the
byte length of every other output file.  Timestamps live only in the
manifest, keeping the data files deterministic.
"""

import dataclasses
import json
import os
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .diagnostics import RECORD_COLUMNS, decay_fit

SNAPSHOT_MAGIC = b"FPNS"
SNAPSHOT_VERSION = 1
FORMAT_VERSIONS = {"snapshot": 1, "records_csv": 1, "manifest": 1}
PLOT_NORMS = ("l1_f_mu", "l2rho_v_wbar", "l2_u_wbar", "H", "Ebar", "Y")


# ---- snapshot binary ---------------------------------------------------------


def write_snapshot(path, f, u, t, grids, sigma):
    xg, vg = grids.x, grids.v
    with open(path, "wb") as h:
        h.write(SNAPSHOT_MAGIC)
        h.write(np.uint32(SNAPSHOT_VERSION).tobytes())
        h.write(np.int64(xg.Nx).tobytes())
        h.write(np.int64(vg.Nv).tobytes())
        h.write(np.float64(xg.L).tobytes())
        h.write(np.float64(vg.V).tobytes())
        h.write(np.float64(sigma).tobytes())
        h.write(np.ascontiguousarray(f, dtype=np.float64).tobytes())
        h.write(np.ascontiguousarray(u, dtype=np.float64).tobytes())
        h.write(np.float64(t).tobytes())
    return path


def read_snapshot(path):
    """Parse a snapshot file; returns a dict of arrays and grid parameters."""
    raw = Path(path).read_bytes()
    if raw[:4] != SNAPSHOT_MAGIC:
        raise ValueError(f"{path}: not a snapshot file (bad magic)")
    version = int(np.frombuffer(raw, np.uint32, count=1, offset=4)[0])
    if version != SNAPSHOT_VERSION:
        raise ValueError(f"{path}: unsupported snapshot version {version}")
    Nx = int(np.frombuffer(raw, np.int64, count=1, offset=8)[0])
    Nv = int(np.frombuffer(raw, np.int64, count=1, offset=16)[0])
    L, V, sigma = np.frombuffer(raw, np.float64, count=3, offset=24)
    off = 48
    nf = Nx * Nx * Nv * Nv
    expected = off + 8 * (nf + 2 * Nx * Nx + 1)
    if len(raw) != expected:
        raise ValueError(f"{path}: truncated snapshot ({len(raw)} of {expected} bytes)")
    f = np.frombuffer(raw, np.float64, count=nf, offset=off).reshape(Nx, Nx, Nv, Nv)
    off += 8 * nf
    u = np.frombuffer(raw, np.float64, count=2 * Nx * Nx, offset=off).reshape(2, Nx, Nx)
    off += 8 * 2 * Nx * Nx
    t = float(np.frombuffer(raw, np.float64, count=1, offset=off)[0])
    return {
        "f": f.copy(),
        "u": u.copy(),
        "t": t,
        "Nx": Nx,
        "Nv": Nv,
        "L": float(L),
        "V": float(V),
        "sigma": float(sigma),
        "version": version,
    }


# ---- tabular outputs ----------------------------------------------------------


def _fmt(x):
    return "%.17g" % float(x)


def write_records(path, records):
    with open(path, "w") as h:
        h.write(",".join(RECORD_COLUMNS) + "\n")
        for rec in records:
            h.write(",".join(_fmt(rec[c]) for c in RECORD_COLUMNS) + "\n")
    return path


def write_macro_csv(path, macro, xgrid):
    """Macroscopic fields as CSV, one row per grid cell, with a header row."""
    with open(path, "w") as h:
        h.write("x1,x2,rho,m1,m2,v1,v2\n")
        for i in range(xgrid.Nx):
            for j in range(xgrid.Nx):
                h.write(
                    ",".join(
                        _fmt(v)
                        for v in (
                            xgrid.x[i],
                            xgrid.x[j],
                            macro.rho[i, j],
                            macro.m[0, i, j],
                            macro.m[1, i, j],
                            macro.v_macro[0, i, j],
                            macro.v_macro[1, i, j],
                        )
                    )
                    + "\n"
                )
    return path


def _fit_or_none(records, column, window):
    t = np.array([r["t"] for r in records])
    y = np.array([r[column] for r in records])
    try:
        rate, r2 = decay_fit(t, y, window=window)
    except (ValueError, TypeError):
        return None
    return {"rate": rate, "r2": r2, "window": list(window)}


def default_fit_window(records):
    if len(records) < 3:
        return None
    T = records[-1]["t"]
    if T <= 0.0:
        return None
    return (T / 3.0, T)


def emit_plot_data(records, out_dir, window=None):
    """Per-norm (t, value, log value) files with a fitted-rate comment line."""
    out_dir = Path(out_dir)
    written = []
    for norm in PLOT_NORMS:
        path = out_dir / f"plot_{norm}.csv"
        fit = _fit_or_none(records, norm, window) if records and window else None
        with open(path, "w") as h:
            if fit is not None:
                h.write(
                    "# rate=%s r2=%s window=%s,%s\n"
                    % (_fmt(fit["rate"]), _fmt(fit["r2"]), _fmt(window[0]), _fmt(window[1]))
                )
            h.write("t,value,log_value\n")
            for rec in records:
                val = float(rec[norm])
                lv = np.log(val) if val > 0.0 else float("nan")
                h.write(f"{_fmt(rec['t'])},{_fmt(val)},{_fmt(lv)}\n")
        written.append(path)
    return written


def write_summary(path, records, wbar, window):
    rates = {norm: _fit_or_none(records, norm, window) if window else None for norm in PLOT_NORMS}
    final = records[-1] if records else {}
    doc = {
        "wbar": [float(w) for w in wbar],
        "n_records": len(records),
        "t_final": float(final.get("t", 0.0)) if records else None,
        "fit_window": list(window) if window else None,
        "rates": rates,
        "final": {k: float(final[k]) for k in RECORD_COLUMNS} if records else None,
    }
    with open(path, "w") as h:
        json.dump(doc, h, indent=1, sort_keys=True)
        h.write("\n")
    return path


def write_manifest(path, config, grids, status, files, started, wall_clock_s, wbar):
    doc = {
        "format_versions": FORMAT_VERSIONS,
        "code_version": __version__,
        "status": status,
        "config": dataclasses.asdict(config),
        "grid": {
            "Nx": grids.x.Nx,
            "Nv": grids.v.Nv,
            "L": grids.x.L,
            "V": grids.v.V,
            "hx": grids.x.hx,
            "hv": grids.v.hv,
        },
        "wbar": [float(w) for w in wbar],
        "started_utc": started,
        "ended_utc": datetime.now(timezone.utc).isoformat(),
        "wall_clock_s": wall_clock_s,
        "files": files,
    }
    tmp = str(path) + ".tmp"
    with open(tmp, "w") as h:
        json.dump(doc, h, indent=1, sort_keys=True)
        h.write("\n")
    os.replace(tmp, path)
    return path


# ---- run writer -----------------------------------------------------------------


class RunWriter:
    """Collects the output files of one run directory."""

    def __init__(self, out_dir, config):
        self.dir = Path(out_dir)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.config = config
        self.t0 = time.monotonic()
        self.started = datetime.now(timezone.utc).isoformat()
        self.grids = None
        self.snaps = []

    def snapshot(self, state, grids, config):
        self.grids = grids
        name = f"snapshot_t{state.t:012.6f}.bin"
        write_snapshot(self.dir / name, state.f, state.u, state.t, grids, config.sigma)
        if name not in self.snaps:
            self.snaps.append(name)
        return self.dir / name

    def finish(self, records, wbar, status):
        from .coupling import build_grids

        if self.grids is None:
            self.grids = build_grids(self.config)
        window = self.config.fit_window or default_fit_window(records)
        paths = [write_records(self.dir / "records.csv", records)]
        paths.append(write_summary(self.dir / "summary.json", records, wbar, window))
        paths.extend(emit_plot_data(records, self.dir, window=window))
        paths.extend(self.dir / s for s in self.snaps)
        listing = [
            {"name": p.name, "bytes": p.stat().st_size}
            for p in sorted(paths, key=lambda q: q.name)
        ]
        manifest = write_manifest(
            self.dir / "manifest.json",
            self.config,
            self.grids,
            status,
            listing,
            self.started,
            time.monotonic() - self.t0,
            wbar,
        )
        return [str(p) for p in paths] + [str(manifest)]
