"""CSV/JSON writers and the run manifest."""
from __future__ import annotations

import csv
import json
import time
from pathlib import Path

import numpy as np

from . import __version__

KICK_CONVENTION = "phi_0 is the state before any kick; each period is free flight then a kick"


def _f(x) -> str:
    return repr(float(x))


def write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def write_json(path: Path, data):
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def state_rows(wf):
    for rho, a in zip(wf.grid.rho, wf.amps):
        yield [_f(rho), _f(a.real), _f(a.imag), _f(abs(a)), _f(np.angle(a)), _f(abs(a) ** 2)]


STATE_HEADER = ["rho", "re", "im", "abs", "phase", "density"]
RECON_HEADER = ["rho", "re_rec", "im_rec", "abs_rec", "phase_rec", "abs_exact", "phase_exact",
                "valid_mask"]


def reconstruction_rows(grid, rec_amps, exact_amps, mask):
    for rho, r, e, m in zip(grid.rho, rec_amps, exact_amps, mask):
        yield [_f(rho), _f(r.real), _f(r.imag), _f(abs(r)), _f(np.angle(r)),
               _f(abs(e)), _f(np.angle(e)), int(bool(m))]


class Manifest:
    def __init__(self, out_dir: Path, command: str, config):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.data = {
            "command": command,
            "code_version": __version__,
            "config": config.to_dict(),
            "conventions": {
                "kicks": KICK_CONVENTION,
                "units": "hbar = k0 = m = T = 1; momenta in units of hbar*k0",
                "rng": "numpy PCG64 seeded by SeedSequence((master_seed, realization, method, setting))",
                "chosen_defaults": ["rho_max", "epsilon_peak", "tau_floor", "accuracy", "noise model"],
            },
            "seeds": [],
            "timings": {},
            "files": [],
        }
        self._t0 = time.perf_counter()

    def path(self, name: str) -> Path:
        if name not in self.data["files"]:
            self.data["files"].append(name)
        return self.out_dir / name

    def time(self, label: str, seconds: float):
        self.data["timings"][label] = round(seconds, 4)

    def write(self, status: str = "ok"):
        self.data["status"] = status
        self.data["timings"]["total"] = round(time.perf_counter() - self._t0, 4)
        path = self.path("manifest.json")
        write_json(path, self.data)
        return path
