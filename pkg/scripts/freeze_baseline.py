"""Regenerate src/decayfact/baseline.json.

Runs the two inheritance configs under both kernel backends (numba and the
numpy fallback, via a subprocess with DECAYFACT_BACKEND set) and freezes the
per-role medians next to their acceptance thresholds.  Rerun after any change
that affects generator bit-streams or factorization arithmetic.
"""

import json
import os
import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
OUT = ROOT / "src" / "decayfact" / "baseline.json"

JAFFARD = {
    "matrix_class": "jaffard",
    "class_params": {"s": 2.0, "c": 1.0},
    "make_spd": True,
    "delta": 1.0,
    "sizes": [128],
    "seeds": list(range(20)),
    "factorizations": ["lu", "cholesky", "qr"],
    "weight": {"kind": "standard", "a": 0.0, "b": 0.0, "s": 2.0},
    "norms": ["jaffard", "schur"],
    "fit": "polynomial",
    "probe_margin": None,
    "tolerances": {},
}

EXPDECAY = {
    "matrix_class": "expdecay",
    "class_params": {"gamma": 0.5, "c": 1.0},
    "make_spd": True,
    "delta": 1.0,
    "sizes": [128],
    "seeds": list(range(20)),
    "factorizations": ["lu", "cholesky", "qr"],
    "weight": {"kind": "standard", "a": 0.0, "b": 0.0, "s": 0.0},
    "norms": ["schur"],
    "fit": "exponential",
    "probe_margin": None,
    "tolerances": {},
}

ROLES = ["L", "U", "L_inv", "U_inv", "C", "C_inv", "Q", "R", "R_inv"]

WORKER = """
import json, sys
from decayfact.harness import ExperimentConfig, run_inheritance
from decayfact._kernels import active_backend
cfg = ExperimentConfig.from_dict(json.loads(sys.argv[1]))
rep = run_inheritance(cfg, jobs=4)
assert rep["summary"]["failed_trials"] == 0, "baseline run had failed trials"
print(json.dumps({"backend": active_backend(),
                  "config_hash": rep["config_hash"],
                  "medians": rep["summary"]["medians"]}))
"""


def medians_under(backend, cfg_dict):
    env = dict(os.environ, DECAYFACT_BACKEND=backend)
    out = subprocess.run(
        [sys.executable, "-c", WORKER, json.dumps(cfg_dict)],
        capture_output=True, text=True, env=env, cwd=ROOT, check=True)
    payload = json.loads(out.stdout.strip().splitlines()[-1])
    assert payload["backend"] == backend, payload["backend"]
    return payload


def main():
    entries = []
    for name, cfg, thresholds in (
        ("jaffard-s2-n128", JAFFARD,
         {"size": 128, "roles": ROLES, "min_median_exponent": 1.5}),
        ("expdecay-g05-n128", EXPDECAY,
         {"size": 128, "roles": ROLES, "max_median_rate": 0.8}),
    ):
        medians = {}
        chash = None
        for backend in ("numba", "numpy"):
            payload = medians_under(backend, cfg)
            medians[backend] = payload["medians"]
            chash = payload["config_hash"]
            print(f"{name} [{backend}]: "
                  f"{json.dumps(payload['medians'], sort_keys=True)[:120]}...")
        entries.append({
            "name": name,
            "config": cfg,
            "config_hash": chash,
            "thresholds": thresholds,
            "medians": medians,
        })
    OUT.write_text(json.dumps({"version": 1, "entries": entries},
                              indent=2, sort_keys=True) + "\n")
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
