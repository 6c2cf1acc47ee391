"""Experiment harness: decay-inheritance runs over factorizations and
matrix functions, series validation, spectral checks, and report emission.

Reports are plain nested dicts (JSON-ready): a ``config`` echo, its
``config_hash``, a single ``timestamp`` field, sorted ``records``, and a
``summary``.  Identical configs produce byte-identical JSON apart from the
timestamp.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from .errors import NumericalError
from .factorizations import (
    cholesky,
    lu_unpivoted,
    polar,
    qr,
    relative_residual,
    triangular_inverse,
    verify_corner_block_relation,
    verify_triangular_entry_bounds,
)
from .functions import Contour, FUNCTION_REGISTRY, expm, riesz_dunford, sqrtm_hpd
from .matrices import (
    SectionMatrix,
    SymbolSeries,
    generate_banded,
    generate_expdecay,
    generate_jaffard,
    identity,
    laurent_from_symbol,
    make_spd,
    opnorm_estimate,
)
from .norms import fit_exponential, fit_polynomial, norm_gbs, norm_jaffard, norm_schur, norm_weighted, profile
from .series import align_with_unit_diagonal, precondition_by_scaling, series_cholesky, series_lu_inverse
from .spectral import factor_vs_section_cholesky, paley_wiener_check, spectral_factor
from .weights import Weight, standard_weight, weight_from_dict, weight_to_dict

_KNOWN_CLASSES = ("jaffard", "expdecay", "banded", "laurent")
_KNOWN_FACTORIZATIONS = ("lu", "cholesky", "qr", "polar", "series_lu", "series_cholesky")
_KNOWN_NORMS = ("jaffard", "weighted", "schur", "gbs")
_SPD_ONLY = frozenset({"cholesky", "series_cholesky"})

_DEFAULT_EPS_GRID = [round(0.50 + 0.05 * i, 2) for i in range(10)]  # 0.50 .. 0.95

_BASELINE_PATH = Path(__file__).with_name("baseline.json")


@dataclass(frozen=True)
class ExperimentConfig:
    """Declarative description of one experiment run."""

    matrix_class: str = "jaffard"
    class_params: dict = field(default_factory=lambda: {"s": 2.0, "c": 1.0})
    make_spd: bool = False
    delta: float = 1.0
    sizes: tuple = (32,)
    seeds: tuple = (0,)
    factorizations: tuple = ("lu",)
    weight: Weight = field(default_factory=standard_weight)
    norms: tuple = ("jaffard", "schur")
    fit: str = "polynomial"
    probe_margin: int | None = None
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.matrix_class not in _KNOWN_CLASSES:
            raise ValueError(f"unknown matrix class {self.matrix_class!r}")
        for f in self.factorizations:
            if f not in _KNOWN_FACTORIZATIONS:
                raise ValueError(f"unknown factorization {f!r}")
            if f in _SPD_ONLY and not self.make_spd:
                raise ValueError(f"{f} requires make_spd")
        for nm in self.norms:
            if nm not in _KNOWN_NORMS:
                raise ValueError(f"unknown norm {nm!r}")
        if self.fit not in ("polynomial", "exponential"):
            raise ValueError("fit must be 'polynomial' or 'exponential'")
        object.__setattr__(self, "sizes", tuple(int(n) for n in self.sizes))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        object.__setattr__(self, "factorizations", tuple(self.factorizations))
        object.__setattr__(self, "norms", tuple(self.norms))

    def to_dict(self):
        return {
            "matrix_class": self.matrix_class,
            "class_params": dict(self.class_params),
            "make_spd": bool(self.make_spd),
            "delta": float(self.delta),
            "sizes": list(self.sizes),
            "seeds": list(self.seeds),
            "factorizations": list(self.factorizations),
            "weight": weight_to_dict(self.weight),
            "norms": list(self.norms),
            "fit": self.fit,
            "probe_margin": self.probe_margin,
            "tolerances": dict(self.tolerances),
        }

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        if "weight" in d and not isinstance(d["weight"], Weight):
            d["weight"] = weight_from_dict(d["weight"])
        known = {f.name for f in cls.__dataclass_fields__.values()}
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown config keys: {sorted(extra)}")
        return cls(**d)

    def config_hash(self):
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def load_config(path):
    with open(path) as fh:
        return ExperimentConfig.from_dict(json.load(fh))


# ---------------------------------------------------------------------------
# trial building blocks


def _generate_input(cfg, n, seed):
    p = cfg.class_params
    if cfg.matrix_class == "jaffard":
        a = generate_jaffard(n, s=p["s"], c=p.get("c", 1.0), seed=seed)
    elif cfg.matrix_class == "expdecay":
        a = generate_expdecay(n, gamma=p["gamma"], c=p.get("c", 1.0), seed=seed)
    elif cfg.matrix_class == "banded":
        a = generate_banded(n, bandwidth=p["bandwidth"], seed=seed)
    else:
        sym = SymbolSeries({int(k): complex(re, im) for k, re, im in zip(
            p["symbol"]["offsets"], p["symbol"]["re"],
            p["symbol"].get("im", [0.0] * len(p["symbol"]["offsets"])))})
        a = laurent_from_symbol(sym, n)
    if cfg.make_spd:
        a = make_spd(a, cfg.delta)
    return a


def _symbol_from_config(cfg):
    if cfg.matrix_class != "laurent":
        raise ValueError("spectral runs require the laurent matrix class")
    p = cfg.class_params["symbol"]
    ims = p.get("im", [0.0] * len(p["offsets"]))
    return SymbolSeries({int(k): complex(re, im)
                         for k, re, im in zip(p["offsets"], p["re"], ims)})


def _norms_of(cfg, a):
    out = {}
    for nm in cfg.norms:
        if nm == "jaffard":
            out[nm] = float(norm_jaffard(a, cfg.weight.s))
        elif nm == "weighted":
            out[nm] = float(norm_weighted(a, cfg.weight))
        elif nm == "schur":
            out[nm] = float(norm_schur(a, cfg.weight))
        else:
            out[nm] = float(norm_gbs(a, cfg.weight))
    return out


def _fit_of(cfg, a):
    """Fit record, or a degenerate marker when too few nonzero offsets."""
    prof = profile(a, cfg.probe_margin)
    fitter = fit_polynomial if cfg.fit == "polynomial" else fit_exponential
    try:
        return fitter(prof).to_record()
    except ValueError as exc:
        return {"model": cfg.fit, "degenerate": True, "reason": str(exc)}


def _factor_roles(method, a):
    """Factor ``a`` by one method; returns (roles dict, extras dict)."""
    if method == "lu":
        r = lu_unpivoted(a)
        roles = {"L": r.f1, "U": r.f2,
                 "L_inv": triangular_inverse(r.f1, "lower"),
                 "U_inv": triangular_inverse(r.f2, "upper")}
        extras = {"residual": r.residual}
        bounds = verify_triangular_entry_bounds(a)
        corner = verify_corner_block_relation(a)
        extras["bound_max_violation"] = bounds.max_violation
        extras["bound_max_mismatch"] = bounds.max_mismatch
        extras["corner_discrepancy"] = corner.max_discrepancy
    elif method == "cholesky":
        r = cholesky(a)
        roles = {"C": r.f1, "C_inv": triangular_inverse(r.f1, "lower")}
        extras = {"residual": r.residual}
    elif method == "qr":
        r = qr(a)
        roles = {"Q": r.f1, "R": r.f2, "R_inv": triangular_inverse(r.f2, "upper")}
        extras = {"residual": r.residual}
    elif method == "polar":
        r = polar(a)
        roles = {"U_polar": r.f1, "P": r.f2}
        extras = {"residual": r.residual}
    elif method == "series_lu":
        sr = series_lu_inverse(a)
        lmat, umat = align_with_unit_diagonal(sr)
        roles = {"L": lmat, "U": umat,
                 "L_inv": triangular_inverse(lmat, "lower"),
                 "U_inv": triangular_inverse(umat, "upper")}
        extras = {"residual": relative_residual(a, lmat, umat),
                  "terms_used": sr.terms_used,
                  "last_term_norm": sr.last_term_norm,
                  "contraction_norm": sr.contraction_norm}
    else:  # series_cholesky
        r = series_cholesky(a)
        roles = {"C": r.f1, "C_inv": triangular_inverse(r.f1, "lower")}
        extras = {"residual": r.residual}
    return roles, extras


def _inheritance_trial(cfg, chash, n, seed, method):
    rec = {"size": n, "seed": seed, "factor": method, "config_hash": chash}
    try:
        a = _generate_input(cfg, n, seed)
        rec["input_fit"] = _fit_of(cfg, a)
        rec["input_norms"] = _norms_of(cfg, a)
        roles, extras = _factor_roles(method, a)
        rec.update({k: (float(v) if isinstance(v, (float, np.floating)) else v)
                    for k, v in extras.items()})
        rec["factor_fits"] = {name: _fit_of(cfg, sec) for name, sec in roles.items()}
        rec["factor_norms"] = {name: _norms_of(cfg, sec) for name, sec in roles.items()}
        rec["ok"] = True
    except (NumericalError, ValueError) as exc:
        rec["ok"] = False
        rec["error_type"] = type(exc).__name__
        rec["error"] = str(exc)
    return rec


def _run_trials(trials, jobs):
    # single-threaded BLAS: multithreaded reductions split differently under
    # load, which would break exact reproduction of frozen medians
    with threadpool_limits(limits=1):
        if jobs and jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                return list(pool.map(lambda t: t(), trials))
        return [t() for t in trials]


def _sorted_records(records):
    return sorted(records, key=lambda r: (r.get("size", 0), r.get("seed", 0),
                                          r.get("factor", "")))


def _assemble(kind, cfg, records, summary):
    return {
        "kind": kind,
        "config": cfg.to_dict(),
        "config_hash": cfg.config_hash(),
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "records": _sorted_records(records),
        "summary": summary,
    }


# ---------------------------------------------------------------------------
# runs


def run_inheritance(cfg, jobs=1):
    """Generate / factor / measure over the (sizes x seeds x factorizations)
    grid; failures are recorded per trial, never abort the run."""
    chash = cfg.config_hash()
    trials = [
        (lambda n=n, s=s, m=m: _inheritance_trial(cfg, chash, n, s, m))
        for n in cfg.sizes for s in cfg.seeds for m in cfg.factorizations
    ]
    records = _run_trials(trials, jobs)
    return _assemble("inheritance", cfg, records, _inheritance_summary(cfg, records))


def _fit_param(fit_rec):
    if fit_rec is None or fit_rec.get("degenerate"):
        return None
    return fit_rec.get("s_hat", fit_rec.get("gamma_hat"))


def _inheritance_summary(cfg, records):
    """Medians of the fitted decay parameter per (size, role) across seeds."""
    buckets = {}
    for r in records:
        if not r.get("ok"):
            continue
        size = str(r["size"])
        v = _fit_param(r.get("input_fit"))
        if v is not None:
            buckets.setdefault(size, {}).setdefault("input", []).append(v)
        for role, fr in r.get("factor_fits", {}).items():
            v = _fit_param(fr)
            if v is not None:
                buckets.setdefault(size, {}).setdefault(role, []).append(v)
    medians = {
        size: {role: float(np.median(vals)) for role, vals in sorted(roles.items())}
        for size, roles in sorted(buckets.items())
    }
    n_fail = sum(1 for r in records if not r.get("ok"))
    return {"medians": medians, "fit_model": cfg.fit,
            "trials": len(records), "failed_trials": n_fail}


def run_series_validation(cfg, jobs=1):
    """Series factors against direct ones, plus the diagonal-conjugation
    eps scan that records the achieved distance to the identity."""
    chash = cfg.config_hash()
    eps_grid = [float(e) for e in cfg.tolerances.get("eps_grid", _DEFAULT_EPS_GRID)]

    def trial(n, seed):
        rec = {"size": n, "seed": seed, "factor": "series", "config_hash": chash}
        try:
            a = _generate_input(cfg, n, seed)
            direct = lu_unpivoted(a)
            gate = float(opnorm_estimate(a - identity(a.n)))
            rec["gate_norm"] = gate
            if gate < 1.0:
                sr = series_lu_inverse(a)
                lmat, umat = align_with_unit_diagonal(sr)
                rec["series_terms"] = sr.terms_used
                rec["series_tail"] = float(sr.last_term_norm)
                rec["lu_max_discrepancy"] = float(max(
                    np.abs(lmat.data - direct.f1.data).max(),
                    np.abs(umat.data - direct.f2.data).max()))
            scan = []
            for eps in eps_grid:
                ap = precondition_by_scaling(a, direct.f1, direct.f2, eps)
                scan.append({"eps": eps,
                             "gate_norm": float(opnorm_estimate(ap - identity(ap.n)))})
            rec["eps_scan"] = scan
            passing = [s["eps"] for s in scan if s["gate_norm"] < 1.0]
            rec["eps_best"] = min(scan, key=lambda s: s["gate_norm"])["eps"]
            rec["eps_passing"] = passing
            if cfg.make_spd:
                sc = series_cholesky(a)
                dc = cholesky(a)
                rec["cholesky_max_discrepancy"] = float(
                    np.abs(sc.f1.data - dc.f1.data).max())
                rec["series_cholesky_residual"] = float(sc.residual)
            rec["ok"] = True
        except (NumericalError, ValueError) as exc:
            rec["ok"] = False
            rec["error_type"] = type(exc).__name__
            rec["error"] = str(exc)
        return rec

    trials = [(lambda n=n, s=s: trial(n, s)) for n in cfg.sizes for s in cfg.seeds]
    records = _run_trials(trials, jobs)
    ok = [r for r in records if r.get("ok")]
    summary = {
        "trials": len(records),
        "failed_trials": len(records) - len(ok),
        "max_lu_discrepancy": max((r["lu_max_discrepancy"] for r in ok
                                   if "lu_max_discrepancy" in r), default=None),
        "max_cholesky_discrepancy": max((r["cholesky_max_discrepancy"] for r in ok
                                         if "cholesky_max_discrepancy" in r), default=None),
        "all_trials_have_passing_eps": all(r["eps_passing"] for r in ok) if ok else False,
    }
    return _assemble("series_validation", cfg, records, summary)


def run_spectral(cfg, jobs=1):
    """Paley-Wiener check, spectral factorization, and the section-Cholesky
    cross-check for the configured symbol at each requested size."""
    chash = cfg.config_hash()
    sym = _symbol_from_config(cfg)
    grid = int(cfg.tolerances.get("grid_size", 4096))
    records = []
    rec = {"size": 0, "seed": 0, "factor": "spectral", "config_hash": chash}
    try:
        pw = paley_wiener_check(sym, grid_size=grid)
        rec.update({"pw_passed": bool(pw.passed),
                    "pw_min_sample": float(pw.min_sample),
                    "pw_max_imag": float(pw.max_imag),
                    "log_integral": float(pw.log_integral)})
        sf = spectral_factor(sym, grid_size=grid)
        rec["reconstruction_error"] = float(sf.reconstruction_error)
        rec["sigma_l_coefficients"] = {
            str(k): [float(sf.sigma_l.coefficient(k).real),
                     float(sf.sigma_l.coefficient(k).imag)]
            for k in sf.sigma_l.support}
        rec["ok"] = True
    except (NumericalError, ValueError) as exc:
        rec["ok"] = False
        rec["error_type"] = type(exc).__name__
        rec["error"] = str(exc)
    records.append(rec)

    def trial(n):
        r = {"size": n, "seed": 0, "factor": "spectral_vs_cholesky",
             "config_hash": chash}
        try:
            comp = factor_vs_section_cholesky(sym, n, grid_size=grid)
            r["interior_rows"] = comp.interior_rows
            r["max_discrepancy"] = float(comp.max_discrepancy)
            r["ok"] = True
        except (NumericalError, ValueError) as exc:
            r["ok"] = False
            r["error_type"] = type(exc).__name__
            r["error"] = str(exc)
        return r

    records += _run_trials([(lambda n=n: trial(n)) for n in cfg.sizes], jobs)
    ok = [r for r in records if r.get("ok")]
    summary = {
        "trials": len(records),
        "failed_trials": len(records) - len(ok),
        "reconstruction_error": records[0].get("reconstruction_error"),
        "max_section_discrepancy": max((r["max_discrepancy"] for r in ok
                                        if "max_discrepancy" in r), default=None),
    }
    return _assemble("spectral", cfg, records, summary)


def run_funcalc(cfg, jobs=1):
    """Functional-calculus identities on generated (SPD when configured)
    sections: exp inverse identity, resolvent-integral identity and exp
    cross-check, square root squaring back."""
    chash = cfg.config_hash()
    nodes = int(cfg.tolerances.get("contour_points", 64))

    def trial(n, seed):
        rec = {"size": n, "seed": seed, "factor": "funcalc", "config_hash": chash}
        try:
            a = _generate_input(cfg, n, seed)
            scale = a.max_abs()
            e_pos = expm(a)
            e_neg = expm(SectionMatrix(a.n, -a.data))
            rec["expm_inverse_identity"] = float(
                np.abs(e_pos.data @ e_neg.data - np.eye(a.size)).max())
            # additive +1 margin: at 64 nodes the node count alone cannot
            # deliver tight tolerances unless the contour clears the spectrum
            # by a fixed distance, not a fixed factor
            center = complex(np.trace(a.data) / a.size)
            spread = opnorm_estimate(
                SectionMatrix(a.n, a.data - center * np.eye(a.size)))
            cont = Contour(center=center, radius=spread + 1.0, points=nodes)
            rid = riesz_dunford(a, FUNCTION_REGISTRY["identity"], cont)
            rec["riesz_identity_error"] = float(np.abs(rid.data - a.data).max() / scale)
            rexp = riesz_dunford(a, FUNCTION_REGISTRY["exp"], cont)
            rec["riesz_exp_vs_expm"] = float(
                np.abs(rexp.data - e_pos.data).max() / max(e_pos.max_abs(), 1.0))
            if cfg.make_spd:
                root = sqrtm_hpd(a)
                rec["sqrt_square_back"] = float(
                    np.abs(root.data @ root.data - a.data).max() / scale)
            rec["ok"] = True
        except (NumericalError, ValueError) as exc:
            rec["ok"] = False
            rec["error_type"] = type(exc).__name__
            rec["error"] = str(exc)
        return rec

    trials = [(lambda n=n, s=s: trial(n, s)) for n in cfg.sizes for s in cfg.seeds]
    records = _run_trials(trials, jobs)
    ok = [r for r in records if r.get("ok")]

    def worst(key):
        vals = [r[key] for r in ok if key in r]
        return max(vals) if vals else None

    summary = {
        "trials": len(records),
        "failed_trials": len(records) - len(ok),
        "max_expm_inverse_identity": worst("expm_inverse_identity"),
        "max_riesz_identity_error": worst("riesz_identity_error"),
        "max_riesz_exp_vs_expm": worst("riesz_exp_vs_expm"),
        "max_sqrt_square_back": worst("sqrt_square_back"),
    }
    return _assemble("funcalc", cfg, records, summary)


# ---------------------------------------------------------------------------
# emission


def _flatten(prefix, value, out):
    if isinstance(value, dict):
        for k, v in value.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, out)
    elif isinstance(value, list):
        for i, v in enumerate(value):
            _flatten(f"{prefix}[{i}]", v, out)
    else:
        out[prefix] = value


def report_to_csv_rows(report):
    """One row per (size, seed, factor, metric): scalar leaves of each record."""
    rows = []
    for rec in report.get("records", []):
        flat = {}
        for k, v in rec.items():
            if k in ("size", "seed", "factor", "config_hash"):
                continue
            _flatten(k, v, flat)
        for metric in sorted(flat):
            v = flat[metric]
            rows.append({
                "size": rec.get("size", ""),
                "seed": rec.get("seed", ""),
                "factor": rec.get("factor", ""),
                "metric": metric,
                "value": "" if v is None else v,
            })
    return rows


def emit(report, format, path):
    """Write a report as nested JSON or flattened CSV."""
    path = Path(path)
    if format == "json":
        path.write_text(json.dumps(report, sort_keys=True, indent=2) + "\n")
    elif format == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=["size", "seed", "factor",
                                                 "metric", "value"])
        writer.writeheader()
        writer.writerows(report_to_csv_rows(report))
        path.write_text(buf.getvalue())
    else:
        raise ValueError(f"unknown report format {format!r}")


def load_report(path):
    with open(path) as fh:
        return json.load(fh)


# ---------------------------------------------------------------------------
# versioned baseline


def load_baseline(path=None):
    with open(path or _BASELINE_PATH) as fh:
        return json.load(fh)


def check_against_baseline(report, baseline, backend):
    """Compare an inheritance report against the versioned baseline.

    Returns a list of violation strings: empty means the report's config has
    a matching baseline entry, every thresholded role passes, and the medians
    reproduce the frozen ones exactly for this backend.
    """
    entry = next((e for e in baseline.get("entries", [])
                  if e["config_hash"] == report["config_hash"]), None)
    if entry is None:
        return [f"no baseline entry for config hash {report['config_hash']}"]
    violations = []
    thresholds = entry["thresholds"]
    size_key = str(thresholds["size"])
    got = report["summary"]["medians"].get(size_key, {})
    for role in thresholds["roles"]:
        val = got.get(role)
        if val is None:
            violations.append(f"missing median for role {role} at size {size_key}")
        elif "min_median_exponent" in thresholds and val < thresholds["min_median_exponent"]:
            violations.append(
                f"median exponent for {role} = {val:.4f} < {thresholds['min_median_exponent']}")
        elif "max_median_rate" in thresholds and val > thresholds["max_median_rate"]:
            violations.append(
                f"median rate for {role} = {val:.4f} > {thresholds['max_median_rate']}")
    frozen = entry["medians"].get(backend)
    if frozen is None:
        violations.append(f"baseline has no medians for backend {backend!r}")
    else:
        for size_key, roles in frozen.items():
            for role, val in roles.items():
                now = report["summary"]["medians"].get(size_key, {}).get(role)
                if now != val:
                    violations.append(
                        f"median {role}@{size_key} = {now!r} differs from frozen {val!r}")
    return violations
