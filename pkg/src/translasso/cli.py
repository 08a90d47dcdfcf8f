"""Command-line front end: fit, simulate and evaluate on CSV study bundles."""
from __future__ import annotations

import argparse
import csv
import itertools
import json
import logging
import os
import sys
from dataclasses import fields, replace
from pathlib import Path

import numpy as np

from .core import StandardizationRecord, Study, TaskData, standardize
from .lasso import fold_ids
from .oracle import OracleConfig, oracle_trans_lasso, oracle_trans_lasso_l0, resolve_lambdas
from .pipeline import TransLassoConfig, trans_lasso
from .simharness import SimScenario, run_replications, write_tables_csv

log = logging.getLogger("translasso")

FIT_METHODS = ("lasso", "naive", "oracle", "trans_lasso", "oracle_l0")


class ValidationError(ValueError):
    """Bad user input; the CLI exits with status 2."""


# ---------------------------------------------------------------- ingestion

def read_study_csv(path, study_id: str, kind: str) -> tuple[Study, list[str]]:
    path = Path(path)
    try:
        f = open(path, newline="", encoding="utf-8")
    except OSError as e:
        raise ValidationError(f"{path}: cannot open ({e.strerror})") from None
    with f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None:
            raise ValidationError(f"{path}: empty file")
        header = [h.strip() for h in header]
        if "y" not in header:
            raise ValidationError(f"{path}:1: no 'y' column in header")
        yi = header.index("y")
        cols = [h for i, h in enumerate(header) if i != yi]
        if not cols:
            raise ValidationError(f"{path}:1: no covariate columns")
        X, y = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ValidationError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
            try:
                vals = [float(v) for v in row]
            except ValueError:
                bad = next(v for v in row if not _is_float(v))
                raise ValidationError(f"{path}:{lineno}: non-numeric cell {bad!r}") from None
            if not all(np.isfinite(vals)):
                raise ValidationError(f"{path}:{lineno}: non-finite cell")
            y.append(vals[yi])
            X.append(vals[:yi] + vals[yi + 1:])
    if not y:
        raise ValidationError(f"{path}: no data rows")
    return Study(study_id, np.array(X), np.array(y), kind), cols


def _is_float(v) -> bool:
    try:
        float(v)
        return True
    except ValueError:
        return False


def write_study_csv(study: Study, path, columns=None) -> None:
    columns = columns or [f"x{j + 1}" for j in range(study.p)]
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow([*columns, "y"])
        for xi, yi in zip(study.X, study.y):
            w.writerow([repr(float(v)) for v in xi] + [repr(float(yi))])


def write_bundle(task: TaskData, directory) -> Path:
    """Write a task as CSV files plus a manifest; returns the manifest path."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    records = []
    for s, role in [(task.primary, "primary")] + [(a, "auxiliary") for a in task.auxiliaries]:
        name = f"{s.id}.csv"
        write_study_csv(s, d / name)
        records.append({"role": role, "id": s.id, "path": name})
    manifest = d / "manifest.json"
    manifest.write_text(json.dumps({"studies": records}, indent=2) + "\n")
    return manifest


def load_studies(manifest_path, center: bool = False, scale: bool = False,
                 scale_y: bool = False) -> tuple[TaskData, StandardizationRecord | None, list[str]]:
    """Read a JSON manifest of ``{role, id, path}`` records into a task.

    Paths are resolved relative to the manifest. Standardization is applied
    when any of the flags is set.
    """
    manifest_path = Path(manifest_path)
    try:
        spec = json.loads(manifest_path.read_text(encoding="utf-8"))
    except OSError as e:
        raise ValidationError(f"{manifest_path}: cannot read manifest ({e.strerror})") from None
    except json.JSONDecodeError as e:
        raise ValidationError(f"{manifest_path}:{e.lineno}: invalid JSON ({e.msg})") from None
    records = spec["studies"] if isinstance(spec, dict) else spec
    if not isinstance(records, list):
        raise ValidationError(f"{manifest_path}: expected a list of study records")
    primary, aux, columns = None, [], None
    for i, rec in enumerate(records):
        try:
            role, sid, rel = rec["role"], str(rec["id"]), rec["path"]
        except (KeyError, TypeError):
            raise ValidationError(f"{manifest_path}: record {i} needs role, id and path") from None
        if role not in ("primary", "auxiliary"):
            raise ValidationError(f"{manifest_path}: record {i} has unknown role {role!r}")
        study, cols = read_study_csv(manifest_path.parent / rel, sid, role)
        if columns is None:
            columns = cols
        elif cols != columns:
            j = next((j for j, (a, b) in enumerate(zip(cols, columns)) if a != b), min(len(cols), len(columns)))
            got = cols[j] if j < len(cols) else "<missing>"
            want = columns[j] if j < len(columns) else "<missing>"
            raise ValidationError(f"{rel}:1: column {j + 1} is {got!r}, expected {want!r}")
        if role == "primary":
            if primary is not None:
                raise ValidationError(f"{manifest_path}: more than one primary study")
            primary = study
        else:
            aux.append(study)
    if primary is None:
        raise ValidationError(f"{manifest_path}: no primary study")
    ids = [primary.id] + [a.id for a in aux]
    if len(set(ids)) != len(ids):
        raise ValidationError(f"{manifest_path}: duplicate study ids")
    task = TaskData(primary, tuple(aux))
    record = None
    if center or scale or scale_y:
        try:
            task, record = standardize(task, center=center, scale=scale, scale_y=scale_y)
        except ValueError as e:
            raise ValidationError(str(e)) from None
    return task, record, columns


# ---------------------------------------------------------------- estimation

def oracle_config(tuning: str, seed: int, folds: int = 8) -> OracleConfig:
    if tuning == "cv":
        return OracleConfig(lambda_w="cv", lambda_delta="cv_scaled", cv_folds=folds, seed=seed)
    return OracleConfig(seed=seed)


def fit_method(task: TaskData, method: str, informative=None, tuning: str = "auto",
               seed: int = 0, t_star_exponent: float = 0.75, lambda_theta="auto") -> tuple[np.ndarray, dict]:
    """Fit one estimator; returns the coefficients and a JSON-ready diagnostics dict."""
    ocfg = oracle_config(tuning, seed)
    info: dict = {"method": method, "tuning": tuning}
    if method in ("oracle", "oracle_l0") and informative is None:
        raise ValidationError(f"method {method!r} needs an explicit informative set")
    if method == "lasso":
        A = ()
    elif method == "naive":
        A = tuple(range(1, task.K + 1))
    elif method in ("oracle", "oracle_l0"):
        try:
            A = task.check_informative(informative)
        except IndexError as e:
            raise ValidationError(str(e)) from None
    elif method == "trans_lasso":
        cfg = TransLassoConfig(seed=seed, t_star_exponent=t_star_exponent, oracle=ocfg,
                               lambda_theta=lambda_theta)
        res = trans_lasso(task, cfg)
        info["halves"] = [{
            "dictionary_rows": h.dictionary_rows.size,
            "lambda_theta": h.lambda_theta,
            "t_star": [r.t_star for r in h.reports],
            "sparsity_index": [r.index.tolist() for r in h.reports],
            "candidate_sets": [list(G) for G in h.candidate_sets],
            "theta": h.aggregation.theta.tolist(),
            "holdout_errors": h.aggregation.holdout_errors.tolist(),
        } for h in res.halves]
        return res.beta.coef, info
    else:
        raise ValidationError(f"unknown method {method!r}")
    info["informative"] = list(A)
    if method == "oracle_l0":
        if not A:
            raise ValidationError("oracle_l0 needs a non-empty informative set")
        res0 = oracle_trans_lasso_l0(task, A, replace(ocfg, contrast_mode="l0", lambda_w="auto",
                                                       lambda_delta="auto"))
        info["lambda_contrasts"] = [d.lam for d in res0.deltas]
        info["lambda_beta"] = res0.beta.lam
        return res0.beta.coef, info
    lam_w, lam_d = resolve_lambdas(task, A, ocfg)
    res = oracle_trans_lasso(task, A, replace(ocfg, lambda_w=lam_w, lambda_delta=lam_d))
    info["lambda_w"] = lam_w
    info["lambda_delta"] = lam_d if A else None
    return res.beta.coef, info


def evaluate_prediction(task: TaskData, methods=("lasso", "naive", "trans_lasso"), folds: int = 5,
                        seed: int = 0, tuning: str = "auto", informative=None,
                        t_star_exponent: float = 0.75, lambda_theta="auto") -> dict:
    """K-fold held-out prediction error on the primary study.

    Auxiliary studies are always fully available to training. Errors are mean
    squared residuals per fold; ``ratio_to_lasso`` divides each method's mean
    by the plain Lasso's.
    """
    if folds < 2:
        raise ValidationError("need at least 2 folds")
    if task.n0 < folds:
        raise ValidationError(f"primary study has {task.n0} rows, fewer than {folds} folds")
    methods = list(dict.fromkeys(["lasso", *methods]))
    ids = fold_ids(task.n0, folds, np.random.default_rng(seed))
    errors = {m: [] for m in methods}
    for f in range(folds):
        test = ids == f
        train = task.with_primary(task.primary.rows(~test))
        Xt, yt = task.primary.X[test], task.primary.y[test]
        for m in methods:
            coef, _ = fit_method(train, m, informative, tuning, seed + f, t_star_exponent, lambda_theta)
            r = yt - Xt @ coef
            errors[m].append(float(r @ r) / r.size)
    base = float(np.mean(errors["lasso"]))
    report = {"folds": folds, "seed": seed, "tuning": tuning, "methods": {}}
    for m in methods:
        mean = float(np.mean(errors[m]))
        report["methods"][m] = {
            "fold_errors": errors[m],
            "mean_error": mean,
            "ratio_to_lasso": 1.0 if m == "lasso" else (mean / base if base > 0 else float("nan")),
        }
    return report


# ---------------------------------------------------------------- scenarios

def expand_scenarios(spec: dict) -> list[SimScenario]:
    """A scenario object whose list-valued fields expand to their product."""
    names = {f.name for f in fields(SimScenario)}
    unknown = set(spec) - names
    if unknown:
        raise ValidationError(f"unknown scenario fields: {sorted(unknown)}")
    keys = sorted(spec)
    grids = [spec[k] if isinstance(spec[k], list) else [spec[k]] for k in keys]
    out = []
    for combo in itertools.product(*grids):
        try:
            out.append(SimScenario(**dict(zip(keys, combo))))
        except (TypeError, ValueError) as e:
            raise ValidationError(f"invalid scenario {dict(zip(keys, combo))}: {e}") from None
    return out


def load_scenario(arg: str | None) -> list[SimScenario]:
    if arg is None:
        return [SimScenario()]
    text = Path(arg).read_text() if os.path.exists(arg) else arg
    try:
        spec = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValidationError(f"scenario is neither a file nor valid JSON: {e.msg}") from None
    specs = spec if isinstance(spec, list) else [spec]
    return [sc for s in specs for sc in expand_scenarios(s)]


# ---------------------------------------------------------------- entry point

def _parse_informative(text):
    if text is None:
        return None
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(int(t) for t in text.split(","))
    except ValueError:
        raise ValidationError(f"bad informative set {text!r}; expected e.g. 1,2,5") from None


def _dump(obj, path: Path) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="translasso", description=__doc__)
    ap.add_argument("--mode", choices=("fit", "simulate", "evaluate"), required=True)
    ap.add_argument("--method", default=None,
                    help="estimator; comma-separated list for simulate/evaluate")
    ap.add_argument("--manifest", help="JSON manifest of study CSV files")
    ap.add_argument("--informative", help="1-based auxiliary indices for oracle methods, e.g. 1,3")
    ap.add_argument("--scenario", help="scenario JSON (file or inline); list values form a grid")
    ap.add_argument("--reps", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--folds", type=int, default=5)
    ap.add_argument("--tuning", choices=("auto", "cv"), default="auto")
    ap.add_argument("--standardize", choices=("none", "center", "full"), default="full",
                    help="full: center and scale X and y per study")
    ap.add_argument("--t-star-exponent", type=float, default=0.75)
    ap.add_argument("--lambda-theta", default="auto")
    ap.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    ap.add_argument("--out", required=True, help="output directory")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def _methods(arg, default):
    if arg is None:
        return list(default)
    ms = [m.strip() for m in arg.split(",") if m.strip()]
    for m in ms:
        if m not in FIT_METHODS:
            raise ValidationError(f"unknown method {m!r}")
    return ms


def run(args) -> None:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    lam_theta = args.lambda_theta if args.lambda_theta == "auto" else float(args.lambda_theta)
    informative = _parse_informative(args.informative)
    std = {"none": {}, "center": {"center": True},
           "full": {"center": True, "scale": True, "scale_y": True}}[args.standardize]

    if args.mode == "simulate":
        methods = _methods(args.method, ("lasso", "naive", "oracle", "trans_lasso"))
        tables = []
        for sc in load_scenario(args.scenario):
            sc = replace(sc, seed=sc.seed + args.seed)
            log.info("simulating %s", sc)
            tcfg = TransLassoConfig(t_star_exponent=args.t_star_exponent, lambda_theta=lam_theta)
            tables.append(run_replications(sc, methods, args.reps, n_jobs=args.threads, trans_cfg=tcfg))
        write_tables_csv(tables, out / "simulate.csv")
        _dump({"cells": [t.summary() for t in tables]}, out / "summary.json")
        return

    if not args.manifest:
        raise ValidationError(f"--mode {args.mode} needs --manifest")
    task, record, columns = load_studies(args.manifest, **std)

    if args.mode == "fit":
        method = args.method or "trans_lasso"
        if method not in FIT_METHODS:
            raise ValidationError(f"unknown method {method!r}")
        coef, info = fit_method(task, method, informative, args.tuning, args.seed,
                                args.t_star_exponent, lam_theta)
        if record is not None:
            intercept, raw = record.to_raw(coef, task.primary.id)
        else:
            intercept, raw = 0.0, coef
        info.update({
            "n_primary": task.n0, "K": task.K, "p": task.p,
            "auxiliary_ids": [a.id for a in task.auxiliaries],
            "standardize": args.standardize, "seed": args.seed,
            "nonzero": int(np.count_nonzero(coef)),
            "coef": dict(zip(columns, coef.tolist())),
            "coef_raw": dict(zip(columns, raw.tolist())),
            "intercept_raw": float(intercept),
        })
        _dump(info, out / "fit.json")
        with open(out / "coef.csv", "w", newline="") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(["column", "coef", "coef_raw"])
            for c, b, r in zip(columns, coef, raw):
                w.writerow([c, repr(float(b)), repr(float(r))])
        return

    methods = _methods(args.method, ("lasso", "naive", "trans_lasso"))
    report = evaluate_prediction(task, methods, args.folds, args.seed, args.tuning, informative,
                                 args.t_star_exponent, lam_theta)
    report["standardize"] = args.standardize
    _dump(report, out / "evaluate.json")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        run(args)
    except ValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # noqa: BLE001
        log.exception("internal error")
        print(f"internal error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
