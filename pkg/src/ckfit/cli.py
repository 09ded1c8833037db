"""Command-line front end.

Exit codes: 0 success, 2 usage or validation error, 3 numerical failure
(divergence, singular solve), 4 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import sys
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from . import datagen
from .basis import Basis
from .ckmin import ckmin
from .errors import CkfitError, NumericalError, UsageError
from .experiments import (ALL_OPTIMIZERS, SUMMARY_FIELDS, alpha_cells, optimizer_cells,
                          reference_losses, run, run_matrix)
from .loss import Boundary, LossConfig, Regularization
from .lsqfit import baselines
from .ppmodel import ExportPP, PiecewisePolynomial, affine_compose, to_export_form, uniform_knots
from .train import Init, TrainConfig

log = logging.getLogger("ckfit")

EXIT_USAGE, EXIT_NUMERIC, EXIT_IO = 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _float_list(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma separated list of numbers: {text!r}") from None


def _str_list(text):
    return [t.strip() for t in text.split(",") if t.strip()]


def _sha256(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _write_json(path, obj):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=False) + "\n", encoding="utf-8")


def _load_sidecar(csv_path):
    side = datagen.sidecar_path(csv_path)
    if side.exists():
        return json.loads(side.read_text(encoding="utf-8"))
    return None


def _segments(args, sidecar):
    if args.segments is not None:
        return args.segments
    if sidecar and "m" in sidecar:
        return int(sidecar["m"])
    raise UsageError("--segments is required when the input CSV has no JSON sidecar")


def _write_loss_curve(path, trace):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write("epoch,total,l2,lck\n")
        for e, tot, l2, lck in trace.rows():
            fh.write(f"{e},{tot!r},{l2!r},{lck!r}\n")


def _write_summary(path, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=SUMMARY_FIELDS, lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})


def _train_config(args) -> TrainConfig:
    loss = LossConfig(args.alpha, args.k, args.boundary, args.regularization)
    lr = args.lr if args.lr is not None else (1.0 if args.alpha == 0 else 0.1)
    if args.epochs < 1:
        raise UsageError("--epochs must be >= 1")
    return TrainConfig(args.optimizer, lr, args.epochs, min(args.patience, args.epochs),
                       args.init, loss, args.seed)


# -- commands -----------------------------------------------------------------

def cmd_gen_data(args):
    spec = datagen.preset(args.dataset, args.noise, args.seed)
    raw = datagen.sample(spec)
    m = args.segments or spec.m
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    datagen.write_csv(raw, out)
    _write_json(datagen.sidecar_path(out), {
        "dataset": spec.to_dict(), "m": m,
        "transform": raw.rescaled(m).transform.to_dict(),
    })
    print(f"wrote {raw.n} samples to {out}")


def cmd_baseline(args):
    raw = datagen.read_csv(args.input)
    m = _segments(args, _load_sidecar(args.input))
    data = raw.rescaled(m)
    rep = baselines(data, uniform_knots(m), args.degree, args.basis, args.k, args.boundary)
    print(f"l2_star       {rep.l2_star:.6e}")
    print(f"l2_star_tilde {rep.l2_star_tilde:.6e}")
    out_dir = Path(args.out_dir) if args.out_dir else Path(args.input).parent
    stem = Path(args.input).stem
    domain = [float(raw.xs[0]), float(raw.xs[-1])]
    _write_json(out_dir / f"{stem}.lsq.json", to_export_form(rep.fitted, data.transform).to_dict(domain))
    _write_json(out_dir / f"{stem}.lsq_ckmin.json",
                to_export_form(rep.corrected, data.transform).to_dict(domain))


def _fit_and_write(manifest_in, out_dir, export_path=None):
    """Execute a run described by a manifest-shaped dict and write all artifacts."""
    inp = manifest_in["input"]
    raw = datagen.read_csv(inp["path"])
    digest = _sha256(inp["path"])
    if inp.get("sha256") and inp["sha256"] != digest:
        raise UsageError(f"input {inp['path']} does not match the manifest checksum")
    cfg = TrainConfig(**{**manifest_in["train"], "loss": LossConfig(**manifest_in["train"]["loss"])})
    m, degree, basis = manifest_in["segments"], manifest_in["degree"], Basis.parse(manifest_in["basis"])
    res = run(raw, m, degree, basis, cfg, manifest_in["ckmin"])
    if res.status != "ok":
        raise NumericalError(f"training {res.status}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    curve = out_dir / "loss_curve.csv"
    profile = Path(export_path) if export_path else out_dir / "profile.json"
    _write_loss_curve(curve, res.trace)
    data = raw.rescaled(m)
    _write_json(profile, res.export(data).to_dict([float(raw.xs[0]), float(raw.xs[-1])]))
    ref = reference_losses(raw, m, degree, basis, cfg.loss) if degree >= 2 * cfg.loss.k + 1 else {}
    manifest = {
        "tool": "ckfit", "version": __version__,
        "input": {"path": str(Path(inp["path"]).resolve()), "sha256": digest},
        "dataset": manifest_in.get("dataset"),
        "segments": m, "degree": degree, "basis": basis.value, "ckmin": manifest_in["ckmin"],
        "train": cfg.to_dict(),
        "artifacts": {"loss_curve": str(curve), "profile": str(profile)},
        "wall_clock_s": res.wall_clock,
        "metrics": {**res.metrics, **ref},
    }
    _write_json(out_dir / "manifest.json", manifest)
    return res, manifest


def cmd_fit(args):
    sidecar = _load_sidecar(args.input)
    m = _segments(args, sidecar)
    cfg = _train_config(args)
    spec = {"input": {"path": args.input}, "dataset": sidecar, "segments": m,
            "degree": args.degree, "basis": Basis.parse(args.basis).value, "ckmin": args.ckmin,
            "train": cfg.to_dict()}
    res, manifest = _fit_and_write(spec, args.out_dir, args.export)
    mt = manifest["metrics"]
    print(f"best epoch {mt['best_epoch']}  total {mt['best_total']:.6e}  "
          f"l2 {mt['l2']:.6e}  lck {mt['lck']:.6e}")
    if args.ckmin:
        print(f"post-CKMIN l2 {mt['post_ckmin_l2']:.6e}")


def cmd_rerun(args):
    manifest = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
    _fit_and_write(manifest, args.out_dir)
    print(f"re-ran {args.manifest} into {args.out_dir}")


def _run_matrix_cmd(args, cells):
    raw = datagen.read_csv(args.input)
    m = _segments(args, _load_sidecar(args.input))
    results = run_matrix(raw, m, args.degree, cells, apply_ckmin=True, jobs=args.jobs)
    out_dir = Path(args.out_dir)
    rows = []
    for idx, (row, res) in enumerate(results):
        rows.append(row)
        if res.trace is not None:
            _write_loss_curve(out_dir / f"{idx:03d}_{row['basis']}_{row['label']}.csv", res.trace)
    _write_summary(out_dir / "summary.csv", rows)
    for row in rows:
        print(f"{row['basis']:6s} {row['label']:14s} {row['status']:14s} "
              f"l2+lck {row['final_l2_plus_lck']:.3e}  post-CKMIN l2 {row['post_ckmin_l2']:.3e}")
    return rows


def cmd_sweep(args):
    base = _train_config(args)
    return _run_matrix_cmd(args, list(alpha_cells(base, args.alphas, args.bases)))


def cmd_compare(args):
    names = list(ALL_OPTIMIZERS) if args.all or not args.optimizers else args.optimizers
    base = _train_config(args)
    return _run_matrix_cmd(args, list(optimizer_cells(base, names, args.bases)))


def cmd_enforce(args):
    """Apply CKMIN to an exported power-basis profile, in original units."""
    src = ExportPP.from_dict(json.loads(Path(args.profile).read_text(encoding="utf-8")))
    mu = 0.5 * (src.knots[:-1] + src.knots[1:])
    centered = np.array([affine_compose(row, 1.0, c) for row, c in zip(src.coeffs, mu)])
    pp = PiecewisePolynomial(src.knots, centered, Basis.POWER, check_uniform=False)
    fixed = ckmin(pp, args.k, args.boundary)
    absolute = np.array([affine_compose(row, 1.0, -c) for row, c in zip(fixed.coeffs, mu)])
    _write_json(args.out, ExportPP(src.knots, absolute).to_dict())
    print(f"wrote C^{args.k} profile to {args.out}")


# -- parser -------------------------------------------------------------------

def _add_model_args(p, need_k=True):
    p.add_argument("--in", dest="input", default=None, help="input CSV with header x,y (required)")
    p.add_argument("--segments", type=int, default=None, help="segment count (default: from sidecar)")
    p.add_argument("--degree", type=int, default=7)
    if need_k:
        p.add_argument("--k", type=int, default=3, help="continuity order")
    p.add_argument("--boundary", choices=[b.value for b in Boundary], default="open")


def _add_train_args(p):
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--optimizer", default="amsgrad", choices=list(ALL_OPTIMIZERS))
    p.add_argument("--lr", type=float, default=None, help="default 1.0 if alpha is 0, else 0.1")
    p.add_argument("--epochs", type=int, default=2000)
    p.add_argument("--patience", type=int, default=500, help="0 disables early stopping")
    p.add_argument("--init", choices=[i.value for i in Init], default="l2")
    p.add_argument("--regularization", choices=[r.value for r in Regularization], default="factorial")
    p.add_argument("--seed", type=int, default=0)


def build_parser():
    parser = _Parser(prog="ckfit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"ckfit {__version__}")
    parser.add_argument("--config", help="JSON or YAML file with flag defaults (flags win)")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen-data", help="generate a benchmark dataset")
    p.add_argument("--dataset", required=True, choices=sorted(datagen.PRESETS))
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--segments", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("baseline", help="least-squares optimum and its CKMIN-corrected loss")
    _add_model_args(p)
    p.add_argument("--basis", choices=["cheb", "power"], default="cheb")
    p.add_argument("--out-dir", default=None)
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("fit", help="train a single model")
    _add_model_args(p)
    _add_train_args(p)
    p.add_argument("--basis", choices=["cheb", "power"], default="cheb")
    p.add_argument("--ckmin", action="store_true", help="strictly enforce C^k after training")
    p.add_argument("--export", default=None, help="profile JSON path (default OUT_DIR/profile.json)")
    p.add_argument("--out-dir", default="run")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("rerun", help="repeat a run from its manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_rerun)

    p = sub.add_parser("sweep", help="one run per alpha and basis")
    _add_model_args(p)
    _add_train_args(p)
    p.add_argument("--alphas", type=_float_list, default=[round(0.1 * i, 1) for i in range(11)])
    p.add_argument("--bases", type=_str_list, default=["cheb", "power"])
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out-dir", default="sweep")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("compare-optimizers", help="one run per optimizer and basis")
    _add_model_args(p)
    _add_train_args(p)
    p.add_argument("--all", action="store_true", help="every optimizer (default)")
    p.add_argument("--optimizers", type=_str_list, default=None)
    p.add_argument("--bases", type=_str_list, default=["cheb", "power"])
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out-dir", default="compare")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("enforce", help="apply CKMIN to an exported profile")
    p.add_argument("--profile", required=True)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--boundary", choices=[b.value for b in Boundary], default="open")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_enforce)
    return parser, sub


def parse_args(argv):
    parser, sub = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        text = Path(args.config).read_text(encoding="utf-8")
        cfg = yaml.safe_load(text) or {}
        if not isinstance(cfg, dict):
            raise UsageError("config file must hold a mapping")
        cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
        if "in" in cfg:
            cfg["input"] = cfg.pop("in")
        sub.choices[args.command].set_defaults(**cfg)
        args = parser.parse_args(argv)
    if hasattr(args, "input") and args.input is None:
        raise UsageError("--in is required")
    return args


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = parse_args(argv)
        logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
        args.func(args)
    except UsageError as exc:
        print(f"ckfit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"ckfit: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"ckfit: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except CkfitError as exc:
        print(f"ckfit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return 0


if __name__ == "__main__":
    sys.exit(main())
