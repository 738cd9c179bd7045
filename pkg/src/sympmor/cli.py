"""Command-line experiment harness.

Subcommands:
    snapshots   integrate the training set, write the snapshot container
    basis       build one reduced basis, write it with its spectra
    evaluate    run the full generalization experiment, write CSV data
    all         snapshots followed by evaluate

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 I/O failure, 5 missing spectral gap.
"""

import argparse
import json
import sys
import time

from pathlib import Path

import numpy as np

from .basis import (
    BasisSizeError,
    METHODS,
    SpectralGapError,
    build_basis,
    pod_loss,
    psd_loss,
)
from .config import (
    ConfigError,
    build_design,
    build_family,
    dump_config,
    load_config,
)
from .integrate import IntegrationError, snapshot_collect
from .reduction import run_generalization_experiment
from .report import (
    PLOT_SCRIPT,
    write_figure_data,
    write_report_csv,
    write_summary,
)
from .spectral import (
    DecompositionError,
    svd_like_decompose,
    weighted_spectrum,
)
from .storage import write_basis, write_manifest, write_snapshots

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4
EXIT_GAP = 5


def _parser():
    p = argparse.ArgumentParser(
        prog="sympmor",
        description="Snapshot-based structure-preserving model reduction "
                    "experiments on a cantilever lattice",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", type=Path, default=None,
                        help="YAML config (defaults used when omitted)")
        sp.add_argument("--out", type=Path, default=None,
                        help="output directory (overrides config)")
        sp.add_argument("--seed", type=int, default=None,
                        help="test-parameter RNG seed (overrides config)")
        sp.add_argument("--jobs", type=int, default=None,
                        help="worker threads (overrides config)")

    common(sub.add_parser("snapshots", help="write the snapshot container"))

    b = sub.add_parser("basis", help="build one reduced basis")
    common(b)
    b.add_argument("--method", required=True, choices=sorted(METHODS),
                   help="basis generation method")
    b.add_argument("--size", required=True, type=int, metavar="2K",
                   help="number of basis columns (even)")

    common(sub.add_parser("evaluate", help="run the experiment sweep"))
    common(sub.add_parser("all", help="snapshots, then evaluate"))
    return p


def _load(args):
    cfg = load_config(args.config)
    if args.out is not None:
        cfg["output"] = str(args.out)
    if args.seed is not None:
        cfg["design"]["seed"] = int(args.seed)
    if args.jobs is not None:
        if args.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        cfg["jobs"] = int(args.jobs)
    return cfg


def _outdir(cfg):
    out = Path(cfg["output"])
    out.mkdir(parents=True, exist_ok=True)
    dump_config(cfg, out / "resolved_config.yaml")
    return out


def cmd_snapshots(cfg):
    out = _outdir(cfg)
    family = build_family(cfg)
    design = build_design(cfg)
    snapshots = snapshot_collect(design, family.assemble)
    container = out / "snapshots.snp"
    write_snapshots(container, snapshots)
    manifest = write_manifest(out / "snapshots.manifest.json",
                              container, snapshots)
    print(f"wrote {container} ({snapshots.dim} x {snapshots.ns}), "
          f"sha256 {manifest['sha256'][:12]}...")
    return EXIT_OK


def cmd_basis(cfg, method, size):
    out = _outdir(cfg)
    family = build_family(cfg)
    design = build_design(cfg)
    snapshots = snapshot_collect(design, family.assemble)

    if method == "psd_svd_like":
        factors = svd_like_decompose(snapshots.data)
        basis = build_basis(method, snapshots.data, size, factors=factors)
        spectrum = weighted_spectrum(factors)
        spectra_rows = [
            (i, factors.sigma_s[i] if i < factors.p else "",
             spectrum.weights[i])
            for i in range(factors.p + factors.q)
        ]
        header = "index,sigma_s,weight"
    else:
        basis = build_basis(method, snapshots.data, size)
        sigma = np.linalg.svd(snapshots.data, compute_uv=False)
        spectra_rows = [(i, s) for i, s in enumerate(sigma)]
        header = "index,sigma"

    stem = f"basis_{method}_{size}"
    write_basis(out / f"{stem}.rbs", basis)
    o_v, s_v = basis.measures()
    loss = psd_loss(basis, snapshots.data) if basis.is_symplectic \
        else pod_loss(basis, snapshots.data)
    with open(out / f"{stem}.csv", "w", newline="") as fh:
        fh.write(header + "\n")
        for row in spectra_rows:
            fh.write(",".join(
                "" if v == "" else
                (str(v) if isinstance(v, int) else f"{v:.16e}")
                for v in row) + "\n")
    with open(out / f"{stem}.info.json", "w") as fh:
        json.dump({
            "method": method, "two_k": int(size), "kind": basis.kind,
            "orthonormality_defect": o_v, "symplecticity_defect": s_v,
            "projection_loss": loss,
        }, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {out / (stem + '.rbs')} (kind {basis.kind}, "
          f"o_V={o_v:.3e}, s_V={s_v:.3e})")
    return EXIT_OK


def cmd_evaluate(cfg):
    out = _outdir(cfg)
    family = build_family(cfg)
    design = build_design(cfg)
    tic = time.perf_counter()
    report = run_generalization_experiment(
        family, design, cfg["methods"], jobs=cfg["jobs"],
        drift_tol=cfg["tolerances"]["drift"],
    )
    wall = time.perf_counter() - tic
    write_report_csv(out / "report.csv", report)
    write_figure_data(out, report)
    write_summary(out / "summary.json", report, cfg, wall)
    (out / "plot_report.py").write_text(PLOT_SCRIPT)
    failed = sum(r.status != "ok" for r in report.rows)
    print(f"evaluated {len(report.rows)} cells "
          f"({failed} failed) in {wall:.1f}s -> {out / 'report.csv'}")
    return EXIT_OK


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        cfg = _load(args)
        if args.command == "snapshots":
            return cmd_snapshots(cfg)
        if args.command == "basis":
            return cmd_basis(cfg, args.method, args.size)
        if args.command == "evaluate":
            return cmd_evaluate(cfg)
        if args.command == "all":
            code = cmd_snapshots(cfg)
            return code if code else cmd_evaluate(cfg)
        raise AssertionError(f"unhandled command {args.command}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SpectralGapError as exc:
        print(f"spectral gap failure: {exc}", file=sys.stderr)
        return EXIT_GAP
    except (DecompositionError, IntegrationError, BasisSizeError,
            np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"i/o failure: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
