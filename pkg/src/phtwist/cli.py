"""Command-line interface: ``phtwist <command> [options]``.

Exit codes: 0 when every check passes, 2 when a verification fails,
1 on configuration or runtime errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import platform
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, reports, svg
from .certificate import UnreachableThresholdError
from .config import CONFIG_ENV, Config, ConfigError

log = logging.getLogger("phtwist")

EXIT_OK, EXIT_ERROR, EXIT_FAIL = 0, 1, 2
COMMANDS = ("foliations", "certificate", "sweep", "center", "homology", "da-verify", "all")


class Run:
    """Collects emitted files for the manifest."""

    def __init__(self, cfg: Config, argv: list[str]):
        self.cfg = cfg
        self.argv = argv
        self.out = Path(cfg.out_dir)
        self.files: list[str] = []
        self.results: dict[str, bool] = {}
        self.started = time.perf_counter()

    def write(self, name: str, text: str):
        path = self.out / name
        try:
            self.out.mkdir(parents=True, exist_ok=True)
            path.write_text(text, encoding="utf-8")
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
        if name not in self.files:
            self.files.append(name)
        log.info("wrote %s", path)

    def write_json(self, name: str, data: dict):
        self.write(name, json.dumps(data, indent=2, sort_keys=True) + "\n")

    def write_csv(self, name: str, header, rows):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        self.write(name, buf.getvalue())

    def manifest(self, command: str):
        data = {
            "schemaVersion": reports.SCHEMA_VERSION,
            "command": command,
            "argv": self.argv,
            "configHash": self.cfg.digest(),
            "config": self.cfg.to_dict(),
            "versions": {"phtwist": __version__, "numpy": np.__version__,
                         "python": platform.python_version()},
            "wallTimeSeconds": round(time.perf_counter() - self.started, 3),
            "results": self.results,
            "files": sorted(self.files + ["manifest.json"]),
            "csvSchemaVersion": reports.SCHEMA_VERSION,
        }
        # wall time is the only non-deterministic field; keep it in the manifest only
        self.write_json("manifest.json", data)


def _fmt(v: float) -> str:
    return repr(float(v))


def cmd_foliations(run: Run) -> bool:
    run.write("foliations.svg", svg.foliations_svg(run.cfg.foliations()))
    run.results["foliations"] = True
    return True


def cmd_certificate(run: Run) -> bool:
    rep = reports.certificate_report(run.cfg)
    run.write_json("certificate.json", rep)
    log.info("N0 = %.6g, margins at N0 and 2 N0: %s", rep["n0"],
             [round(min(r["margin_cs_uu"], r["margin_cu_ss"]), 6) for r in rep["reports"]])
    run.results["certificate"] = rep["passed"]
    return rep["passed"]


def cmd_sweep(run: Run) -> bool:
    reps = reports.sweep_rows(run.cfg)
    run.write_csv("sweep.csv", ["N", "marginCsUu", "marginCuSs", "pass"],
                  [[_fmt(r.n), _fmt(r.margin_cs_uu), _fmt(r.margin_cu_ss),
                    "true" if r.passed else "false"] for r in reps])
    ok = all(b.margin >= a.margin - 1e-12 for a, b in zip(reps, reps[1:]))
    run.results["sweep"] = ok
    return ok


def cmd_center(run: Run) -> bool:
    field, summary = reports.center_report(run.cfg)
    run.write_csv("displacement.csv", ["x0", "y0", "Dx", "Dy", "distToLattice", "status"],
                  [[_fmt(a), _fmt(b), _fmt(c), _fmt(d), _fmt(e), s]
                   for a, b, c, d, e, s in field.rows()])
    run.write("displacement.svg", svg.heatmap_svg(field.dist_to_lattice, "distance to lattice"))
    run.write_json("center.json", summary)
    run.results["center"] = summary["passed"]
    return summary["passed"]


def cmd_homology(run: Run, k: int = 1) -> bool:
    rep = reports.homology_report(k)
    run.write_json("homology.json", rep)
    run.results["homology"] = rep["passed"]
    return rep["passed"]


def cmd_da_verify(run: Run) -> bool:
    rep = reports.da_verify(run.cfg)
    run.write_json("da_verify.json", rep)
    run.results["da-verify"] = rep["passed"]
    return rep["passed"]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="phtwist", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help=f"JSON config file (default: ${CONFIG_ENV} if set)")
    p.add_argument("--n-grid", type=int, dest="n_grid", help="x resolution of the certificate grid")
    p.add_argument("--c-max", type=float, dest="c_max", help="bound on the strong-line tilt")
    p.add_argument("--threshold", type=float, help="required transversality margin")
    p.add_argument("--seed", type=int, help="random seed")
    p.add_argument("--out-dir", dest="out_dir", help="output directory")
    p.add_argument("--sweep-n", type=float, nargs="*", dest="sweep_n", help="N values for sweep")
    p.add_argument("--k", type=int, default=1, help="iterate for the homology report")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def load_config(args) -> Config:
    cfg = Config.load(args.config)
    overrides = {k: getattr(args, k) for k in ("n_grid", "c_max", "threshold", "seed", "out_dir",
                                               "sweep_n")
                 if getattr(args, k) is not None}
    if overrides:
        cfg = Config.from_dict({**cfg.to_dict(), **overrides})
    return cfg


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args)
        run = Run(cfg, argv)
        steps = {
            "foliations": [cmd_foliations],
            "certificate": [cmd_certificate],
            "sweep": [cmd_sweep],
            "center": [cmd_center],
            "homology": [lambda r: cmd_homology(r, args.k)],
            "da-verify": [cmd_da_verify],
        }
        todo = (sum((steps[c] for c in COMMANDS[:-1]), []) if args.command == "all"
                else steps[args.command])
        ok = True
        for step in todo:
            ok = step(run) and ok
        run.manifest(args.command)
    except ConfigError as exc:
        print(f"phtwist: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except UnreachableThresholdError as exc:
        print(f"phtwist: certificate: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (OSError, ValueError, ArithmeticError, RuntimeError) as exc:
        print(f"phtwist: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if not ok:
        failed = [k for k, v in run.results.items() if not v]
        print(f"phtwist: verification failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
