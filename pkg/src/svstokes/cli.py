"""Command line entry point: ``svstokes --experiment table1`` and friends."""
from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings

from . import harness

EXPERIMENTS = {
    "table1": dict(method="mixed-sv", bc="compatible"),
    "table2": dict(method="mixed-sv", bc="lagrange"),
    "table3": dict(method="ipm", bc="compatible", rho=1e2),
    "table4": dict(method="ipm", bc="compatible", rho=1e4),
}


def _floats(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t]


def _ints(text: str) -> list[int]:
    out = [int(t) for t in text.split(",") if t]
    if any(n < 1 for n in out):
        raise argparse.ArgumentTypeError("mesh sizes must be positive")
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="svstokes", description=__doc__)
    p.add_argument("--experiment", choices=["table1", "table2", "table3", "table4", "fig1", "fig2",
                                            "custom"], default="custom")
    p.add_argument("--method", choices=["mixed-sv", "taylor-hood", "ipm"])
    p.add_argument("--bc", choices=["lagrange", "compatible"])
    p.add_argument("--mesh-mod", choices=["none", "corner", "full"], default="full")
    p.add_argument("--n", type=_ints, help="comma separated mesh sizes, e.g. 4,8,16")
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--nu", type=float, default=1.0)
    p.add_argument("--rho", type=float)
    p.add_argument("--ra", type=_floats, help="comma separated load scalings")
    p.add_argument("--tol", type=float, default=1e-11)
    p.add_argument("--max-iter", type=int, default=100)
    p.add_argument("--pattern", choices=["diagonal", "crisscross"], default="diagonal")
    p.add_argument("--out", help="CSV output path (default stdout)")
    p.add_argument("--log", help="JSON path for IPM logs")
    p.add_argument("--seed", type=int, help="seed for randomized checks; recorded in the log")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _check(p: argparse.ArgumentParser, args) -> None:
    for name in ("nu", "rho", "tol"):
        v = getattr(args, name)
        if v is not None and not v > 0:
            p.error(f"--{name} must be positive")
    if args.k < 1:
        p.error("--k must be >= 1")
    if args.max_iter < 1:
        p.error("--max-iter must be >= 1")
    if args.method == "taylor-hood" and args.k < 2:
        p.error("taylor-hood needs --k >= 2")


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    p = build_parser()
    args = p.parse_args(argv)  # exits 2 on usage errors, 0 on --help
    _check(p, args)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")

    if args.experiment == "fig1":
        rows = harness.run_pressure_robustness(
            N=(args.n or [16])[0], ras=args.ra or (10.0, 1e2, 1e3, 1e4), k=args.k,
            mesh_mod=args.mesh_mod, pattern=args.pattern)
        _emit(harness.to_csv(rows), args.out)
        return 0

    if args.experiment == "fig2":
        study = harness.run_mesh_mod_study(
            N=(args.n or [16])[0], rho=args.rho or 1e2, tol=args.tol, max_iter=args.max_iter,
            k=args.k, pattern=args.pattern)
        _emit(harness.to_csv(harness.mesh_mod_rows(study)), args.out)
        if args.log:
            with open(args.log, "w") as fh:
                json.dump(harness.mesh_mod_dump(study) | {"seed": args.seed}, fh)
        return 0

    preset = EXPERIMENTS.get(args.experiment, {})
    method = args.method or preset.get("method", "mixed-sv")
    bc = args.bc or preset.get("bc", "compatible")
    rho = args.rho if args.rho is not None else preset.get("rho", 1e2)
    if method == "mixed-sv" and args.mesh_mod == "none":
        warnings.warn("mixed-sv on an unmodified mesh: singular vertices make the "
                      "pressure space too rich and the system may be singular", stacklevel=1)
    logs: list = []
    status = 0
    rows = []
    for ra in args.ra or [1.0]:
        part = harness.run_convergence(
            method=method, bc_mode=bc, mesh_mod=args.mesh_mod, rho=rho, ra=ra,
            Ns=args.n or [4, 8, 16, 32], k=args.k, nu=args.nu, tol=args.tol,
            max_iter=args.max_iter, pattern=args.pattern, logs=logs)
        for r in part:
            r["Ra"] = ra
        rows += part
    if any(str(r["status"]).startswith("error") for r in rows):
        status = 1
    cols = ["Ra"] + harness.REPORT_COLUMNS
    _emit(harness.to_csv(rows, cols), args.out)
    if args.log:
        with open(args.log, "w") as fh:
            json.dump({"seed": args.seed, "runs": logs}, fh)
    return status


if __name__ == "__main__":
    sys.exit(main())
