"""Command-line front end.

Subcommands: map, aut, sweep, counterexample, verify. Outputs are
deterministic for a fixed (input, nodes, seed): byte-identical CSV/JSON
across runs. Exit codes: 0 ok, 1 invariant failure, 2 bad input,
3 numerical failure; every error path prints a single machine-parsable
line `slitmap-error[<kind>]: <reason>` to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Tuple

import numpy as np

from . import exports, families, verify
from .circular_aut import enumerate_automorphisms
from .errors import (
    InvalidDomainError,
    SlitmapError,
)
from .geometry import CircularDomain, MultiplyConnectedDomain, circular_to_curves, read_domain_spec
from .koebe import canonical_map

EXIT_OK = 0
EXIT_INVARIANT = 1
EXIT_BAD_INPUT = 2
EXIT_NUMERICAL = 3


@dataclass
class RunConfig:
    """Parsed invocation: subcommand plus the shared knobs."""

    command: str
    input_path: Optional[Path] = None
    nodes: int = 256
    grid: Optional[Tuple[float, float, int]] = None
    out_dir: Path = field(default_factory=lambda: Path("."))
    tol: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        if self.nodes < 16 or self.nodes % 2 != 0:
            raise ValueError(f"--nodes must be even and >= 16, got {self.nodes}")
        if self.grid is not None and self.grid[2] < 2:
            raise ValueError("--grid needs at least 2 points")
        if not self.tol > 0:
            raise ValueError("--tol must be positive")


def _fail(kind: str, message: str, code: int) -> int:
    sys.stderr.write(f"slitmap-error[{kind}]: {message}\n")
    return code


def _parse_grid(text: str) -> Tuple[float, float, int]:
    try:
        start, end, count = text.split(":")
        return float(start), float(end), int(count)
    except ValueError as exc:
        raise ValueError(f"--grid must be START:END:COUNT, got {text!r}") from exc


def _grid_values(grid: Tuple[float, float, int]) -> np.ndarray:
    return np.linspace(grid[0], grid[1], grid[2])


def _load_domain(cfg: RunConfig):
    if cfg.input_path is None:
        raise InvalidDomainError("this subcommand requires --input PATH")
    return read_domain_spec(cfg.input_path)


def _as_curves(domain, nodes: int) -> MultiplyConnectedDomain:
    if isinstance(domain, CircularDomain):
        return circular_to_curves(domain, nodes)
    return domain


def _default_markings(mcd: MultiplyConnectedDomain) -> Tuple[complex, complex]:
    if mcd.m < 2:
        raise InvalidDomainError("canonical maps need at least two boundary components")
    return complex(mcd.outer.nodes[0]), complex(mcd.holes[0].nodes[0])


def cmd_map(cfg: RunConfig) -> int:
    domain = _load_domain(cfg)
    mcd = _as_curves(domain, cfg.nodes)
    a1, a2 = _default_markings(mcd)
    k = canonical_map(mcd, a1, a2)
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    rec = exports.moduli_record(mcd.m, k.moduli, k.diagnostics)
    exports.dump_json(rec, cfg.out_dir / "moduli.json")
    header = "m,r2" + "".join(
        f",r{j + 3},alpha{j + 3},beta{j + 3}" for j in range(len(k.moduli.slits)))
    with open(cfg.out_dir / "moduli.csv", "w", encoding="utf-8") as fh:
        fh.write(header + "\n" + exports.moduli_csv_row(mcd.m, k.moduli) + "\n")
    with open(cfg.out_dir / "map.svg", "w", encoding="utf-8") as fh:
        fh.write(exports.map_svg(mcd, k))
    print(f"moduli written to {cfg.out_dir}/moduli.json "
          f"(r2={k.moduli.r2:.9g}, slits={len(k.moduli.slits)})")
    return EXIT_OK


def cmd_aut(cfg: RunConfig) -> int:
    domain = _load_domain(cfg)
    if not isinstance(domain, CircularDomain):
        raise InvalidDomainError(
            "aut requires a circular-domain spec; map the domain onto a "
            "circular one first (run `slitmap map`)")
    group = enumerate_automorphisms(domain, tol=cfg.tol)
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    exports.dump_json(exports.aut_record(group), cfg.out_dir / "aut.json")
    print(f"automorphism group: order {group.order}, tag {group.classification}")
    return EXIT_OK


def _family_from_spec(path: Path) -> families.DomainFamily:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidDomainError(f"invalid JSON in {path}: {exc}") from exc
    name = obj.get("name")
    params = obj.get("params", {})
    if name == "annulus":
        return families.annulus_family(
            rho0=float(params.get("rho0", 0.2)),
            slope=float(params.get("slope", 0.1)),
            lam_range=tuple(params.get("range", (0.0, 1.0))))
    if name == "counterexample":
        return families.counterexample_family()
    raise InvalidDomainError(
        f"unknown family {name!r}; available: annulus, counterexample")


def cmd_sweep(cfg: RunConfig) -> int:
    if cfg.grid is None:
        raise InvalidDomainError("sweep requires --grid START:END:COUNT")
    family = _family_from_spec(cfg.input_path) if cfg.input_path \
        else families.annulus_family()
    grid = _grid_values(cfg.grid)
    sweep = families.sweep_moduli(family, grid, nodes=cfg.nodes)
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    with open(cfg.out_dir / "sweep.csv", "w", encoding="utf-8") as fh:
        fh.write(exports.sweep_csv(sweep))
    report = {"errors": {f"{k:.9g}": v for k, v in sorted(sweep.errors.items())}}
    if not sweep.errors:
        rep = families.smoothness_report(sweep, order=1)
        report["smoothness"] = {
            "order": rep.order,
            "step": rep.step,
            "max_quotient": {k: float(v) for k, v in sorted(rep.max_quotient.items())},
            "flagged": {k: list(v) for k, v in sorted(rep.flags.items()) if v},
        }
    exports.dump_json(report, cfg.out_dir / "smoothness.json")
    nfail = len(sweep.errors)
    print(f"sweep complete: {len(grid) - nfail}/{len(grid)} grid points ok")
    if nfail > 0.1 * len(grid):
        return _fail("numerical", f"{nfail} of {len(grid)} grid points failed",
                     EXIT_NUMERICAL)
    return EXIT_OK


def cmd_counterexample(cfg: RunConfig) -> int:
    if cfg.grid is not None:
        mags = np.abs(_grid_values(cfg.grid))
        mags = sorted(set(float(m) for m in mags if m > 0))
    else:
        mags = [0.1, 0.2, 0.3, 0.4, 0.5]
    pos = list(mags)
    neg = [-m for m in mags]
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    out = {}
    for label, probe in (("generic", -0.9 + 0j),
                         ("fixed_point", complex(-np.sqrt(3.0 / 16.0)))):
        rep = families.biholomorphism_jump(pos, neg, probe, nodes=cfg.nodes)
        out[label] = rep.as_dict()
        with open(cfg.out_dir / f"jump_{label}.txt", "w", encoding="utf-8") as fh:
            fh.write(exports.jump_text(rep))
    exports.dump_json(out, cfg.out_dir / "jump_report.json")
    print(f"jump at probe -0.9: {out['generic']['jump']:.6g} "
          f"(reference {out['generic']['reference_jump']:.6g}); "
          f"at the fixed point: {out['fixed_point']['jump']:.3g}")
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    results = verify.run_all(seed=cfg.seed)
    width = max(len(r.name) for r in results)
    failed = 0
    for r in results:
        mark = "PASS" if r.passed else "FAIL"
        print(f"{r.name:<{width}}  {mark}  {r.detail}")
        failed += 0 if r.passed else 1
    print(f"{len(results) - failed}/{len(results)} checks passed")
    if failed:
        return _fail("invariant", f"{failed} invariant check(s) failed",
                     EXIT_INVARIANT)
    return EXIT_OK


COMMANDS = {
    "map": cmd_map,
    "aut": cmd_aut,
    "sweep": cmd_sweep,
    "counterexample": cmd_counterexample,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slitmap",
        description="Koebe slit-annulus maps, circular-domain automorphisms, "
                    "and domain-family sweeps.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("map", "canonical map and moduli of a domain spec"),
        ("aut", "automorphism group of a circular-domain spec"),
        ("sweep", "moduli sweep of a domain family over a lambda grid"),
        ("counterexample", "run the built-in discontinuity witness"),
        ("verify", "run the invariant battery"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--input", type=Path, default=None, metavar="PATH")
        p.add_argument("--nodes", type=int, default=256, metavar="N")
        p.add_argument("--grid", type=str, default=None, metavar="START:END:COUNT")
        p.add_argument("--out", type=Path, default=Path("."), metavar="DIR")
        p.add_argument("--tol", type=float, default=1e-8, metavar="X")
        p.add_argument("--seed", type=int, default=0, metavar="S")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(
            command=args.command,
            input_path=args.input,
            nodes=args.nodes,
            grid=_parse_grid(args.grid) if args.grid else None,
            out_dir=args.out,
            tol=args.tol,
            seed=args.seed,
        )
    except ValueError as exc:
        return _fail("bad-input", str(exc), EXIT_BAD_INPUT)
    try:
        return COMMANDS[cfg.command](cfg)
    except (InvalidDomainError, FileNotFoundError, ValueError) as exc:
        return _fail("bad-input", str(exc), EXIT_BAD_INPUT)
    except SlitmapError as exc:
        return _fail("numerical", str(exc), EXIT_NUMERICAL)


if __name__ == "__main__":
    sys.exit(main())
