"""Command-line front end: load a system from a preset or config file, run
one analysis, write CSV reports and PPM density strips.

Exit codes: 0 ok, 2 config error, 3 budget exhausted or incomplete result,
4 internal error.  Output files are written atomically (temp + rename) and
are byte-identical for identical configs and seeds.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from typing import Optional

import numpy as np

from . import chaos, dynamics, measures
from .config import ConfigError, RunConfig, load_config
from .errors import BudgetError, IfsLabError, PreconditionError
from .intervals import IntervalSet
from .maps import Ifs
from .stochastic import (
    TransitionMatrix,
    inverse_matrix,
    is_irreducible,
    is_primitive,
    rigidity_check,
    separability_check,
    split_check,
    stationary_vector,
)
from .render import density_strip, points_strip

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BUDGET = 3
EXIT_INTERNAL = 4


def _write_atomic(path: str, data: "str | bytes") -> None:
    mode = "wb" if isinstance(data, bytes) else "w"
    tmp = path + ".tmp"
    with open(tmp, mode) as fh:
        fh.write(data)
    os.replace(tmp, path)


def _write_report(out_dir: str, lines: list[tuple[str, object]]) -> None:
    text = "".join(f"{key}={value}\n" for key, value in lines)
    _write_atomic(os.path.join(out_dir, "report.txt"), text)


def _fmt_word(w) -> str:
    return "" if w is None else ".".join(str(s) for s in w.symbols)


def _deadline(cfg: RunConfig) -> Optional[float]:
    return None if cfg.budget is None else time.monotonic() + cfg.budget


def _out_of_time(deadline: Optional[float]) -> bool:
    return deadline is not None and time.monotonic() > deadline


# -- commands -------------------------------------------------------------------


def cmd_target(cfg: RunConfig, out_dir: str) -> int:
    F = cfg.build_ifs()
    code = EXIT_OK
    try:
        res = dynamics.target_approx(
            F, cfg.tol, cfg.max_depth, deadline=_deadline(cfg)
        )
    except BudgetError as exc:
        res = exc.partial
        code = EXIT_BUDGET
    _write_atomic(os.path.join(out_dir, "atoms.csv"), res.atoms.to_csv())
    _write_atomic(os.path.join(out_dir, "undecided.csv"), res.undecided.to_csv())
    _write_report(out_dir, [
        ("command", "target"),
        ("tol", f"{cfg.tol:.17g}"),
        ("max_depth", cfg.max_depth),
        ("depth_reached", res.depth_reached),
        ("n_atom_words", res.n_atom_words),
        ("n_atom_parts", len(res.atoms.parts)),
        ("n_undecided_words", res.n_undecided_words),
        ("complete", str(res.complete).lower()),
    ])
    if code == EXIT_OK and not res.complete:
        code = EXIT_BUDGET
    return code


def cmd_attractor(cfg: RunConfig, out_dir: str) -> int:
    F = cfg.build_ifs()
    star = dynamics.star_set(F, F.whole_domain(), tol=cfg.tol, max_iter=cfg.max_iter)
    _write_atomic(os.path.join(out_dir, "star_set.csv"), star.set.to_csv())
    lines: list[tuple[str, object]] = [
        ("command", "attractor"),
        ("star_iterations", star.iterations),
        ("star_converged", str(star.converged).lower()),
        ("star_parts", len(star.set.parts)),
    ]
    try:
        target = dynamics.target_approx(
            F, cfg.tol, cfg.max_depth, deadline=_deadline(cfg)
        )
    except BudgetError as exc:
        target = exc.partial
    lines.append(("target_complete", str(target.complete).lower()))
    if not target.atoms.is_empty:
        probe = dynamics.conley_probe(
            F, target.atoms, cfg.conley_eps, tol=cfg.tol, max_iter=cfg.max_iter
        )
        stable = dynamics.stability_probe(
            F, target.atoms, cfg.v_eps, cfg.v0_eps, min(cfg.max_iter, 50)
        )
        lines.extend([
            ("star_vs_atoms_hausdorff", f"{star.set.hausdorff(target.atoms):.17g}"),
            ("conley_verdict", probe.kind),
            ("conley_iterations", probe.iterations),
            ("stable", str(stable).lower()),
        ])
    else:
        lines.append(("conley_verdict", "no-atoms"))
    _write_report(out_dir, lines)
    return EXIT_OK if star.converged else EXIT_BUDGET


def cmd_chaos(cfg: RunConfig, out_dir: str, mode: str) -> int:
    F = cfg.build_ifs()
    try:
        target = dynamics.target_approx(
            F, cfg.tol, cfg.max_depth, deadline=_deadline(cfg)
        )
    except BudgetError as exc:
        target = exc.partial
    reference = target.atoms
    if reference.is_empty:
        reference = target.undecided
    if reference.is_empty:
        raise ConfigError("no reference set available for the chaos probe")
    x0 = cfg.x0 if cfg.x0 is not None else 0.5 * (F.domain[0] + F.domain[1])
    n = cfg.n_samples
    report = chaos.chaos_probe(
        F,
        x0,
        n,
        from_index=max(1, n // 100),
        resolution=cfg.tol,
        reference=reference,
        reference_tol=cfg.tol,
        mode=mode,
        weights=cfg.get_weights(F.k) if mode == "bernoulli" else None,
        seed=cfg.seed,
    )
    orb = report.orbit
    _write_atomic(os.path.join(out_dir, "orbit.csv"), chaos.orbit_csv(orb))
    _write_atomic(os.path.join(out_dir, "tail.csv"), report.cover.to_csv())
    _write_atomic(
        os.path.join(out_dir, "density.ppm"),
        points_strip(orb.points[max(1, n // 100):], F.domain),
    )
    _write_report(out_dir, [
        ("command", "chaos"),
        ("mode", mode),
        ("x0", f"{x0:.17g}"),
        ("n", n),
        ("from_index", report.from_index),
        ("resolution", f"{report.resolution:.17g}"),
        ("reference", "atoms" if not target.atoms.is_empty else "undecided"),
        ("hausdorff_to_reference", f"{report.distance:.17g}"),
        ("tolerance", f"{report.tolerance:.17g}"),
        ("verdict", report.verdict),
    ])
    return EXIT_OK


def cmd_stationary(cfg: RunConfig, out_dir: str) -> int:
    F = cfg.build_ifs()
    weights = cfg.get_weights(F.k)
    deadline = _deadline(cfg)
    mu = measures.GridMeasure.uniform(F.domain, cfg.n_bins)
    iterations = 0
    converged = False
    for iterations in range(1, cfg.max_iter + 1):
        nxt = measures.markov_step(F, weights, mu)
        drift = measures.w1_distance(mu, nxt)
        mu = nxt
        if drift <= cfg.w1_tol:
            converged = True
            break
        if _out_of_time(deadline):
            break
    sampled, unresolved = None, 1.0
    try:
        sampled, unresolved = measures.coding_pushforward(
            F,
            cfg.n_samples,
            cfg.prefix_len,
            tol=max(cfg.tol * 1e-3, 1e-12),
            n_bins=cfg.n_bins,
            seed=cfg.seed,
            weights=weights,
        )
    except measures.DegenerateOutputError as exc:
        unresolved = exc.unresolved_fraction
    support = measures.support_estimate(mu, cfg.mass_tol)
    _write_atomic(os.path.join(out_dir, "measure.csv"), mu.to_csv())
    _write_atomic(os.path.join(out_dir, "support.csv"), support.to_csv())
    _write_atomic(os.path.join(out_dir, "density.ppm"), density_strip(mu))
    lines = [
        ("command", "stationary"),
        ("n_bins", cfg.n_bins),
        ("iterations", iterations),
        ("converged", str(converged).lower()),
        ("mean", f"{mu.mean():.17g}"),
        ("variance", f"{mu.variance():.17g}"),
        ("unresolved_fraction", f"{unresolved:.17g}"),
    ]
    if sampled is not None:
        lines.extend([
            ("sampled_mean", f"{sampled.mean():.17g}"),
            ("sampled_variance", f"{sampled.variance():.17g}"),
            ("w1_iterated_vs_sampled", f"{measures.w1_distance(mu, sampled):.17g}"),
        ])
    _write_report(out_dir, lines)
    return EXIT_OK if converged else EXIT_BUDGET


def cmd_recurrent(cfg: RunConfig, out_dir: str) -> int:
    F = cfg.build_ifs()
    P = cfg.load_matrix()
    if P is None:
        raise ConfigError("recurrent analysis needs --matrix")
    if P.k != F.k:
        raise ConfigError(f"matrix is {P.k}-state but the IFS has {F.k} maps")
    if not is_irreducible(P):
        raise ConfigError("transition matrix must be irreducible")
    pbar = stationary_vector(P)
    Q = inverse_matrix(P, pbar)
    deadline = _deadline(cfg)
    hat = measures.HatMeasure.uniform(F.domain, F.k, cfg.n_bins)
    iterations = 0
    converged = False
    for iterations in range(1, cfg.max_iter + 1):
        nxt = measures.generalized_markov_step(F, P, hat)
        drift = measures._hat_cdf_distance(hat, nxt)
        hat = nxt
        if drift <= cfg.w1_tol:
            converged = True
            break
        if _out_of_time(deadline):
            break
    sampled, unresolved = None, 1.0
    try:
        sampled, unresolved = measures.coding_pushforward(
            F,
            cfg.n_samples,
            cfg.prefix_len,
            tol=max(cfg.tol * 1e-3, 1e-12),
            n_bins=cfg.n_bins,
            seed=cfg.seed,
            matrix=Q,
            initial=pbar,
            hat=True,
        )
    except measures.DegenerateOutputError as exc:
        unresolved = exc.unresolved_fraction
    _write_atomic(os.path.join(out_dir, "hat_measure.csv"), hat.to_csv())
    section_masses = ",".join(f"{m:.17g}" for m in hat.section_masses())
    lines = [
        ("command", "recurrent"),
        ("primitive", str(is_primitive(P)).lower()),
        ("stationary_vector", ",".join(f"{p:.17g}" for p in pbar)),
        ("iterations", iterations),
        ("converged", str(converged).lower()),
        ("section_masses", section_masses),
        ("unresolved_fraction", f"{unresolved:.17g}"),
    ]
    if sampled is not None:
        lines.append(
            ("hat_distance_iterated_vs_sampled",
             f"{measures._hat_cdf_distance(hat, sampled):.17g}")
        )
    _write_report(out_dir, lines)
    return EXIT_OK if converged else EXIT_BUDGET


def cmd_split(cfg: RunConfig, out_dir: str) -> int:
    F = cfg.build_ifs()
    P = cfg.load_matrix()
    if P is None:
        P = TransitionMatrix.bernoulli(cfg.get_weights(F.k))
    pbar = stationary_vector(P)
    J = cfg.interval_j if cfg.interval_j is not None else F.domain
    lines: list[tuple[str, object]] = [
        ("command", "split"),
        ("interval_j", f"{J[0]:.17g} {J[1]:.17g}"),
        ("max_depth", cfg.max_depth),
    ]
    try:
        witness = split_check(F, P, pbar, J, cfg.max_depth)
        lines.append(
            ("split_witness",
             f"{_fmt_word(witness[0])} {_fmt_word(witness[1])}"
             if witness else f"none-up-to-depth {cfg.max_depth}")
        )
        sep = separability_check(F, J, cfg.max_depth)
        lines.append(
            ("separability_witness",
             f"{_fmt_word(sep[0])} {_fmt_word(sep[1])}"
             if sep else f"none-up-to-depth {cfg.max_depth}")
        )
        rig = rigidity_check(F, P, pbar, 1, cfg.tol, cfg.max_depth, J=J)
        lines.append(
            ("rigidity_witness_symbol_1",
             f"{_fmt_word(rig[0])} {_fmt_word(rig[1])}"
             if rig else "none-found")
        )
    except PreconditionError as exc:
        lines.append(("precondition_failed", str(exc)))
    common = dynamics.common_fixed_points(F, cfg.tol, cfg.n_bins)
    lines.append(
        ("common_fixed_points",
         "none" if common.is_empty
         else " ".join(f"[{a:.17g},{b:.17g}]" for a, b in common.parts))
    )
    _write_report(out_dir, lines)
    return EXIT_OK


# -- entry point ------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ifs-lab",
        description="Attractors, chaos games and stationary measures of interval IFSs",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("target", "attractor", "chaos", "stationary", "recurrent", "split"):
        p = sub.add_parser(name)
        p.add_argument("--preset")
        p.add_argument("--config")
        p.add_argument("--tol", type=float)
        p.add_argument("--max-depth", type=int)
        p.add_argument("--max-iter", type=int)
        p.add_argument("--bins", type=int)
        p.add_argument("--samples", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--out", default=".")
        p.add_argument("--weights")
        p.add_argument("--matrix")
        p.add_argument("--budget", type=float)
        if name == "chaos":
            p.add_argument("--mode", choices=("disjunctive", "bernoulli"),
                           default="disjunctive")
            p.add_argument("--x0", type=float)
    return parser


_FLAG_MAP = {
    "tol": "tol",
    "max_depth": "max_depth",
    "max_iter": "max_iter",
    "bins": "n_bins",
    "samples": "n_samples",
    "seed": "seed",
    "matrix": "matrix_path",
    "budget": "budget",
    "x0": "x0",
}


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    if args.preset:
        cfg.preset = args.preset
        cfg.map_specs = []
    if args.weights:
        cfg.weights = [float(x) for x in args.weights.replace(",", " ").split()]
    for flag, attr in _FLAG_MAP.items():
        value = getattr(args, flag, None)
        if value is not None:
            setattr(cfg, attr, value)
    cfg.validate()
    return cfg


def main(argv: Optional[list[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _config_from_args(args)
        out_dir = args.out
        os.makedirs(out_dir, exist_ok=True)
        if args.command == "target":
            return cmd_target(cfg, out_dir)
        if args.command == "attractor":
            return cmd_attractor(cfg, out_dir)
        if args.command == "chaos":
            return cmd_chaos(cfg, out_dir, args.mode)
        if args.command == "stationary":
            return cmd_stationary(cfg, out_dir)
        if args.command == "recurrent":
            return cmd_recurrent(cfg, out_dir)
        if args.command == "split":
            return cmd_split(cfg, out_dir)
        raise AssertionError(f"unhandled command {args.command}")
    except ConfigError as exc:
        print(f"ifs-lab: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BudgetError as exc:
        print(f"ifs-lab: budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except IfsLabError as exc:
        print(f"ifs-lab: error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # pragma: no cover - safety net
        print(f"ifs-lab: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
