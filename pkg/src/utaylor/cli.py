"""Command-line front end.

Exit codes: 0 success, 2 validation error, 3 certificate failure in strict
mode, 4 I/O or artifact error.  Every output file embeds the configuration
digest, precision and seed; numerical payloads are byte-identical across
re-runs with the same configuration.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import List, Optional

import numpy as np
from mpmath import mp, mpf

from . import artifact as art
from .geometry import ApproachRegion, DomainDesc, tangent_disc
from .poly import Poly
from .potential import (
    ArcOnCircle,
    PreconditionError,
    green_arc_complement,
    minthin_psi_test,
    poisson_kernel,
)
from .precision import set_precision
from .probe import plessner_probe, radial_density, uk_diagnostic
from .schedule import Schedule, ScheduleError, load_schedule, validate_schedule
from .universal import (
    BuildSettings,
    CertificateError,
    DiscBuilder,
    StripBuilder,
)
from .wos import harmonic_measure

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_CERTIFICATE = 3
EXIT_IO = 4


def _write(path: str, text: str) -> None:
    with open(path, "w") as fh:
        fh.write(text)


def _config_dict(args, fields: List[str]) -> dict:
    return {f: getattr(args, f.replace("-", "_")) for f in fields}


# ---------------------------------------------------------------------------
# build


def cmd_build(args) -> int:
    set_precision(args.precision)
    try:
        schedule = load_schedule(args.schedule)
    except (OSError, KeyError, ValueError) as exc:
        print(f"error: cannot load schedule: {exc}", file=sys.stderr)
        return EXIT_IO if isinstance(exc, OSError) else EXIT_VALIDATION
    diags = validate_schedule(schedule, check_complement=not args.skip_complement_gate)
    if diags:
        for d in diags:
            print(f"schedule validation: {d}", file=sys.stderr)
        return EXIT_VALIDATION
    if args.kmax > len(schedule.steps):
        print(
            f"error: schedule has {len(schedule.steps)} steps, kmax={args.kmax}",
            file=sys.stderr,
        )
        return EXIT_VALIDATION
    settings = BuildSettings(
        tol_floor=args.tol_floor,
        delta_floor=args.delta_floor,
    )
    builder_cls = DiscBuilder if schedule.domain_kind == "disc" else StripBuilder
    builder = builder_cls(schedule, args.mode, settings)
    try:
        series = builder.run(args.kmax)
    except CertificateError as exc:
        print(f"certificate failure: {exc}", file=sys.stderr)
        return EXIT_CERTIFICATE
    except ScheduleError as exc:
        print(f"schedule error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    os.makedirs(args.out, exist_ok=True)
    config = _config_dict(
        args, ["mode", "kmax", "precision", "tol_floor", "delta_floor"]
    )
    art.save_series(series, os.path.join(args.out, "series.txt"), config)
    _write(
        os.path.join(args.out, "certificates.txt"),
        f"config_digest {art.config_digest(config, schedule)}\n"
        f"precision_bits {mp.prec}\n" + art.certificate_table(series),
    )
    relaxations = sum(1 for c in series.certificates if c.relaxation_note)
    summary = [
        f"domain {series.domain_kind}",
        f"mode {series.mode}",
        f"steps {len(series.blocks)}",
        f"series degree {series.degree}",
        f"relaxations {relaxations}",
    ]
    for c in series.certificates:
        summary.append(
            f"step {c.k}: exponent {c.exponent}, fit degree {c.fit_degree}, "
            f"fit {c.achieved_fit_err:.3e} (requested {c.requested_fit_tol:.3e}), "
            f"growth margin {c.achieved_growth_margin:.3e}, "
            f"target {c.achieved_target_err:.3e} (requested {c.requested_target_err:.3e})"
        )
    _write(os.path.join(args.out, "summary.txt"), "\n".join(summary) + "\n")
    print("\n".join(summary))
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify


def _reload(args):
    set_precision(args.precision)
    try:
        return art.read_series(args.artifact), None
    except OSError as exc:
        print(f"error reading artifact: {exc}", file=sys.stderr)
        return None, EXIT_IO
    except art.ArtifactError as exc:
        print(f"artifact corrupted: {exc}", file=sys.stderr)
        return None, EXIT_IO


def cmd_verify(args) -> int:
    series, err = _reload(args)
    if series is None:
        return err
    os.makedirs(args.out, exist_ok=True)
    digest = art.config_digest(
        {"suite": args.suite, "grid": args.grid, "seed": args.seed},
        series.schedule,
    )
    header = f"config_digest {digest}\nprecision_bits {mp.prec}\nseed {args.seed}\n"
    suite = args.suite
    if suite == "growth":
        return _verify_growth(series, args, header)
    if suite == "targets":
        return _verify_targets(series, args, header)
    if suite == "uk":
        return _verify_uk(series, args, header)
    if suite in ("plessner", "radial"):
        return _verify_coverage(series, args, header)
    print(f"unknown suite {suite}", file=sys.stderr)
    return EXIT_VALIDATION


def _verify_growth(series, args, header) -> int:
    factor = max(1, args.grid // 64)
    A = series.schedule.A.densified(factor)
    w = series.schedule.w
    rows = []
    ok_all = True
    for idx, c in enumerate(series.certificates, start=1):
        partial = sum((b.poly for b in series.blocks[:idx]), Poly.zero())
        prev = sum((b.poly for b in series.blocks[: idx - 1]), Poly.zero())
        q = partial - prev
        bound = mpf(2) ** (-idx)
        margin = -mpf("inf")
        for z in A.all_samples():
            margin = max(margin, abs(q(z)) - bound * w(z))
        ok = margin <= 0
        ok_all &= ok
        rows.append([idx, float(margin), int(ok)])
    art.write_csv(
        os.path.join(args.out, "growth.csv"), ["k", "margin", "pass"], rows
    )
    _write(
        os.path.join(args.out, "growth.txt"),
        header + "".join(f"step {r[0]}: margin {r[1]:.6e} pass {r[2]}\n" for r in rows),
    )
    print(f"growth suite: {'all pass' if ok_all else 'violations recorded'}")
    return EXIT_OK


def _verify_targets(series, args, header) -> int:
    factor = max(2, args.grid // 64)
    rows = []
    ok_all = True
    for idx, (block, cert) in enumerate(
        zip(series.blocks, series.certificates), start=1
    ):
        step = series.schedule.steps[idx - 1]
        K = step.K.densified(factor)
        partial = sum((b.poly for b in series.blocks[:idx]), Poly.zero())
        worst = mpf(0)
        for z in K.all_samples():
            worst = max(worst, abs(step.p(z) - partial(z)))
        ceiling = 2 * max(cert.achieved_target_err, 1e-300)
        ok = float(worst) <= ceiling
        ok_all &= ok
        rows.append([idx, float(worst), cert.achieved_target_err, int(ok)])
    art.write_csv(
        os.path.join(args.out, "targets.csv"),
        ["k", "dense_err", "certificate_err", "within_2x"],
        rows,
    )
    _write(
        os.path.join(args.out, "targets.txt"),
        header
        + "".join(
            f"step {r[0]}: dense {r[1]:.6e} certificate {r[2]:.6e} within_2x {r[3]}\n"
            for r in rows
        ),
    )
    print(f"targets suite: {'stable under densification' if ok_all else 'drift detected'}")
    return EXIT_OK


def _verify_uk(series, args, header) -> int:
    rows = []
    grid = []
    n = max(args.grid, 16)
    for i in range(n):
        for j in range(n):
            z = complex(-0.75 + 1.5 * (i + 0.5) / n, -0.75 + 1.5 * (j + 0.5) / n)
            if 0 < abs(z) <= 0.75:
                grid.append(z)
    for k in range(1, len(series.blocks)):
        rep = uk_diagnostic(series, k, grid)
        rows.append([k, rep.N, rep.fraction_below_half_log, rep.indeterminate])
    art.write_csv(
        os.path.join(args.out, "uk.csv"),
        ["k", "N", "fraction_below_half_log", "indeterminate"],
        rows,
    )
    _write(
        os.path.join(args.out, "uk.txt"),
        header
        + "".join(
            f"k={r[0]} N={r[1]} fraction {r[2]:.4f} indeterminate {r[3]}\n" for r in rows
        ),
    )
    print("uk suite written")
    return EXIT_OK


def _verify_coverage(series, args, header) -> int:
    gen = np.random.Generator(
        np.random.Philox(key=np.array([args.seed, 0xC0FFEE], dtype=np.uint64))
    )
    theta = float(gen.uniform(0, 2 * np.pi))
    zeta = complex(np.cos(theta), np.sin(theta))
    box = (-args.box, args.box, -args.box, args.box)
    rows = []
    if args.suite == "plessner":
        region = ApproachRegion(zeta, 2.0, 1.0)
        for depth in range(1, args.depth + 1):
            score = plessner_probe(series, region, box, args.grid, depth, args.per_level)
            rows.append([depth, score.hit_fraction, score.samples_used])
        name = "plessner"
    else:
        for levels in range(1, args.depth + 1):
            score = radial_density(series, zeta, box, args.grid, levels)
            rows.append([levels, score.hit_fraction, score.samples_used])
        name = "radial"
    art.write_csv(
        os.path.join(args.out, f"{name}.csv"),
        ["depth", "hit_fraction", "samples"],
        rows,
    )
    _write(
        os.path.join(args.out, f"{name}.txt"),
        header
        + f"zeta {zeta!r}\n"
        + "".join(f"depth {r[0]}: fraction {r[1]:.6f} samples {r[2]}\n" for r in rows),
    )
    print(f"{name} suite written (zeta = {zeta:.6f})")
    return EXIT_OK


# ---------------------------------------------------------------------------
# potential wrappers


def cmd_potential(args) -> int:
    set_precision(args.precision)
    sub = args.subcommand
    if sub == "poisson":
        z = complex(args.z_re, args.z_im)
        zeta = complex(np.cos(args.zeta_angle), np.sin(args.zeta_angle))
        print(mp.nstr(poisson_kernel(z, zeta), 20))
        return EXIT_OK
    if sub == "minthin":
        rep = minthin_psi_test(lambda t: t**args.power)
        print(f"psi(t) = t^{args.power}: {rep.verdict} "
              f"(tail {rep.tail_estimate:.3e}, slope {rep.growth_slope:.3e})")
        return EXIT_OK
    if sub == "hmeasure":
        if args.domain == "unit_disc":
            dom = DomainDesc.unit_disc()
        else:
            dom = DomainDesc.disc(complex(args.center_re, args.center_im), args.radius)
        phi = {
            "one": lambda p: np.ones_like(p, dtype=float),
            "re": lambda p: np.real(p),
            "im": lambda p: np.imag(p),
            "right_half": lambda p: (np.real(p) > 0).astype(float),
        }[args.phi]
        try:
            est = harmonic_measure(
                dom, complex(args.z_re, args.z_im), phi, args.walks, args.seed
            )
        except PreconditionError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_VALIDATION
        print(
            f"estimate {est.functional_value!r} confidence_radius "
            f"{est.confidence_radius!r} walks {est.walks} seed {est.seed} "
            f"discarded {est.discarded}"
        )
        return EXIT_OK
    if sub == "green-arc":
        arc = ArcOnCircle(args.arc_lo, args.arc_hi)
        if args.asymptote_check:
            R = mpf(10) ** 6
            g = green_arc_complement(R, arc)
            expected = -mp.log(mpf(arc.capacity))
            print(
                f"G({mp.nstr(R, 5)}) - log R = {mp.nstr(g - mp.log(R), 12)}  "
                f"log(1/capacity) = {mp.nstr(expected, 12)}  "
                f"difference = {mp.nstr(g - mp.log(R) - expected, 6)}"
            )
        else:
            z = complex(args.z_re, args.z_im)
            print(mp.nstr(green_arc_complement(z, arc), 20))
        return EXIT_OK
    if sub == "tangent-disc":
        zeta = complex(np.cos(args.zeta_angle), np.sin(args.zeta_angle))
        center, radius = tangent_disc(zeta, args.level)
        worst = mpf(0)
        for i in range(1000):
            th = 2 * mp.pi * (i + 0.5) / 1000
            zb = center + radius * mp.exp(1j * th)
            if abs(zb) < 1:
                worst = max(worst, abs(poisson_kernel(zb, zeta) - args.level))
        print(
            f"center {complex(center)} radius {float(radius)} "
            f"max_residual {mp.nstr(worst, 6)}"
        )
        return EXIT_OK
    print(f"unknown potential subcommand {sub}", file=sys.stderr)
    return EXIT_VALIDATION


# ---------------------------------------------------------------------------
# parser


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="utaylor",
        description="build and audit truncated universal Taylor series",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="run a builder on a schedule file")
    b.add_argument("--schedule", required=True)
    b.add_argument("--mode", choices=["strict", "empirical"], default="strict")
    b.add_argument("--kmax", type=int, default=3)
    b.add_argument("--precision", type=int, default=256)
    b.add_argument("--out", required=True)
    b.add_argument("--tol-floor", type=float, default=1e-6)
    b.add_argument("--delta-floor", type=float, default=1e-3)
    b.add_argument("--skip-complement-gate", action="store_true")
    b.set_defaults(func=cmd_build)

    v = sub.add_parser("verify", help="re-check a stored series")
    v.add_argument("artifact")
    v.add_argument(
        "--suite",
        required=True,
        choices=["growth", "targets", "uk", "plessner", "radial"],
    )
    v.add_argument("--grid", type=int, default=64)
    v.add_argument("--depth", type=int, default=8)
    v.add_argument("--per-level", type=int, default=64)
    v.add_argument("--box", type=float, default=2.0)
    v.add_argument("--seed", type=int, default=1)
    v.add_argument("--precision", type=int, default=256)
    v.add_argument("--out", required=True)
    v.set_defaults(func=cmd_verify)

    p = sub.add_parser("potential", help="potential-theory utilities")
    p.add_argument(
        "subcommand",
        choices=["poisson", "minthin", "hmeasure", "green-arc", "tangent-disc"],
    )
    p.add_argument("--z-re", type=float, default=0.0)
    p.add_argument("--z-im", type=float, default=0.0)
    p.add_argument("--zeta-angle", type=float, default=0.0)
    p.add_argument("--power", type=float, default=2.0)
    p.add_argument("--domain", choices=["unit_disc", "disc"], default="unit_disc")
    p.add_argument("--center-re", type=float, default=0.0)
    p.add_argument("--center-im", type=float, default=0.0)
    p.add_argument("--radius", type=float, default=0.25)
    p.add_argument("--phi", choices=["one", "re", "im", "right_half"], default="one")
    p.add_argument("--walks", type=int, default=10000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--arc-lo", type=float, default=-1.0)
    p.add_argument("--arc-hi", type=float, default=1.0)
    p.add_argument("--asymptote-check", action="store_true")
    p.add_argument("--level", type=float, default=1.0)
    p.add_argument("--precision", type=int, default=256)
    p.set_defaults(func=cmd_potential)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
