"""Command-line front end: scenario runner, self-check suite, and direct
kinematic queries.

Exit codes: 0 success, 1 configuration or usage error, 2 unreachable or
otherwise kinematically infeasible request, 3 singular configuration.
"""

from __future__ import annotations

import argparse
import sys
import time

from . import csvio, scenario
from .errors import (
    DegenerateInputError,
    GimbalProximityError,
    JointLimitError,
    KinematicsError,
    ScenarioError,
    SingularConfigurationError,
    UnreachableError,
)
from .platform import PlatformPose
from .spherical import (
    IkBranch,
    SphericalJoints,
    fk_tip_fixed,
    ik_full,
    left_geometry,
    right_geometry,
)
from .trajectory import ProfileLimits, plan_profile, sample_profile

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_INFEASIBLE = 2
EXIT_SINGULAR = 3

_BRANCHES = {"principal": IkBranch.PRINCIPAL, "mirror": IkBranch.MIRROR}


def exit_code_for(exc: Exception) -> int:
    if isinstance(exc, SingularConfigurationError):
        return EXIT_SINGULAR
    if isinstance(
        exc,
        (UnreachableError, JointLimitError, GimbalProximityError, DegenerateInputError),
    ):
        return EXIT_INFEASIBLE
    return EXIT_CONFIG


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; keep 2 reserved for infeasibility.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _csv_floats(count: int):
    def convert(text: str) -> list[float]:
        parts = text.split(",")
        if len(parts) != count:
            raise argparse.ArgumentTypeError(f"expected {count} comma-separated numbers")
        try:
            return [float(p) for p in parts]
        except ValueError:
            raise argparse.ArgumentTypeError("non-numeric entry") from None

    return convert


def _add_geometry_args(parser: argparse.ArgumentParser):
    parser.add_argument("--side", choices=["left", "right"], default="left",
                        help="which instrument module (default left)")
    parser.add_argument("--alpha", type=float, default=10.0,
                        help="outer tilt of the left module, deg (default 10)")
    parser.add_argument("--beta", type=float, default=10.0,
                        help="inner tilt, deg (default 10)")
    parser.add_argument("--port-spacing", type=float, default=10.0,
                        help="port half-spacing on the platform X' axis, mm (default 10)")


def _geometry_from(args):
    build = left_geometry if args.side == "left" else right_geometry
    return build(alpha=args.alpha, beta=args.beta, port_spacing=args.port_spacing)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rcmkin", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario file and write its CSV")
    run.add_argument("scenario", help="scenario path, or the name of a bundled "
                                      "scenario (e.g. reorientation_demo)")
    run.add_argument("--dt", type=float, help="override the sample step, s")
    run.add_argument("--out", help="override the output CSV path")
    run.add_argument("--plot-data", choices=list(csvio.PLOT_SUBSETS),
                     help="write only that figure's column subset")
    run.add_argument("--branch", choices=list(_BRANCHES),
                     help="override the IK branch policy")
    run.add_argument("--quiet", action="store_true", help="suppress the summary line")

    sub.add_parser("validate", help="run the self-check oracle suite")

    fk = sub.add_parser("fk", help="tip position for a pose and joint set")
    fk.add_argument("--pose", type=_csv_floats(6), required=True,
                    metavar="X,Y,Z,PSI,THETA,PHI")
    fk.add_argument("--joints", type=_csv_floats(3), required=True, metavar="Q1,Q2,Q3")
    _add_geometry_args(fk)

    ik = sub.add_parser("ik", help="joints that reach a fixed-frame tip")
    ik.add_argument("--pose", type=_csv_floats(6), required=True,
                    metavar="X,Y,Z,PSI,THETA,PHI")
    ik.add_argument("--tip", type=_csv_floats(3), required=True, metavar="X,Y,Z")
    ik.add_argument("--branch", choices=list(_BRANCHES), default="principal")
    _add_geometry_args(ik)

    profile = sub.add_parser("profile", help="trapezoidal profile arithmetic")
    profile.add_argument("--delta", type=float, required=True,
                         help="signed displacement")
    profile.add_argument("--omega-max", type=float, default=10.0)
    profile.add_argument("--eps-max", type=float, default=5.0)
    profile.add_argument("--dt", type=float,
                         help="also print sampled (t, s, s_dot, s_ddot) rows")
    return parser


def _cmd_run(args) -> int:
    try:
        sc = scenario.load_scenario(args.scenario)
    except FileNotFoundError:
        try:
            sc = scenario.bundled_scenario(args.scenario)
        except FileNotFoundError:
            print(f"error: no scenario file or bundled scenario named "
                  f"{args.scenario!r}", file=sys.stderr)
            return EXIT_CONFIG
    if args.dt is not None:
        if args.dt <= 0:
            print("error: --dt must be positive", file=sys.stderr)
            return EXIT_CONFIG
        sc.dt = args.dt
    if args.branch is not None:
        sc.branch = _BRANCHES[args.branch]
    out_path = args.out or sc.output

    started = time.perf_counter()
    plan, endo = scenario.run_scenario(sc)
    csvio.write_plan_csv(plan, out_path, subset=args.plot_data, endoscope=endo)
    elapsed = time.perf_counter() - started
    if not args.quiet:
        print(
            f"wrote {out_path}: {plan.samples} samples, "
            f"{plan.duration:.9g} s plan, computed in {elapsed:.3f} s"
        )
    return EXIT_OK


def _cmd_validate() -> int:
    from . import validation  # defer the scipy import to the one command using it

    results = validation.run_all()
    print(validation.format_report(results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_CONFIG


def _cmd_fk(args) -> int:
    tip = fk_tip_fixed(
        PlatformPose(*args.pose), SphericalJoints(*args.joints), _geometry_from(args)
    )
    print(",".join(csvio.format_number(v) for v in tip))
    return EXIT_OK


def _cmd_ik(args) -> int:
    joints = ik_full(
        PlatformPose(*args.pose), args.tip, _geometry_from(args), _BRANCHES[args.branch]
    )
    print(",".join(csvio.format_number(v) for v in (joints.q1, joints.q2, joints.q3)))
    return EXIT_OK


def _cmd_profile(args) -> int:
    prof = plan_profile(args.delta, ProfileLimits(args.omega_max, args.eps_max))
    fmt = csvio.format_number
    print(
        f"shape={prof.shape.value} t_acc={fmt(prof.t_acc)} "
        f"t_cruise={fmt(prof.t_cruise)} t_total={fmt(prof.t_total)} "
        f"peak_rate={fmt(prof.peak_rate)}"
    )
    if args.dt is not None:
        if args.dt <= 0:
            print("error: --dt must be positive", file=sys.stderr)
            return EXIT_CONFIG
        steps = max(1, round(prof.t_total / args.dt)) if prof.t_total > 0 else 0
        for i in range(steps + 1):
            t = prof.t_total * i / steps if steps else 0.0
            s, v, a = sample_profile(prof, t)
            print(",".join(fmt(x) for x in (t, s, v, a)))
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "validate":
            return _cmd_validate()
        if args.command == "fk":
            return _cmd_fk(args)
        if args.command == "ik":
            return _cmd_ik(args)
        return _cmd_profile(args)
    except (KinematicsError, ScenarioError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exit_code_for(exc)


if __name__ == "__main__":
    sys.exit(main())
