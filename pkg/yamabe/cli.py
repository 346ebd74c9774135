#!/usr/bin/env python3
"""yamabe command line.

Subcommands: constants, epsilon, lambda, estimate, verify, stable, health.
Results go to stdout (or --out) as one CSV or JSON document; diagnostics go
to stderr. Exit codes are listed in EXIT_CODES.
"""

import argparse
import sys
from dataclasses import replace

import pandas as pd

from yamabe import PREFIX, __version__
from yamabe.descriptors import parse_descriptor
from yamabe.errors import AssumptionViolated, DescriptorError, YamabeError
from yamabe.health_check import check_health
from yamabe.invariants import sphere_product_einstein_hilbert
from yamabe.minimize import BoundSandwich, MinimizeConfig, MinimizeResult, estimate_mu, lambda_sweep, sandwich
from yamabe.output import FORMATS, OutputDocument, build_metadata
from yamabe.suites import SUITES, run_suites
from yamabe.tables import constants_table, epsilon_table, lambda_table, stable_limit_table

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_ASSUMPTION = 3
EXIT_NOT_CONVERGED = 4

EXIT_CODES = {
    EXIT_OK: "success",
    EXIT_VERIFY_FAILED: "verification failure (or unexpected error)",
    EXIT_USAGE: "usage or parse error",
    EXIT_ASSUMPTION: "curvature assumption violated",
    EXIT_NOT_CONVERGED: "no convergence within --max-iters under --strict",
}

DEFAULT_CASES = 1000


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _grid(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(',') if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--format', choices=FORMATS, default='csv', help="output format (default: csv)")
    common.add_argument('--out', default=None, metavar='PATH', help="write the document here instead of stdout")
    common.add_argument('--seed', type=int, default=0, help="rng seed for restarts and suites (default: 0)")
    common.add_argument('--max-iters', type=int, default=None, help="iteration cap per restart")
    common.add_argument('--tol', type=float, default=None, help="relative stopping tolerance")
    common.add_argument('--restarts', type=int, default=None, help="starting fields per minimization")
    common.add_argument('--strict', action='store_true', help="exit 4 when a minimization does not converge")
    common.add_argument('--history', action='store_true', help="include the per-step quotient history")

    parser = argparse.ArgumentParser(
        prog='yamabe',
        description="Conformal Yamabe constants of product manifolds: tables, estimates and checks.",
    )
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('constants', parents=[common], help="a_m, p_m, omega_m, mu(S^m), Sigma(S^m)")
    p.add_argument('m', type=int, nargs='*')

    p = sub.add_parser('epsilon', parents=[common], help="defect factors epsilon_{v,w}")
    p.add_argument('v_max', type=int)
    p.add_argument('w_max', type=int)

    p = sub.add_parser('lambda', parents=[common], help="surgery constants Lambda_{m,k} and Lambda_m")
    p.add_argument('m', type=int, nargs='*')

    p = sub.add_parser('estimate', parents=[common], help="minimize the Yamabe quotient on a geometry")
    p.add_argument('descriptor', nargs='+',
                   help="sphere M N [SCALE] | torus M N | product DESC DESC | file PATH ('-' for stdin)")
    p.add_argument('--sweep', type=_grid, default=None, metavar='L1,L2,...',
                   help="scale the second product factor by each lambda and sandwich every point")
    p.add_argument('--mu-ref', type=_grid, default=None, metavar='MUV,MUW',
                   help="Yamabe constants of the two product factors; enables the sandwich for file factors")

    p = sub.add_parser('verify', parents=[common], help="seeded inequality suites")
    p.add_argument('suite', choices=[*SUITES, 'all'])
    p.add_argument('n_cases', type=int, nargs='?', default=DEFAULT_CASES)
    p.add_argument('rng_seed', type=int, nargs='?', default=None, help="overrides --seed")

    p = sub.add_parser('stable', parents=[common], help="Sigma(S^(v+bi)) / Sigma(S^(bi)) against (pi e/2)^v")
    p.add_argument('v', type=int)
    p.add_argument('b', type=int)
    p.add_argument('i_max', type=int)

    sub.add_parser('health', parents=[common], help="layered prerequisite checks")
    return parser


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _metadata(args, **extra) -> dict:
    return build_metadata(args.argv, rng_seed=args.seed, command=args.command, **extra)


def _config(args) -> MinimizeConfig:
    overrides = {
        'max_iters': args.max_iters,
        'rel_tol': args.tol,
        'restarts': args.restarts,
    }
    return MinimizeConfig(rng_seed=args.seed, **{k: v for k, v in overrides.items() if v is not None})


def cmd_constants(args) -> tuple[OutputDocument, int]:
    return OutputDocument(_metadata(args), table=constants_table(args.m)), EXIT_OK


def cmd_epsilon_table(args) -> tuple[OutputDocument, int]:
    return OutputDocument(_metadata(args), table=epsilon_table(args.v_max, args.w_max)), EXIT_OK


def cmd_lambda_table(args) -> tuple[OutputDocument, int]:
    return OutputDocument(_metadata(args), table=lambda_table(args.m)), EXIT_OK


def cmd_stable_limit(args) -> tuple[OutputDocument, int]:
    return OutputDocument(_metadata(args), table=stable_limit_table(args.v, args.b, args.i_max)), EXIT_OK


def _result_record(result: MinimizeResult, history: bool) -> dict:
    record = {
        'value': result.value,
        'iterations': result.iterations,
        'converged': result.converged,
        'start': result.start,
    }
    if history:
        record['history'] = list(result.history)
    return record


def _sandwich_record(s: BoundSandwich) -> dict:
    return {
        'lam': s.lam,
        'lower': s.lower,
        'estimate': s.estimate,
        'upper_sphere': s.upper_sphere,
        'upper_reference': s.upper_reference,
        'verdict_lower': s.verdict_lower,
        'verdict_upper': s.verdict_upper,
    }


def cmd_estimate(args) -> tuple[OutputDocument, int]:
    geometry = parse_descriptor(args.descriptor, stdin=sys.stdin)
    cfg = _config(args)
    payload = {'geometry': geometry.descriptor, 'vertices': geometry.manifold.n_vertices}

    factors = geometry.factors
    if args.mu_ref is not None:
        if not geometry.is_product or len(args.mu_ref) != 2:
            raise DescriptorError("--mu-ref needs a product descriptor and exactly two values")
        factors = tuple(replace(f, mu_reference=mu) for f, mu in zip(factors, args.mu_ref, strict=True))
    bracketable = (
        geometry.is_product
        and all(f.mu_reference is not None and f.manifold.dim >= 3 for f in factors)
    )
    if args.sweep is not None and not bracketable:
        raise DescriptorError("--sweep needs a product of two factors of dimension >= 3 with known Yamabe constants "
                              "(sphere, torus or --mu-ref)")

    results = []
    if bracketable and args.sweep is not None:
        left, right = factors
        reference = None
        if left.sphere is not None and right.sphere is not None:
            (v, scale_v), (w, scale_w) = left.sphere, right.sphere

            def reference(lam):
                return sphere_product_einstein_hilbert(v, w, scale_w * lam, scale_v=scale_v)

        sweep = lambda_sweep(left.manifold, right.manifold, left.mu_reference, right.mu_reference,
                             args.sweep, cfg, reference=reference)
        points = []
        for _, point in sweep.points:
            record = _sandwich_record(point)
            record['result'] = _result_record(point.result, args.history)
            points.append(record)
            results.append(point.result)
        payload['sweep'] = {
            'points': points,
            'min_estimate': sweep.min_estimate,
            'argmin_lambda': sweep.argmin_lambda,
            'naive_infimum': sweep.naive_infimum,
            'naive_within_slack': sweep.naive_within_slack,
            'verdict_lower': sweep.verdict_lower,
        }
    elif bracketable:
        left, right = factors
        bracket = sandwich(left.manifold, right.manifold, left.mu_reference, right.mu_reference, cfg,
                           upper_reference=geometry.upper_reference())
        payload['result'] = _result_record(bracket.result, args.history)
        payload['sandwich'] = _sandwich_record(bracket)
        results.append(bracket.result)
    else:
        result = estimate_mu(geometry.manifold, cfg)
        payload['result'] = _result_record(result, args.history)
        results.append(result)

    code = EXIT_OK
    if args.strict and not all(r.converged for r in results):
        print(f"{PREFIX} minimization did not converge within {cfg.max_iters} iterations", file=sys.stderr)
        code = EXIT_NOT_CONVERGED
    return OutputDocument(_metadata(args), payload=payload), code


def cmd_verify(args) -> tuple[OutputDocument, int]:
    seed = args.seed if args.rng_seed is None else args.rng_seed
    results = run_suites(args.suite, args.n_cases, seed)
    table = pd.DataFrame([r.as_dict() for r in results])
    code = EXIT_OK
    for r in results:
        if not r.ok:
            print(f"{PREFIX} suite {r.suite}: {r.failed} of {r.cases} checks failed", file=sys.stderr)
            code = EXIT_VERIFY_FAILED
    return OutputDocument(build_metadata(args.argv, rng_seed=seed, command=args.command), table=table), code


def cmd_health(args) -> tuple[OutputDocument, int]:
    healthy, message = check_health()
    if not healthy:
        print(message, file=sys.stderr)
    payload = {'healthy': healthy, 'message': message or ''}
    return OutputDocument(_metadata(args), payload=payload), EXIT_OK if healthy else EXIT_VERIFY_FAILED


COMMANDS = {
    'constants': cmd_constants,
    'epsilon': cmd_epsilon_table,
    'lambda': cmd_lambda_table,
    'estimate': cmd_estimate,
    'verify': cmd_verify,
    'stable': cmd_stable_limit,
    'health': cmd_health,
}


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def main(argv: list[str] | None = None):
    argv = list(sys.argv[1:] if argv is None else argv)
    code = EXIT_OK
    try:
        args = build_parser().parse_args(argv)
        args.argv = argv
        document, code = COMMANDS[args.command](args)
        document.write(args.format, args.out)
    except SystemExit as e:
        # argparse: --help / --version exit 0, usage errors exit 2
        code = e.code if isinstance(e.code, int) else EXIT_USAGE
    except AssumptionViolated as e:
        print(f"{PREFIX} {e}", file=sys.stderr)
        code = EXIT_ASSUMPTION
    except YamabeError as e:
        print(f"{PREFIX} {e}", file=sys.stderr)
        code = EXIT_USAGE
    except OSError as e:
        print(f"{PREFIX} Cannot write output: {e}", file=sys.stderr)
        code = EXIT_USAGE
    except Exception as e:
        print(f"{PREFIX} Unexpected error: {e}", file=sys.stderr)
        code = EXIT_VERIFY_FAILED
    finally:
        sys.exit(code)


if __name__ == '__main__':
    main()
