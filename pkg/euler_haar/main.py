"""
Command-line front end.

Every subcommand prints one JSON document (or CSV for ``sample --format csv``)
on stdout; logs go to stderr and, optionally, to a log file.
Exit codes: 0 success, 1 parse error, 2 validation failure, 3 resource guard.
"""
import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from euler_haar import __version__
from euler_haar.controllers import (
    conjecture_probe, entry_function, expand, forward, hull_contains_zero, inverse, jacobian,
    mc_integrate, normalization, prefactor_report, quad_integrate, run_verification, sample, tilde,
)
from euler_haar.controllers.verification import SUITES
from euler_haar.models.angles import (
    EulerAngles, GroupElement, GroupKind, coordinate_layout, group_dimension, parse_angle_list,
)
from euler_haar.models.exact import format_rational, parse_rational
from euler_haar.models.finite_type import EntryPolynomial, FiniteTypeFunction
from euler_haar.utils.errors import GuardError, ParseError
from euler_haar.utils.settings import Settings, settings

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_INVALID = 2
EXIT_GUARD = 3

# settings fields that may be given as flags
SETTING_FLAGS = ('seed', 'samples', 'digits', 'max_rank', 'max_monomials', 'max_cyclotomic_order', 'max_digits',
                 'chunk_size', 'workers', 'quad_order', 'verify_samples', 'verify_draws', 'log_file')


class ArgumentParser(argparse.ArgumentParser):
    """argparse parser that reports usage errors as ParseError instead of exiting."""

    def error(self, message: str):
        raise ParseError(message)


class VerificationFailed(Exception):
    """Raised after ``verify`` has printed a report with failed checks."""


def setup_logging(level: str = 'WARNING', log_file: Optional[str] = None) -> None:
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(logging.FileHandler(log_file, mode='w'))  # Overwrite log file each run
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.WARNING),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True,
    )


def load_json(value: str) -> Any:
    """Inline JSON or the path of a JSON file.

    Raises:
        FileNotFoundError: If ``value`` is neither JSON nor an existing file.
        json.JSONDecodeError: If the text is not valid JSON.
    """
    text = value.strip()
    if text[:1] in '{[':
        return json.loads(text)
    path = Path(value)
    if not path.exists():
        raise FileNotFoundError(f"Input file not found: {value}")
    with open(path, 'r') as f:
        return json.load(f)


def _common_options() -> argparse.ArgumentParser:
    common = ArgumentParser(add_help=False)
    common.add_argument('--config', help="JSON settings file (same keys as the flags)")
    common.add_argument('--log-level', default='WARNING',
                        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'])
    common.add_argument('--log-file')
    common.add_argument('--seed', type=int)
    common.add_argument('--samples', type=int)
    common.add_argument('--digits', type=int, help="Digits of the float shadows")
    common.add_argument('--max-rank', type=int)
    common.add_argument('--max-monomials', type=int)
    common.add_argument('--max-cyclotomic-order', type=int)
    common.add_argument('--max-digits', type=int)
    common.add_argument('--chunk-size', type=int)
    common.add_argument('--workers', type=int)
    common.add_argument('--quad-order', type=int)
    common.add_argument('--verify-samples', type=int)
    common.add_argument('--verify-draws', type=int)
    return common


def _group_options(parser: argparse.ArgumentParser, rank: bool = True) -> None:
    parser.add_argument('--group', default='su', choices=[g.value for g in GroupKind])
    if rank:
        parser.add_argument('--n', type=int, required=True, help="Rank N >= 2")


def _function_options(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument('--poly', help="Entry polynomial, e.g. 'u11*conj(u11) - 1/2'")
    source.add_argument('--input', help="Finite-type function JSON (inline or file path)")


def build_parser() -> ArgumentParser:
    common = _common_options()
    parser = ArgumentParser(prog='euler_haar', description=__doc__.strip().splitlines()[0])
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('param', parents=[common], help="Euler angles -> group element")
    _group_options(p)
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument('--angles', help="Comma-separated phi..., psi..., omega...")
    source.add_argument('--input', help="Angle record JSON (inline or file path)")

    p = sub.add_parser('invert', parents=[common], help="Group element -> Euler angles")
    _group_options(p, rank=False)
    p.add_argument('--input', required=True, help="Matrix JSON (inline or file path)")

    p = sub.add_parser('sample', parents=[common], help="Haar-distributed Euler angles")
    _group_options(p)
    p.add_argument('--format', default='json', choices=['json', 'csv'])
    p.add_argument('--matrices', action='store_true', help="Also emit the group elements (json only)")

    p = sub.add_parser('integrate', parents=[common], help="Haar integral of an entry polynomial")
    _group_options(p)
    p.add_argument('--poly', required=True)
    p.add_argument('--method', default='mc', choices=['mc', 'quad'])
    p.add_argument('--order', type=int, help="Quadrature nodes per axis")

    for name, text in (('tilde', "Admissible form of a finite-type function"),
                       ('spectrum', "Spectrum of the admissible form")):
        p = sub.add_parser(name, parents=[common], help=text)
        _group_options(p)
        _function_options(p)

    p = sub.add_parser('hull', parents=[common], help="Is 0 in the convex hull of a point set")
    p.add_argument('--points', required=True,
                   help="JSON list of points with rational coordinates such as \"1/2\" (inline or file path)")

    p = sub.add_parser('probe', parents=[common], help="Moments and hull verdict of one function")
    _group_options(p)
    _function_options(p)
    p.add_argument('--p-max', type=int, default=4)

    p = sub.add_parser('constants', parents=[common], help="Exact normalization and prefactor report")
    _group_options(p)

    p = sub.add_parser('verify', parents=[common], help="Run the verification suites")
    p.add_argument('--n', type=int, default=3)
    p.add_argument('--suite', default='all', choices=['all', *SUITES])
    return parser


def apply_settings(args: argparse.Namespace) -> None:
    """Defaults, then the --config file, then explicit flags."""
    settings.reset()
    if args.config:
        settings.update(Settings.from_file(args.config).to_dict())
    settings.update({key: getattr(args, key) for key in SETTING_FLAGS if getattr(args, key, None) is not None})
    logger.debug(f"Effective settings: {settings.to_dict()}")


def _check_rank(n: int) -> None:
    if n < 2:
        raise ValueError(f"Rank must be at least 2, got {n}")
    settings.check_rank(n)


def _finite_type(args: argparse.Namespace) -> FiniteTypeFunction:
    if args.poly is not None:
        return expand(EntryPolynomial.parse(args.poly), args.group, args.n)
    f = FiniteTypeFunction.from_dict(load_json(args.input))
    if (f.group.value, f.n) != (args.group, args.n):
        raise ValueError(f"Function is defined on {f.group.value}({f.n}), not {args.group}({args.n})")
    return f


def _complex(value: complex, digits: int) -> List[float]:
    return [round(value.real, digits), round(value.imag, digits)]


def cmd_param(args: argparse.Namespace) -> Dict[str, Any]:
    _check_rank(args.n)
    if args.angles is not None:
        angles = parse_angle_list(args.group, args.n, args.angles)
    else:
        angles = EulerAngles.from_dict(load_json(args.input))
        if (angles.group.value, angles.n) != (args.group, args.n):
            raise ValueError(f"Angle record is for {angles.group.value}({angles.n}), not {args.group}({args.n})")
    return forward(angles).to_dict()


def cmd_invert(args: argparse.Namespace) -> Dict[str, Any]:
    element = GroupElement.from_dict(load_json(args.input), group=args.group)
    _check_rank(element.n)
    return inverse(element).to_dict()


def cmd_sample(args: argparse.Namespace) -> Any:
    _check_rank(args.n)
    rng = np.random.default_rng(settings.seed)
    angles = sample(args.group, args.n, rng, settings.samples)
    names = [c.name for c in coordinate_layout(GroupKind.parse(args.group), args.n)]
    rows = angles.flat()
    if args.format == 'csv':
        out = io.StringIO()
        writer = csv.writer(out, lineterminator='\n')
        writer.writerow(names)
        writer.writerows([[repr(float(v)) for v in row] for row in rows])
        return out.getvalue()
    data: Dict[str, Any] = {'group': args.group, 'n': args.n, 'seed': settings.seed,
                            'coordinates': names, 'angles': rows.tolist()}
    if args.matrices:
        data['matrices'] = [GroupElement(args.group, m).to_dict()['entries']
                            for m in forward(angles, check_range=False).matrix]
    return data


def cmd_integrate(args: argparse.Namespace) -> Dict[str, Any]:
    _check_rank(args.n)
    poly = EntryPolynomial.parse(args.poly)
    fn = entry_function(poly, args.group, args.n)
    digits = settings.digits
    data: Dict[str, Any] = {'group': args.group, 'n': args.n, 'poly': args.poly, 'method': args.method}
    if args.method == 'mc':
        mean, stderr = mc_integrate(fn, args.group, args.n)
        data.update({'samples': settings.samples, 'seed': settings.seed,
                     'value': _complex(mean, digits), 'stderr': round(stderr, digits)})
    else:
        order = args.order or settings.quad_order
        value = quad_integrate(fn, args.group, args.n, [order] * group_dimension(args.group, args.n))
        data.update({'order': order, 'value': _complex(value, digits)})
    return data


def cmd_tilde(args: argparse.Namespace) -> Dict[str, Any]:
    _check_rank(args.n)
    f = _finite_type(args)
    return {'finite_type': f.to_dict(settings.digits), 'admissible': tilde(f).to_dict(settings.digits),
            'jacobian': jacobian(f.group, f.n).to_dict(settings.digits)}


def cmd_spectrum(args: argparse.Namespace) -> Dict[str, Any]:
    _check_rank(args.n)
    adm = tilde(_finite_type(args))
    points = adm.spectrum()
    return {'group': args.group, 'n': args.n, 'z_vars': adm.z_count,
            'spectrum': [[format_rational(q) for q in p] for p in points]}


def cmd_hull(args: argparse.Namespace) -> Dict[str, Any]:
    raw = load_json(args.points)
    if not isinstance(raw, list) or not all(isinstance(p, list) for p in raw):
        raise ParseError("Points must be a JSON list of coordinate lists")
    return hull_contains_zero([[parse_rational(c) for c in p] for p in raw]).to_dict()


def cmd_probe(args: argparse.Namespace) -> Dict[str, Any]:
    _check_rank(args.n)
    return conjecture_probe(_finite_type(args), args.p_max).to_dict(settings.digits)


def cmd_constants(args: argparse.Namespace) -> Dict[str, Any]:
    _check_rank(args.n)
    return {
        'normalization': normalization(args.group, args.n).to_dict(settings.digits),
        'prefactor': prefactor_report(args.group, args.n).to_dict(settings.digits),
    }


def cmd_verify(args: argparse.Namespace) -> Dict[str, Any]:
    report = run_verification(args.n, args.suite, settings.seed)
    for failure in report.failures():
        logger.error(f"Check failed: {failure.suite}/{failure.tag} [{failure.identity}]: {failure.detail}")
    return report.to_dict()


COMMANDS = {
    'param': cmd_param,
    'invert': cmd_invert,
    'sample': cmd_sample,
    'integrate': cmd_integrate,
    'tilde': cmd_tilde,
    'spectrum': cmd_spectrum,
    'hull': cmd_hull,
    'probe': cmd_probe,
    'constants': cmd_constants,
    'verify': cmd_verify,
}


def run(argv: Optional[Sequence[str]] = None, stdout=None) -> int:
    """Parse ``argv``, run one subcommand and return its exit code."""
    stdout = stdout or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except ParseError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except SystemExit as e:  # --help / --version
        return int(e.code or 0)

    try:
        apply_settings(args)
        setup_logging(args.log_level, settings.log_file)
        result = COMMANDS[args.command](args)
        text = result if isinstance(result, str) else json.dumps(result, indent=2)
        stdout.write(text if text.endswith('\n') else text + '\n')
        if args.command == 'verify' and not result['passed']:
            raise VerificationFailed(f"{sum(1 for s in result['suites'].values() if not s['passed'])} suite(s) failed")
        return EXIT_OK
    except (ParseError, json.JSONDecodeError) as e:
        logger.error(f"Parse error: {e}")
        return EXIT_PARSE
    except GuardError as e:
        logger.error(f"Resource guard tripped: {e}")
        return EXIT_GUARD
    except (ValueError, FileNotFoundError, VerificationFailed) as e:
        logger.error(f"Validation failed: {e}")
        return EXIT_INVALID
    except Exception:
        logger.exception(f"Unexpected error in {args.command}")
        return EXIT_INVALID


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
