import argparse
import json
import logging
import sys

from config import Config
from cohomology import cohomology
from errors import (
    CatalogError,
    CollectionError,
    FanMismatchError,
    FanValidationError,
    FibrationError,
    FormatError,
    NonFiniteCohomologyError,
    PreconditionError,
    TwistSearchExhausted,
)
from exceptional import check_collection, construct_mainthm
from fibration import verify_fibration
import catalog
import formats
from utils.cache import parse_coefficients
from utils.report import (
    render_bundle,
    render_cohomology,
    render_collection_report,
    render_construction,
    render_fan_check,
)

logger = logging.getLogger(__name__)

# Exit codes
EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_VALIDATION = 4
EXIT_TWIST_EXHAUSTED = 5


def emit(args, text, data):
    """Print the text rendering or the structured (JSON) form"""
    if args.format == 'structured':
        print(json.dumps(data, indent=2))
    else:
        print(text)


def read_divisor_arg(value, fan):
    """Coefficients such as "0 0 2", or a path to a divisor document"""
    try:
        coeffs = parse_coefficients(value)
    except ValueError:
        return formats.read_divisor(value, fan)
    if len(coeffs) != fan.n_rays:
        raise FormatError(f"expected {fan.n_rays} coefficients, got {len(coeffs)}", '<argument>')
    return fan.divisor(coeffs)


# Commands
def cmd_fan_check(args):
    """Validate a fan and list its primitive collections"""
    fan = formats.read_fan(args.fan)
    report = fan.validate()
    relations = fan.primitive_collections() if report.passed else None
    data = report.to_dict()
    data['primitive_relations'] = [str(r) for r in relations or ()]
    emit(args, render_fan_check(fan, report, relations, args.verbose), data)
    return EXIT_OK if report.passed else EXIT_NEGATIVE


def cmd_cohomology(args):
    """Cohomology dimensions of a line bundle"""
    fan = formats.read_fan(args.fan).require_valid()
    divisor = read_divisor_arg(args.divisor, fan)
    table = cohomology(fan, divisor, args.jobs)
    emit(args, render_cohomology(table, args.verbose), table.to_dict())
    return EXIT_OK


def cmd_collection_check(args):
    """Verify an ordered collection of line bundles"""
    fan = formats.read_fan(args.fan).require_valid()
    collection = formats.read_collection(args.collection, fan)
    report = check_collection(fan, collection, args.jobs)
    emit(args, render_collection_report(report, args.verbose), report.to_dict())
    return EXIT_OK if report.is_strongly_exceptional else EXIT_NEGATIVE


def cmd_fibration_build(args):
    """Assemble the total fan of a bundle document"""
    bundle = formats.read_bundle(args.bundle)
    print(formats.dumps(formats.bundle_to_dict(bundle)))
    return EXIT_OK


def cmd_fibration_verify(args):
    """Recover the fibration structure of a fan from its fiber rays"""
    fan = formats.read_fan(args.fan)
    fiber_rays = parse_coefficients(args.fiber_rays)
    try:
        bundle = verify_fibration(fan, fiber_rays, args.cone)
    except FibrationError as e:
        print(f"not a fibration: {e}")
        return EXIT_NEGATIVE
    emit(args, render_bundle(bundle), formats.bundle_to_dict(bundle))
    return EXIT_OK


def cmd_fibration_collection(args):
    """Search for the twisted collection on the total space of a bundle"""
    bundle = formats.read_bundle(args.bundle)
    fiber_coll = formats.read_collection(args.fiber_collection, bundle.fiber)
    base_coll = formats.read_collection(args.base_collection, bundle.base)
    step = read_divisor_arg(args.step, bundle.base) if args.step else None
    result = construct_mainthm(bundle, fiber_coll, base_coll, step, args.cap, args.jobs)
    data = result.report.to_dict()
    data['t'] = result.t
    data['attempts'] = [
        {'t': a.t, 'violations': a.violations} for a in result.attempts
    ]
    emit(args, render_construction(result, args.verbose), data)
    return EXIT_OK


def cmd_catalog(args):
    """Emit a catalog fan, bundle or reference collection as a document"""
    entry = catalog.load(args.name, *args.params)
    if args.collection:
        doc = formats.collection_to_dict(entry.collection)
    elif entry.bundle is not None:
        doc = formats.bundle_to_dict(entry.bundle)
    else:
        doc = formats.fan_to_dict(entry.fan)
    print(formats.dumps(doc))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog='toric',
        description='Line-bundle cohomology and exceptional collections on smooth complete toric varieties.',
    )
    parser.add_argument('--format', choices=['text', 'structured'], default='text',
                        help='Report format (default: text)')
    parser.add_argument('--jobs', type=int, default=Config.MAX_JOBS,
                        help='Worker bound for parallel cohomology (default: available cores)')
    parser.add_argument('-v', '--verbose', action='store_true',
                        help='Print ledgers and evidence tables')
    parser.add_argument('--cache', action='store_true',
                        help='Store cohomology tables in the SQLite cache')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('fan-check', help='Validate a fan')
    p.add_argument('fan', help="Fan document ('-' for stdin)")
    p.set_defaults(handler=cmd_fan_check)

    p = sub.add_parser('cohomology', help='Cohomology of a line bundle')
    p.add_argument('fan')
    p.add_argument('divisor', help='Coefficients over rays, e.g. "0 0 2", or a divisor document')
    p.set_defaults(handler=cmd_cohomology)

    p = sub.add_parser('collection-check', help='Verify a collection of line bundles')
    p.add_argument('fan')
    p.add_argument('collection')
    p.set_defaults(handler=cmd_collection_check)

    p = sub.add_parser('fibration-build', help='Assemble the total fan of a bundle')
    p.add_argument('bundle')
    p.set_defaults(handler=cmd_fibration_build)

    p = sub.add_parser('fibration-verify', help='Check that a fan is a fiber bundle')
    p.add_argument('fan')
    p.add_argument('--fiber-rays', required=True, help='Indices of the fiber rays, e.g. "0 1"')
    p.add_argument('--cone', type=int, default=0, help='Maximal cone fixing the bases (default: 0)')
    p.set_defaults(handler=cmd_fibration_verify)

    p = sub.add_parser('fibration-collection', help='Build and verify the twisted collection')
    p.add_argument('bundle')
    p.add_argument('fiber_collection')
    p.add_argument('base_collection')
    p.add_argument('--step', help='Base divisor D_step (default: first base free ray)')
    p.add_argument('--cap', type=int, default=Config.TWIST_SEARCH_CAP,
                   help='Largest twist multiple to try')
    p.set_defaults(handler=cmd_fibration_collection)

    p = sub.add_parser('catalog', help='Emit a built-in example')
    p.add_argument('name', choices=sorted(catalog.GENERATORS))
    p.add_argument('params', nargs='*', type=int)
    p.add_argument('--collection', action='store_true',
                   help='Emit the reference collection instead of the fan')
    p.set_defaults(handler=cmd_catalog)
    return parser


def configure_logging(verbose):
    level = logging.INFO if verbose else Config.LOG_LEVEL
    logging.basicConfig(level=level, format='%(levelname)s %(name)s: %(message)s', stream=sys.stderr)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)

    # Validate configuration
    try:
        Config.validate()
    except ValueError as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        return EXIT_USAGE
    if args.jobs < 1:
        parser.error('--jobs must be at least 1')

    configure_logging(args.verbose)
    if args.cache:
        Config.COHOMOLOGY_CACHE = True

    try:
        return args.handler(args)
    except FormatError as e:
        print(f"Parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except CatalogError as e:
        print(f"Catalog error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except TwistSearchExhausted as e:
        print(f"Twist search failed: {e}", file=sys.stderr)
        return EXIT_TWIST_EXHAUSTED
    except (FanValidationError, FanMismatchError, FibrationError, CollectionError,
            PreconditionError, NonFiniteCohomologyError) as e:
        print(f"Validation error: {e}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == '__main__':
    sys.exit(main())
