"""
JSON documents for fans, divisors, bundles, fibrations and collections.

Every document carries a `format` header such as "toric-fan/1". A reference to
another document is either a path, resolved against the directory of the
referencing file, or the document itself inline. Unknown fields are rejected.

    toric-fan/1         name?, rank, rays, max_cones
    toric-divisor/1     fan, coeffs
    toric-bundle/1      name?, fiber, base, twist, fiber_cone?, base_cone?
    toric-fibration/1   bundle fields plus total, fiber_rays, base_rays, total_cone
    toric-collection/1  name?, fan, divisors

A toric-bundle or toric-fibration document is accepted wherever a fan is
expected and stands for its total space.
"""

import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from config import Config
from errors import FanValidationError, FibrationError, FormatError
from exceptional import OrderedCollection
from fan import Fan, TDivisor
from fibration import FibrationBundle, build_fibration, check_bundle

logger = logging.getLogger(__name__)

FAN = 'toric-fan'
DIVISOR = 'toric-divisor'
BUNDLE = 'toric-bundle'
FIBRATION = 'toric-fibration'
COLLECTION = 'toric-collection'

_FIELDS = {
    FAN: ({'rank', 'rays', 'max_cones'}, {'name'}),
    DIVISOR: ({'fan', 'coeffs'}, set()),
    BUNDLE: ({'fiber', 'base', 'twist'}, {'name', 'fiber_cone', 'base_cone'}),
    FIBRATION: (
        {'fiber', 'base', 'twist', 'fiber_cone', 'base_cone', 'total',
         'fiber_rays', 'base_rays', 'total_cone'},
        {'name'},
    ),
    COLLECTION: ({'fan', 'divisors'}, {'name'}),
}


def header(kind: str) -> str:
    return f"{kind}/{Config.FORMAT_VERSION}"


@dataclass(frozen=True)
class Document:
    kind: str
    data: dict
    source: str
    base_dir: Path


def _parse_text(text: str, source: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(e.msg, source, e.lineno, e.colno) from e


def load_document(path: str) -> Document:
    """Read a document from a path, or from standard input when path is '-'."""
    if path == '-':
        return parse_document(sys.stdin.read(), '<stdin>', Path.cwd())
    file = Path(path)
    try:
        text = file.read_text()
    except OSError as e:
        raise FormatError(f"cannot read file: {e.strerror}", path) from e
    return parse_document(text, path, file.parent)


def parse_document(text: str, source: str = '<input>', base_dir: Path | None = None) -> Document:
    return _document(_parse_text(text, source), source, base_dir or Path.cwd())


def _document(data: Any, source: str, base_dir: Path) -> Document:
    if not isinstance(data, dict):
        raise FormatError("a document must be a JSON object", source)
    fmt = data.get('format')
    if not isinstance(fmt, str) or '/' not in fmt:
        raise FormatError("missing or malformed 'format' header", source)
    kind, _, version = fmt.partition('/')
    if kind not in _FIELDS:
        raise FormatError(f"unknown document format '{fmt}'", source)
    if version != str(Config.FORMAT_VERSION):
        raise FormatError(f"unsupported version '{version}' of {kind}", source)
    required, optional = _FIELDS[kind]
    fields = set(data) - {'format'}
    unknown = fields - required - optional
    if unknown:
        raise FormatError(f"unknown field(s) {', '.join(sorted(unknown))} in {kind}", source)
    missing = required - fields
    if missing:
        raise FormatError(f"missing field(s) {', '.join(sorted(missing))} in {kind}", source)
    return Document(kind, data, source, base_dir)


def _resolve(ref: Any, parent: Document, field_name: str) -> Document:
    if isinstance(ref, dict):
        return _document(ref, f"{parent.source}:{field_name}", parent.base_dir)
    if isinstance(ref, str):
        return load_document(str(parent.base_dir / ref))
    raise FormatError(f"'{field_name}' must be a path or an inline document", parent.source)


def _int(value: Any, what: str, doc: Document) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise FormatError(f"{what} must be an integer, got {value!r}", doc.source)
    return value


def _int_list(value: Any, what: str, doc: Document) -> tuple[int, ...]:
    if not isinstance(value, list):
        raise FormatError(f"{what} must be a list of integers", doc.source)
    return tuple(_int(x, what, doc) for x in value)


def _int_matrix(value: Any, what: str, doc: Document) -> tuple[tuple[int, ...], ...]:
    if not isinstance(value, list):
        raise FormatError(f"{what} must be a list of integer lists", doc.source)
    return tuple(_int_list(row, what, doc) for row in value)


def _name(doc: Document) -> str:
    name = doc.data.get('name', '')
    if not isinstance(name, str):
        raise FormatError("'name' must be a string", doc.source)
    return name


def _expect(doc: Document, *kinds: str):
    if doc.kind not in kinds:
        raise FormatError(f"expected {' or '.join(kinds)}, found {doc.kind}", doc.source)


# Readers
def fan_from_document(doc: Document) -> Fan:
    _expect(doc, FAN, BUNDLE, FIBRATION)
    if doc.kind != FAN:
        return bundle_from_document(doc).total
    data = doc.data
    return Fan(
        _int(data['rank'], 'rank', doc),
        _int_matrix(data['rays'], 'rays', doc),
        _int_matrix(data['max_cones'], 'max_cones', doc),
        _name(doc),
    )


def bundle_from_document(doc: Document) -> FibrationBundle:
    _expect(doc, BUNDLE, FIBRATION)
    data = doc.data
    fiber = fan_from_document(_resolve(data['fiber'], doc, 'fiber'))
    base = fan_from_document(_resolve(data['base'], doc, 'base'))
    twist = _int_matrix(data['twist'], 'twist', doc)
    fiber_cone = _int(data.get('fiber_cone', 0), 'fiber_cone', doc)
    base_cone = _int(data.get('base_cone', 0), 'base_cone', doc)
    if doc.kind == BUNDLE:
        return build_fibration(fiber, base, twist, fiber_cone, base_cone, _name(doc))
    total = fan_from_document(_resolve(data['total'], doc, 'total'))
    bundle = FibrationBundle(
        fiber=fiber,
        base=base,
        twist=twist,
        total=total,
        fiber_cone=fiber_cone,
        base_cone=base_cone,
        fiber_rays=_int_list(data['fiber_rays'], 'fiber_rays', doc),
        base_rays=_int_list(data['base_rays'], 'base_rays', doc),
        total_cone=_int(data['total_cone'], 'total_cone', doc),
    )
    _check_fibration(bundle, doc)
    return bundle


def _check_fibration(bundle: FibrationBundle, doc: Document):
    try:
        for part in (bundle.fiber, bundle.base, bundle.total):
            part.require_valid()
    except FanValidationError as e:
        raise FormatError(str(e), doc.source) from e
    rays = sorted(bundle.fiber_rays + bundle.base_rays)
    if rays != list(range(bundle.total.n_rays)):
        raise FormatError("fiber_rays and base_rays must partition the total rays", doc.source)
    if len(bundle.fiber_rays) != bundle.fiber.n_rays or len(bundle.base_rays) != bundle.base.n_rays:
        raise FormatError("ray maps do not match the fiber and base fans", doc.source)
    for label, part, cone in (('fiber_cone', bundle.fiber, bundle.fiber_cone),
                              ('base_cone', bundle.base, bundle.base_cone)):
        if not 0 <= cone < len(part.max_cones):
            raise FormatError(f"{label} {cone} is not a maximal cone", doc.source)
    if len(bundle.twist) != bundle.fiber.rank or any(
        len(row) != len(bundle.base_pic.free_rays) for row in bundle.twist
    ):
        raise FormatError("twist has the wrong shape", doc.source)
    if not 0 <= bundle.total_cone < len(bundle.total.max_cones):
        raise FormatError(f"total_cone {bundle.total_cone} is not a maximal cone", doc.source)
    try:
        check_bundle(bundle)
    except FibrationError as e:
        raise FormatError(f"fibration does not describe its total fan: {e}", doc.source) from e


def divisor_from_document(doc: Document, fan: Fan | None = None) -> TDivisor:
    _expect(doc, DIVISOR)
    fan = fan or fan_from_document(_resolve(doc.data['fan'], doc, 'fan'))
    coeffs = _int_list(doc.data['coeffs'], 'coeffs', doc)
    if len(coeffs) != fan.n_rays:
        raise FormatError(f"divisor has {len(coeffs)} coefficients, fan has {fan.n_rays} rays", doc.source)
    return fan.divisor(coeffs)


def collection_from_document(doc: Document, fan: Fan | None = None) -> OrderedCollection:
    _expect(doc, COLLECTION)
    fan = fan or fan_from_document(_resolve(doc.data['fan'], doc, 'fan'))
    rows = _int_matrix(doc.data['divisors'], 'divisors', doc)
    for position, row in enumerate(rows):
        if len(row) != fan.n_rays:
            raise FormatError(
                f"divisor {position} has {len(row)} coefficients, fan has {fan.n_rays} rays", doc.source
            )
    return OrderedCollection.of(fan, rows)


def read_fan(path: str) -> Fan:
    return fan_from_document(load_document(path))


def read_bundle(path: str) -> FibrationBundle:
    return bundle_from_document(load_document(path))


def read_divisor(path: str, fan: Fan | None = None) -> TDivisor:
    return divisor_from_document(load_document(path), fan)


def read_collection(path: str, fan: Fan | None = None) -> OrderedCollection:
    return collection_from_document(load_document(path), fan)


# Writers
def fan_to_dict(fan: Fan) -> dict:
    doc = {'format': header(FAN)}
    if fan.name:
        doc['name'] = fan.name
    doc.update({
        'rank': fan.rank,
        'rays': [list(ray) for ray in fan.rays],
        'max_cones': [list(cone) for cone in fan.max_cones],
    })
    return doc


def divisor_to_dict(divisor: TDivisor) -> dict:
    return {
        'format': header(DIVISOR),
        'fan': fan_to_dict(divisor.fan),
        'coeffs': list(divisor.coeffs),
    }


def bundle_to_dict(bundle: FibrationBundle) -> dict:
    """The fibration document, carrying the assembled total fan and ray maps."""
    doc = {'format': header(FIBRATION)}
    if bundle.total.name:
        doc['name'] = bundle.total.name
    doc.update({
        'fiber': fan_to_dict(bundle.fiber),
        'base': fan_to_dict(bundle.base),
        'twist': [list(row) for row in bundle.twist],
        'fiber_cone': bundle.fiber_cone,
        'base_cone': bundle.base_cone,
        'total': fan_to_dict(bundle.total),
        'fiber_rays': list(bundle.fiber_rays),
        'base_rays': list(bundle.base_rays),
        'total_cone': bundle.total_cone,
    })
    return doc


def collection_to_dict(collection: OrderedCollection, name: str = '') -> dict:
    doc = {'format': header(COLLECTION)}
    if name:
        doc['name'] = name
    doc.update({
        'fan': fan_to_dict(collection.fan),
        'divisors': [list(d.coeffs) for d in collection],
    })
    return doc


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2)
