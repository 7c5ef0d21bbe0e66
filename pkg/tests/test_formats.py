import json

import pytest

import catalog
import formats
from errors import FormatError
from fibration import build_fibration, verify_fibration


def _reparse(doc):
    return formats.parse_document(formats.dumps(doc))


class TestRoundTrips:
    @pytest.mark.parametrize('n', [1, 2, 3])
    def test_fan(self, n):
        fan = catalog.projective_space(n)
        loaded = formats.fan_from_document(_reparse(formats.fan_to_dict(fan)))
        assert loaded == fan
        assert loaded.name == fan.name

    def test_divisor(self, p2):
        divisor = p2.divisor((1, -2, 3))
        assert formats.divisor_from_document(_reparse(formats.divisor_to_dict(divisor))) == divisor

    def test_bundle(self):
        bundle = catalog.p1_bundle_over_p2(2)
        loaded = formats.bundle_from_document(_reparse(formats.bundle_to_dict(bundle)))
        assert loaded == bundle
        assert loaded.twist == ((2,),)

    def test_collection(self):
        entry = catalog.load('product', 1, 1)
        doc = formats.collection_to_dict(entry.collection, 'box')
        assert doc['name'] == 'box'
        assert formats.collection_from_document(_reparse(doc)) == entry.collection


class TestDocuments:
    def test_header(self):
        assert formats.header(formats.FAN) == 'toric-fan/1'

    def test_unknown_field(self, p1):
        doc = formats.fan_to_dict(p1)
        doc['colour'] = 'blue'
        with pytest.raises(FormatError, match='colour'):
            _reparse(doc)

    def test_missing_field(self, p1):
        doc = formats.fan_to_dict(p1)
        del doc['rays']
        with pytest.raises(FormatError, match='rays'):
            _reparse(doc)

    def test_unsupported_version(self, p1):
        doc = formats.fan_to_dict(p1)
        doc['format'] = 'toric-fan/2'
        with pytest.raises(FormatError, match='version'):
            _reparse(doc)

    def test_unknown_kind(self):
        with pytest.raises(FormatError, match='unknown document format'):
            formats.parse_document('{"format": "toric-polytope/1"}')

    def test_invalid_json_reports_position(self):
        text = '{\n  "format": "toric-fan/1",\n  "rank": 2,,\n}'
        with pytest.raises(FormatError) as excinfo:
            formats.parse_document(text, 'broken.json')
        assert excinfo.value.line == 3
        assert str(excinfo.value).startswith('broken.json:3:')

    def test_non_integer_entries(self, p1):
        doc = formats.fan_to_dict(p1)
        doc['rays'] = [[1], ['x']]
        with pytest.raises(FormatError, match='integer'):
            formats.fan_from_document(_reparse(doc))

    def test_wrong_kind(self, p1):
        with pytest.raises(FormatError, match='expected'):
            formats.divisor_from_document(_reparse(formats.fan_to_dict(p1)))

    def test_divisor_length_checked(self, p2):
        doc = formats.divisor_to_dict(p2.zero_divisor())
        doc['coeffs'] = [0, 0]
        with pytest.raises(FormatError, match='3 rays'):
            formats.divisor_from_document(_reparse(doc))


class TestReferences:
    def test_relative_path(self, tmp_path, p2):
        (tmp_path / 'shapes').mkdir()
        (tmp_path / 'shapes' / 'p2.json').write_text(formats.dumps(formats.fan_to_dict(p2)))
        divisor_doc = {'format': 'toric-divisor/1', 'fan': 'shapes/p2.json', 'coeffs': [0, 0, 2]}
        path = tmp_path / 'o2.json'
        path.write_text(json.dumps(divisor_doc))
        divisor = formats.read_divisor(str(path))
        assert divisor.fan == p2
        assert divisor.coeffs == (0, 0, 2)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FormatError, match='cannot read'):
            formats.read_fan(str(tmp_path / 'nowhere.json'))

    def test_bundle_document_builds_total(self, p1):
        doc = {
            'format': 'toric-bundle/1',
            'name': 'F2',
            'fiber': formats.fan_to_dict(p1),
            'base': formats.fan_to_dict(p1),
            'twist': [[2]],
        }
        parsed = _reparse(doc)
        bundle = formats.bundle_from_document(parsed)
        assert bundle.total == catalog.hirzebruch(2).total
        assert formats.fan_from_document(parsed) == bundle.total

    def test_fibration_partition_checked(self):
        doc = formats.bundle_to_dict(catalog.hirzebruch(1))
        doc['base_rays'] = [2, 2]
        with pytest.raises(FormatError, match='partition'):
            formats.bundle_from_document(_reparse(doc))

    def test_collection_on_referenced_fan(self, tmp_path, p2):
        (tmp_path / 'p2.json').write_text(formats.dumps(formats.fan_to_dict(p2)))
        path = tmp_path / 'beilinson.json'
        path.write_text(json.dumps({
            'format': 'toric-collection/1',
            'fan': 'p2.json',
            'divisors': [[0, 0, 0], [0, 0, 1], [0, 0, 2]],
        }))
        assert formats.read_collection(str(path)) == catalog.beilinson(p2)


class TestFibrationConsistency:
    def test_swapped_ray_maps_rejected(self):
        doc = formats.bundle_to_dict(catalog.hirzebruch(2))
        doc['fiber_rays'] = [2, 3]
        doc['base_rays'] = [0, 1]
        doc['twist'] = [[0]]
        with pytest.raises(FormatError, match='does not describe its total fan'):
            formats.bundle_from_document(_reparse(doc))

    def test_wrong_twist_rejected(self):
        doc = formats.bundle_to_dict(catalog.hirzebruch(2))
        doc['twist'] = [[1]]
        with pytest.raises(FormatError, match='twist'):
            formats.bundle_from_document(_reparse(doc))

    def test_base_cone_out_of_range(self):
        doc = formats.bundle_to_dict(catalog.hirzebruch(2))
        doc['base_cone'] = 5
        with pytest.raises(FormatError, match='base_cone'):
            formats.bundle_from_document(_reparse(doc))

    def test_recovered_fibration_loads(self):
        bundle = verify_fibration(catalog.hirzebruch(0).total, [2, 3])
        assert formats.bundle_from_document(_reparse(formats.bundle_to_dict(bundle))) == bundle

    def test_other_fiber_cone_loads(self, p1, p2):
        bundle = build_fibration(p2, p1, ((1,), (0,)), fiber_cone=1)
        loaded = formats.bundle_from_document(_reparse(formats.bundle_to_dict(bundle)))
        assert loaded.twist == ((1,), (0,))
        assert loaded.total_cone == bundle.total_cone
