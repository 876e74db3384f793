import math

import pytest

from photonic_rnn.arch import AcceleratorConfig, simulate
from photonic_rnn.compare import BaselineRecord, compare, comparison_to_csv, load_baselines
from photonic_rnn.errors import ParseError
from photonic_rnn.workload import LayerSpec, ModelSpec

CFG = AcceleratorConfig(15, 15, 40, 10)


@pytest.fixture
def reports(toy_models):
    return [simulate(ModelSpec(m.name, m.layers, m.name.upper()), CFG) for m in toy_models]


def _baseline_from(report, name="B", epb_scale=1.0, gops_scale=1.0):
    return BaselineRecord(name, report.model_tag, report.epb * 1e12 * epb_scale, report.gops * gops_scale)


def test_identity_ratios(reports):
    result = compare([_baseline_from(r) for r in reports], reports)
    for row in result.rows:
        assert row.epb_ratio == pytest.approx(1.0, rel=1e-12)
        assert row.gops_ratio == pytest.approx(1.0, rel=1e-12)


def test_scaled_ratios(reports):
    result = compare([_baseline_from(r, epb_scale=7.5, gops_scale=0.25) for r in reports], reports)
    for row in result.rows:
        assert row.epb_ratio == pytest.approx(7.5, rel=1e-12)
        assert row.gops_ratio == pytest.approx(4.0, rel=1e-12)


def test_geomeans(reports):
    bases = [_baseline_from(reports[0], "A", 2.0, 1.0), _baseline_from(reports[1], "A", 8.0, 0.5),
             _baseline_from(reports[2], "B", 3.0, 0.1)]
    gm = compare(bases, reports).geomeans()
    assert list(gm) == ["A", "B", "ALL"]
    assert gm["A"][0] == pytest.approx(4.0, rel=1e-12)
    assert gm["A"][1] == pytest.approx(math.sqrt(2.0), rel=1e-12)
    assert gm["ALL"][0] == pytest.approx((2 * 8 * 3) ** (1 / 3), rel=1e-12)
    assert gm["ALL"][1] == pytest.approx((1 * 2 * 10) ** (1 / 3), rel=1e-12)


def test_unmatched_tags_skipped(reports):
    result = compare([_baseline_from(reports[0]), BaselineRecord("Z", "NOPE", 1.0, 1.0)], reports)
    assert len(result.rows) == 1
    assert [b.model_tag for b in result.skipped] == ["NOPE"]


def test_csv(reports):
    text = comparison_to_csv(compare([_baseline_from(r) for r in reports], reports))
    lines = text.splitlines()
    assert lines[0].startswith("name,model_tag,")
    assert lines[-1].startswith("ALL,geomean,")


def test_needs_reports():
    with pytest.raises(ValueError):
        compare([BaselineRecord("A", "T", 1.0, 1.0)], [])


def test_invalid_record():
    with pytest.raises(ValueError):
        BaselineRecord("A", "T", 0.0, 1.0)


def test_load_baselines(data_dir, tmp_path):
    records = load_baselines(data_dir / "baselines_template.csv")
    assert records[0].epb == pytest.approx(1e-9)
    bad = tmp_path / "b.csv"
    bad.write_text("name,model_tag,epb_pj_per_bit,gops\nA,T,1,2\nB,T,x,2\n")
    with pytest.raises(ParseError) as err:
        load_baselines(bad)
    assert err.value.line == 3
    bad.write_text("name,gops\nA,2\n")
    with pytest.raises(ParseError, match="missing column"):
        load_baselines(bad)
