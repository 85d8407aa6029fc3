import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import IBALL, LG
from salegauge import (
    CommodityRecord,
    ConfigError,
    ContractError,
    Dataset,
    FeatureVector,
    SignificancePolicy,
    classify_dataset,
    classify_discount,
    default_policy,
)
from salegauge.pricebands import BandRow, PriceBandStats
from salegauge.significance import (
    BAND_MISMATCH,
    DEGENERATE_SD,
    NEGATIVE_DISCOUNT,
    SALE_BAND_ABOVE_PREDICTED,
    fold_index,
    load_policy,
)


def table2_class(discount, sigma):
    """Literal transcription of the default three-range nomenclature."""
    if 0 <= discount < sigma / 2:
        return "POOR"
    if sigma / 2 <= discount < sigma:
        return "ACCEPTABLE"
    return "GOOD"  # discount >= sigma; boundary assigned to the upper range


def _low_record(rid, original, sale, features=(2, 16, 0, 5, 2800)):
    return CommodityRecord(rid, rid, FeatureVector(*features), float(original), float(sale))


class TestWorkedExamples:
    def test_iball_acceptable(self, bands, published_stats, worked_model):
        v = classify_discount(default_policy(), bands, published_stats, worked_model, IBALL)
        assert v.predicted_band == "LOW"
        assert v.sale_price_band == "LOW"
        assert v.discount == pytest.approx(650.0)
        assert v.fold == 1
        assert v.class_name == "ACCEPTABLE"

    def test_lg_excellent(self, bands, published_stats, worked_model):
        v = classify_discount(default_policy(), bands, published_stats, worked_model, LG)
        assert v.predicted_band == "PREMIUM"
        assert v.sale_price_band == "BUDGET"
        assert v.class_name == "EXCELLENT"
        assert v.fold is None
        assert v.x_levels == 2

    def test_dataset_of_both(self, bands, published_stats, worked_model):
        verdicts, rejects = classify_dataset(
            default_policy(), bands, published_stats, worked_model, Dataset((IBALL, LG))
        )
        assert [v.class_name for v in verdicts] == ["ACCEPTABLE", "EXCELLENT"]
        assert rejects == []


class TestFoldRule:
    def test_zero_discount_is_poor(self, bands, published_stats, worked_model):
        rec = _low_record("z", 4399, 4399)
        v = classify_discount(default_policy(), bands, published_stats, worked_model, rec)
        assert v.class_name == "POOR" and v.fold == 0

    def test_discount_exactly_sigma_is_good(self, bands, published_stats, worked_model):
        sigma = published_stats.sd("LOW")
        rec = _low_record("s", 4399, 4399 - sigma)
        v = classify_discount(default_policy(), bands, published_stats, worked_model, rec)
        assert v.class_name == "GOOD" and v.fold == 2

    def test_low_can_never_be_excellent(self, bands, published_stats, worked_model):
        # any sale price of a predicted-LOW phone still lands in LOW
        for sale in (1.0, 100.0, 2500.0, 4398.0):
            v = classify_discount(
                default_policy(), bands, published_stats, worked_model,
                _low_record(f"p{sale}", 4399, sale),
            )
            assert v.class_name != "EXCELLENT"

    def test_fold_index_partition(self):
        # [n*k*sigma, (n+1)*k*sigma) intervals tile [0, inf)
        k, sigma = 0.5, 100.0
        for d in [0, 49.9, 50, 99.9, 100, 1234.5]:
            n = fold_index(k, sigma, d)
            assert n * k * sigma <= d < (n + 1) * k * sigma


class TestAnomalies:
    def test_negative_discount(self, bands, published_stats, worked_model):
        v = classify_discount(
            default_policy(), bands, published_stats, worked_model,
            _low_record("n", 4399, 4500),
        )
        assert v.class_name == "POOR"
        assert NEGATIVE_DISCOUNT in v.anomalies

    def test_degenerate_sd(self, bands, worked_model):
        rows = tuple(BandRow(name, 1, 100.0, 0.0) for name in bands.names)
        degenerate = PriceBandStats(bands, rows)
        pos = classify_discount(
            default_policy(), bands, degenerate, worked_model, _low_record("d", 4399, 4000)
        )
        assert pos.class_name == "GOOD" and DEGENERATE_SD in pos.anomalies
        zero = classify_discount(
            default_policy(), bands, degenerate, worked_model, _low_record("e", 4399, 4399)
        )
        assert zero.class_name == "POOR" and DEGENERATE_SD in zero.anomalies

    def test_sale_band_above_predicted(self, bands, published_stats, worked_model):
        # LOW-featured phone listed and sold above the predicted band
        rec = _low_record("a", 9000, 8900)
        v = classify_discount(default_policy(), bands, published_stats, worked_model, rec)
        assert v.predicted_band == "LOW"
        assert SALE_BAND_ABOVE_PREDICTED in v.anomalies
        assert BAND_MISMATCH in v.anomalies
        assert v.class_name in ("POOR", "ACCEPTABLE", "GOOD")

    def test_missing_sale_price(self, bands, published_stats, worked_model):
        rec = CommodityRecord("m", "m", IBALL.features, 4399.0, None)
        with pytest.raises(ContractError):
            classify_discount(default_policy(), bands, published_stats, worked_model, rec)


class TestClassifyDataset:
    def test_empty(self, bands, published_stats, worked_model):
        verdicts, rejects = classify_dataset(
            default_policy(), bands, published_stats, worked_model, Dataset(())
        )
        assert verdicts == [] and rejects == []

    def test_rejects_not_dropped(self, bands, published_stats, worked_model):
        bad = CommodityRecord("bad", "bad", IBALL.features, 4399.0, None)
        verdicts, rejects = classify_dataset(
            default_policy(), bands, published_stats, worked_model, Dataset((IBALL, bad, LG))
        )
        assert [v.id for v in verdicts] == ["iball", "lg"]
        assert len(rejects) == 1 and rejects[0][0] == "bad"


class TestProperties:
    @given(
        st.floats(min_value=0, max_value=1e6),
        st.floats(min_value=1e-3, max_value=1e5),
    )
    @settings(max_examples=200)
    def test_table2_equivalence(self, discount, sigma):
        policy = default_policy()
        n = fold_index(policy.k, sigma, discount)
        name = policy.fold_names[min(n, len(policy.fold_names) - 1)]
        assert name == table2_class(discount, sigma)

    @given(
        st.floats(min_value=1e-3, max_value=1e5),
        st.floats(min_value=0, max_value=1e6),
        st.floats(min_value=0, max_value=1e6),
    )
    @settings(max_examples=100)
    def test_fold_monotone_in_discount(self, sigma, d1, d2):
        lo, hi = sorted((d1, d2))
        assert fold_index(0.5, sigma, lo) <= fold_index(0.5, sigma, hi)

    @given(
        st.floats(min_value=1e-3, max_value=1e5),
        st.floats(min_value=0, max_value=1e6),
        st.floats(min_value=0.01, max_value=0.5),
    )
    @settings(max_examples=100)
    def test_halving_k_never_decreases_fold(self, sigma, discount, k):
        assert fold_index(k / 2, sigma, discount) >= fold_index(k, sigma, discount)

    def test_cross_class_dominates_any_discount(self, bands, published_stats, worked_model):
        # tiny discounts still classify EXCELLENT once the band drops
        rec = CommodityRecord("c", "c", LG.features, 60000.0, 29999.0)
        v = classify_discount(default_policy(), bands, published_stats, worked_model, rec)
        assert v.class_name == "EXCELLENT" and v.x_levels == 1


class TestPolicy:
    def test_defaults(self):
        p = default_policy()
        assert p.k == 0.5
        assert p.fold_names == ("POOR", "ACCEPTABLE", "GOOD")
        assert p.cross_class_name == "EXCELLENT"
        assert p.class_names == ("EXCELLENT", "GOOD", "ACCEPTABLE", "POOR")

    def test_k_bounds(self):
        with pytest.raises(ConfigError):
            SignificancePolicy(k=0.0)
        with pytest.raises(ConfigError):
            SignificancePolicy(k=1.5)
        with pytest.raises(ConfigError):
            SignificancePolicy(fold_names=())

    def test_load_policy(self, tmp_path):
        path = tmp_path / "policy.json"
        path.write_text('{"k": 0.25, "fold_names": ["BAD", "OK"], "cross_class_name": "WOW"}')
        p = load_policy(path)
        assert p.k == 0.25 and p.fold_names == ("BAD", "OK") and p.cross_class_name == "WOW"

    def test_mismatched_model_rejected(self, bands, published_stats, worked_model):
        other = PriceBandStats(
            bands, tuple(BandRow(n, 1, 50.0, 1.0) for n in bands.names)
        )
        # stats spec matches, so this passes; a different spec must not
        spec2 = type(bands)(bands.bands[:2] + (type(bands.bands[0])("TOP", 15000.0, math.inf),))
        stats2 = PriceBandStats(spec2, tuple(BandRow(n, 1, 50.0, 1.0) for n in spec2.names))
        with pytest.raises(ConfigError):
            classify_discount(default_policy(), bands, stats2, worked_model, IBALL)


def test_independent_straight_line_oracle(bands, published_stats, worked_model):
    """Recount classes with a literal reimplementation of the nomenclature rules
    applied to the model's own band predictions."""
    from salegauge.svm import predict_band

    records = [
        IBALL, LG,
        _low_record("r1", 4900, 4800),
        _low_record("r2", 4000, 1500),
        CommodityRecord("r3", "r3", LG.features, 60000.0, 58000.0),
    ]
    verdicts, _ = classify_dataset(
        default_policy(), bands, published_stats, worked_model, Dataset(tuple(records))
    )
    for rec, verdict in zip(records, verdicts):
        predicted = predict_band(worked_model, rec.features)
        from salegauge.pricebands import assign_band

        if bands.index_of(assign_band(bands, rec.sale_price)) < bands.index_of(predicted):
            expected = "EXCELLENT"
        else:
            expected = table2_class(
                rec.original_price - rec.sale_price, published_stats.sd(predicted)
            )
        assert verdict.class_name == expected
