"""Fold-based discount significance classification.

A sale record is judged against the price band *predicted from its features*,
not the band of its listed price. A sale price landing in a strictly lower
band is the cross-class verdict (default "EXCELLENT"). Otherwise the discount
amount is bucketed into folds of width k * sigma, where sigma is the standard
deviation of original prices in the predicted band: fold n covers
[n*k*sigma, (n+1)*k*sigma) and maps through fold_names, with the last name
absorbing all higher folds. Defaults (k = 1/2, POOR/ACCEPTABLE/GOOD) give
[0, sigma/2) -> POOR, [sigma/2, sigma) -> ACCEPTABLE, [sigma, inf) -> GOOD.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

from .catalog import CommodityRecord, Dataset
from .errors import ConfigError, ContractError, DataError
from .pricebands import PriceBandSpec, PriceBandStats, assign_band
from .svm import MulticlassSvmModel, predict_band

__all__ = [
    "SignificancePolicy",
    "SignificanceVerdict",
    "default_policy",
    "load_policy",
    "fold_index",
    "classify_discount",
    "classify_dataset",
]

# anomaly flags
NEGATIVE_DISCOUNT = "negative_discount"
SALE_BAND_ABOVE_PREDICTED = "sale_band_above_predicted"
DEGENERATE_SD = "degenerate_sd"
BAND_MISMATCH = "predicted_vs_listed_band_mismatch"


@dataclass(frozen=True)
class SignificancePolicy:
    k: float = 0.5
    fold_names: tuple[str, ...] = ("POOR", "ACCEPTABLE", "GOOD")
    cross_class_name: str = "EXCELLENT"
    graded_cross_class: bool = False

    def __post_init__(self):
        if not (0.0 < self.k <= 1.0):
            raise ConfigError(f"k must be in (0, 1], got {self.k}")
        if not self.fold_names:
            raise ConfigError("fold_names must be non-empty")

    @property
    def class_names(self) -> tuple[str, ...]:
        """Report column order: cross class first, then folds best-to-worst."""
        return (self.cross_class_name,) + tuple(reversed(self.fold_names))


@dataclass(frozen=True)
class SignificanceVerdict:
    id: str
    predicted_band: str
    sale_price_band: str
    discount: float
    fold: Optional[int]  # None marks the cross-class (infinite-fold) case
    x_levels: int  # bands dropped; 0 when same band or above
    class_name: str
    anomalies: frozenset[str] = field(default_factory=frozenset)


def default_policy() -> SignificancePolicy:
    return SignificancePolicy()


def load_policy(path) -> SignificancePolicy:
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    try:
        return SignificancePolicy(
            k=float(raw.get("k", 0.5)),
            fold_names=tuple(raw.get("fold_names", ("POOR", "ACCEPTABLE", "GOOD"))),
            cross_class_name=str(raw.get("cross_class_name", "EXCELLENT")),
            graded_cross_class=bool(raw.get("graded_cross_class", False)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad policy file {path}: {exc}") from exc


def fold_index(k: float, sigma: float, discount: float) -> int:
    """The unique n with n*k*sigma <= discount < (n+1)*k*sigma."""
    if sigma <= 0:
        raise ContractError("fold_index needs sigma > 0")
    if discount < 0:
        raise ContractError("fold_index needs a non-negative discount")
    return math.floor(discount / (k * sigma))


def classify_discount(
    policy: SignificancePolicy,
    bands: PriceBandSpec,
    stats: PriceBandStats,
    model: MulticlassSvmModel,
    rec: CommodityRecord,
) -> SignificanceVerdict:
    """Verdict for one sale record."""
    if rec.sale_price is None:
        raise ContractError(f"record {rec.id!r} has no sale_price")
    if tuple(model.class_names) != tuple(bands.names):
        raise ConfigError("model class names do not match the band spec")
    if stats.spec != bands:
        raise ConfigError("stats were computed from a different band spec")

    predicted = predict_band(model, rec.features)
    sale_band = assign_band(bands, rec.sale_price)
    discount = rec.original_price - rec.sale_price
    pred_idx = bands.index_of(predicted)
    sale_idx = bands.index_of(sale_band)

    anomalies = set()
    if assign_band(bands, rec.original_price) != predicted:
        anomalies.add(BAND_MISMATCH)

    if sale_idx < pred_idx:
        return SignificanceVerdict(
            id=rec.id,
            predicted_band=predicted,
            sale_price_band=sale_band,
            discount=discount,
            fold=None,
            x_levels=pred_idx - sale_idx,
            class_name=policy.cross_class_name,
            anomalies=frozenset(anomalies),
        )

    if sale_idx > pred_idx:
        anomalies.add(SALE_BAND_ABOVE_PREDICTED)

    sigma = stats.sd(predicted)
    last = len(policy.fold_names) - 1
    if discount < 0:
        anomalies.add(NEGATIVE_DISCOUNT)
        fold = 0
    elif sigma == 0:
        anomalies.add(DEGENERATE_SD)
        fold = last if discount > 0 else 0
    else:
        fold = fold_index(policy.k, sigma, discount)

    return SignificanceVerdict(
        id=rec.id,
        predicted_band=predicted,
        sale_price_band=sale_band,
        discount=discount,
        fold=fold,
        x_levels=0,
        class_name=policy.fold_names[min(fold, last)],
        anomalies=frozenset(anomalies),
    )


def classify_dataset(
    policy: SignificancePolicy,
    bands: PriceBandSpec,
    stats: PriceBandStats,
    model: MulticlassSvmModel,
    ds: Dataset,
) -> tuple[list[SignificanceVerdict], list[tuple[str, str]]]:
    """Verdicts in input order, plus (id, reason) rejects; nothing silently dropped."""
    verdicts = []
    rejects = []
    for rec in ds.records:
        try:
            verdicts.append(classify_discount(policy, bands, stats, model, rec))
        except (ContractError, DataError) as exc:
            rejects.append((rec.id, str(exc)))
    return verdicts, rejects
