"""Seeded synthetic catalog generator.

Stands in for the unpublished crawled dataset: features are drawn from
band-conditional ranges that grow with the band, so they genuinely predict
the band, and sale prices apply a discount distribution in which big
band-dropping discounts are rare.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .catalog import CommodityRecord, Dataset, FeatureVector
from .errors import ConfigError
from .pricebands import PriceBandSpec, default_band_spec

__all__ = ["SynthConfig", "DEFAULT_BAND_COUNTS", "generate_catalogs"]

DEFAULT_BAND_COUNTS = (426, 204, 76, 27)

# per-band (low, high) feature ranges, indexed by band position
_FEATURE_RANGES = {
    "ram": [(1, 3), (3, 6), (6, 9), (8, 16)],
    "storage": [(8, 32), (32, 96), (96, 192), (192, 512)],
    "front_camera": [(0, 5), (5, 13), (13, 25), (25, 48)],
    "back_camera": [(2, 10), (10, 24), (24, 56), (56, 110)],
    "battery": [(1500, 3000), (2800, 4000), (3800, 4600), (4400, 5500)],
}
_PRICE_CAP_LAST_BAND = 90000.0
_BIG_DISCOUNT_PROB = 0.02
_SMALL_DISCOUNT_MAX_FRACTION = 0.12


@dataclass(frozen=True)
class SynthConfig:
    seed: int = 42
    band_counts: tuple[int, ...] = DEFAULT_BAND_COUNTS


def _draw_price(rng: random.Random, lower: float, upper: float) -> float:
    return float(int(rng.uniform(max(lower, 100.0), upper)))


def generate_catalogs(
    cfg: SynthConfig, bands: PriceBandSpec | None = None
) -> tuple[Dataset, Dataset]:
    """(non-sale, sale) datasets; identical records except sale_price."""
    spec = bands if bands is not None else default_band_spec()
    if len(cfg.band_counts) != len(spec.bands):
        raise ConfigError(
            f"{len(cfg.band_counts)} band counts given for {len(spec.bands)} bands"
        )
    if len(_FEATURE_RANGES["ram"]) < len(spec.bands):
        raise ConfigError("synthetic feature ranges support at most 4 bands")

    rng = random.Random(cfg.seed)
    nonsale = []
    sale = []
    serial = 0
    for band_idx, (band, count) in enumerate(zip(spec.bands, cfg.band_counts)):
        upper = band.upper if band.upper != float("inf") else _PRICE_CAP_LAST_BAND
        for _ in range(count):
            serial += 1
            features = FeatureVector(
                ram=round(rng.uniform(*_FEATURE_RANGES["ram"][band_idx]), 1),
                storage=float(int(rng.uniform(*_FEATURE_RANGES["storage"][band_idx]))),
                front_camera=round(rng.uniform(*_FEATURE_RANGES["front_camera"][band_idx]), 1),
                back_camera=round(rng.uniform(*_FEATURE_RANGES["back_camera"][band_idx]), 1),
                battery=float(int(rng.uniform(*_FEATURE_RANGES["battery"][band_idx]))),
            )
            price = _draw_price(rng, band.lower, upper)

            if band_idx > 0 and rng.random() < _BIG_DISCOUNT_PROB:
                # rare band-dropping deal: sale price lands 1-2 bands lower
                drop = rng.randint(1, min(2, band_idx))
                target = spec.bands[band_idx - drop]
                t_upper = target.upper if target.upper != float("inf") else _PRICE_CAP_LAST_BAND
                sale_price = _draw_price(rng, target.lower, t_upper)
            else:
                discount = price * rng.uniform(0.0, _SMALL_DISCOUNT_MAX_FRACTION)
                sale_price = max(1.0, float(int(price - discount)))

            rid = f"p{serial:04d}"
            name = f"Phone {serial:04d}"
            rec = CommodityRecord(rid, name, features, price, None)
            nonsale.append(rec)
            sale.append(CommodityRecord(rid, name, features, price, sale_price))

    return (
        Dataset(tuple(nonsale), provenance=f"synthetic seed={cfg.seed} (non-sale)"),
        Dataset(tuple(sale), provenance=f"synthetic seed={cfg.seed} (sale)"),
    )
