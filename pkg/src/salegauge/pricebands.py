"""Ordered disjoint price bands, band assignment, and per-band statistics."""

from __future__ import annotations

import json
import math
import statistics
from dataclasses import dataclass
from typing import Optional

from .errors import BandAssignmentError, ConfigError

__all__ = [
    "PriceBand",
    "PriceBandSpec",
    "BandRow",
    "PriceBandStats",
    "default_band_spec",
    "assign_band",
    "band_stats",
    "load_band_spec",
    "save_band_spec",
    "load_stats",
    "save_stats",
]


@dataclass(frozen=True)
class PriceBand:
    name: str
    lower: float  # inclusive
    upper: float  # exclusive; math.inf for the last band


@dataclass(frozen=True)
class PriceBandSpec:
    """Contiguous, disjoint, ascending half-open price intervals."""

    bands: tuple[PriceBand, ...]

    def __post_init__(self):
        if len(self.bands) < 2:
            raise ConfigError("band spec needs at least 2 bands")
        names = [b.name for b in self.bands]
        if len(set(names)) != len(names):
            raise ConfigError("band names must be unique")
        for b in self.bands:
            if not (b.lower < b.upper):
                raise ConfigError(f"band {b.name!r}: lower must be < upper")
        if self.bands[0].lower < 0:
            raise ConfigError("first band lower must be >= 0")
        for prev, cur in zip(self.bands, self.bands[1:]):
            if cur.lower != prev.upper:
                raise ConfigError(
                    f"bands {prev.name!r} and {cur.name!r} are not contiguous"
                )
        if not math.isinf(self.bands[-1].upper):
            raise ConfigError("last band must be unbounded above")

    @property
    def names(self) -> list[str]:
        return [b.name for b in self.bands]

    def index_of(self, name: str) -> int:
        for i, b in enumerate(self.bands):
            if b.name == name:
                return i
        raise ConfigError(f"unknown band {name!r}")


@dataclass(frozen=True)
class BandRow:
    name: str
    count: int
    mean: Optional[float]  # None when the band is empty
    sd: float  # sample sd (n-1 divisor); 0 when count <= 1


@dataclass(frozen=True)
class PriceBandStats:
    spec: PriceBandSpec
    rows: tuple[BandRow, ...]

    def __post_init__(self):
        if [r.name for r in self.rows] != self.spec.names:
            raise ConfigError("stats rows must match band spec order")

    def row(self, name: str) -> BandRow:
        return self.rows[self.spec.index_of(name)]

    def sd(self, name: str) -> float:
        return self.row(name).sd

    @property
    def total(self) -> int:
        return sum(r.count for r in self.rows)


def default_band_spec() -> PriceBandSpec:
    """Four-band phone-price grouping: LOW/BUDGET/MID RANGE/PREMIUM."""
    eps = math.ulp(0.0)  # smallest positive price; the LOW interval is open at 0
    return PriceBandSpec(
        (
            PriceBand("LOW", eps, 5000.0),
            PriceBand("BUDGET", 5000.0, 15000.0),
            PriceBand("MID RANGE", 15000.0, 30000.0),
            PriceBand("PREMIUM", 30000.0, math.inf),
        )
    )


def assign_band(spec: PriceBandSpec, price: float) -> str:
    """Name of the unique band whose [lower, upper) contains price."""
    if price is None or not math.isfinite(price) or price <= 0:
        raise BandAssignmentError(f"price must be a positive finite number, got {price!r}")
    if price < spec.bands[0].lower:
        raise BandAssignmentError(
            f"price {price} is below the first band ({spec.bands[0].name!r})"
        )
    for b in spec.bands:
        if b.lower <= price < b.upper:
            return b.name
    raise BandAssignmentError(f"price {price} not covered by any band")  # pragma: no cover


def band_stats(spec: PriceBandSpec, ds) -> PriceBandStats:
    """Count/mean/sample-sd of original (non-sale) prices per band."""
    buckets: dict[str, list[float]] = {name: [] for name in spec.names}
    for rec in ds.records:
        buckets[assign_band(spec, rec.original_price)].append(rec.original_price)
    rows = []
    for name in spec.names:
        prices = buckets[name]
        n = len(prices)
        mean = statistics.fmean(prices) if n else None
        sd = statistics.stdev(prices) if n > 1 else 0.0
        rows.append(BandRow(name, n, mean, sd))
    return PriceBandStats(spec, tuple(rows))


def load_band_spec(path) -> PriceBandSpec:
    """Band spec from a JSON list of {name, lower, upper|null for infinity}."""
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, list):
        raise ConfigError("band spec file must be a JSON list")
    bands = []
    for entry in raw:
        try:
            upper = entry["upper"]
            bands.append(
                PriceBand(
                    str(entry["name"]),
                    float(entry["lower"]),
                    math.inf if upper is None else float(upper),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad band entry {entry!r}: {exc}") from exc
    return PriceBandSpec(tuple(bands))


def save_stats(stats: PriceBandStats, path) -> None:
    """Stats file: band spec plus count/mean/sd rows, for later analyze runs."""
    doc = {
        "version": 1,
        "bands": [
            {
                "name": b.name,
                "lower": b.lower,
                "upper": None if math.isinf(b.upper) else b.upper,
                "count": r.count,
                "mean": r.mean,
                "sd": r.sd,
            }
            for b, r in zip(stats.spec.bands, stats.rows)
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_stats(path) -> PriceBandStats:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    try:
        if doc["version"] != 1:
            raise ConfigError(f"unsupported stats file version {doc['version']}")
        bands = []
        rows = []
        for entry in doc["bands"]:
            upper = entry["upper"]
            bands.append(
                PriceBand(
                    str(entry["name"]),
                    float(entry["lower"]),
                    math.inf if upper is None else float(upper),
                )
            )
            mean = entry["mean"]
            rows.append(
                BandRow(
                    str(entry["name"]),
                    int(entry["count"]),
                    None if mean is None else float(mean),
                    float(entry["sd"]),
                )
            )
        return PriceBandStats(PriceBandSpec(tuple(bands)), tuple(rows))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad stats file {path}: {exc}") from exc


def save_band_spec(spec: PriceBandSpec, path) -> None:
    doc = [
        {"name": b.name, "lower": b.lower, "upper": None if math.isinf(b.upper) else b.upper}
        for b in spec.bands
    ]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
