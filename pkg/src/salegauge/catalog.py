"""Canonical product data model: CSV ingestion, cleaning, stratified splitting."""

from __future__ import annotations

import csv
import math
import random
from dataclasses import dataclass
from typing import Optional

from .errors import ContractError, ParseError, SchemaError
from .pricebands import PriceBandSpec, assign_band

__all__ = [
    "CSV_HEADER",
    "FeatureVector",
    "CommodityRecord",
    "Dataset",
    "CleanReport",
    "load_catalog_csv",
    "write_catalog_csv",
    "clean",
    "stratified_split",
]

CSV_HEADER = [
    "id",
    "name",
    "ram_gb",
    "storage_gb",
    "front_cam_mp",
    "back_cam_mp",
    "battery_mah",
    "original_price",
    "sale_price",
]


@dataclass(frozen=True)
class FeatureVector:
    """Phone hardware features. None marks a missing cell awaiting clean()."""

    ram: Optional[float]
    storage: Optional[float]
    front_camera: Optional[float]
    back_camera: Optional[float]
    battery: Optional[float]

    def as_tuple(self):
        return (self.ram, self.storage, self.front_camera, self.back_camera, self.battery)

    @property
    def is_complete(self) -> bool:
        return all(v is not None for v in self.as_tuple())


@dataclass(frozen=True)
class CommodityRecord:
    id: str
    name: str
    features: FeatureVector
    original_price: Optional[float]
    sale_price: Optional[float] = None


@dataclass(frozen=True)
class Dataset:
    records: tuple[CommodityRecord, ...]
    provenance: str = ""

    def __post_init__(self):
        ids = [r.id for r in self.records]
        if len(set(ids)) != len(ids):
            raise SchemaError("duplicate record ids in dataset")

    def __len__(self) -> int:
        return len(self.records)


@dataclass(frozen=True)
class CleanReport:
    input_count: int
    null_dropped: int
    dedup_dropped: int
    output_count: int

    def as_dict(self) -> dict:
        return {
            "input": self.input_count,
            "null_dropped": self.null_dropped,
            "dedup_dropped": self.dedup_dropped,
            "output": self.output_count,
        }


def _parse_cell(text: str, column: str, row_no: int, positive: bool = False) -> Optional[float]:
    text = text.strip()
    if text == "":
        return None
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"row {row_no}: column {column!r} is not numeric: {text!r}") from None
    if not math.isfinite(value):
        raise ParseError(f"row {row_no}: column {column!r} is not finite")
    if positive and value <= 0:
        raise ParseError(f"row {row_no}: column {column!r} must be > 0, got {value}")
    if not positive and value < 0:
        raise ParseError(f"row {row_no}: column {column!r} must be >= 0, got {value}")
    return value


def load_catalog_csv(path) -> Dataset:
    """Read a catalog CSV (schema CSV_HEADER) into a Dataset, keeping file order."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file, expected header row") from None
        if header != CSV_HEADER:
            missing = [c for c in CSV_HEADER if c not in header]
            extra = [c for c in header if c not in CSV_HEADER]
            raise SchemaError(
                f"{path}: bad header; missing columns {missing}, unexpected {extra}"
            )
        records = []
        for row_no, row in enumerate(reader, start=2):
            if len(row) != len(CSV_HEADER):
                raise SchemaError(f"{path}: row {row_no} has {len(row)} cells, expected {len(CSV_HEADER)}")
            rid, name = row[0], row[1]
            if not rid:
                raise ParseError(f"row {row_no}: empty id")
            features = FeatureVector(
                ram=_parse_cell(row[2], "ram_gb", row_no),
                storage=_parse_cell(row[3], "storage_gb", row_no),
                front_camera=_parse_cell(row[4], "front_cam_mp", row_no),
                back_camera=_parse_cell(row[5], "back_cam_mp", row_no),
                battery=_parse_cell(row[6], "battery_mah", row_no),
            )
            records.append(
                CommodityRecord(
                    id=rid,
                    name=name,
                    features=features,
                    original_price=_parse_cell(row[7], "original_price", row_no, positive=True),
                    sale_price=_parse_cell(row[8], "sale_price", row_no, positive=True),
                )
            )
    return Dataset(tuple(records), provenance=str(path))


def _fmt(value: Optional[float]) -> str:
    if value is None:
        return ""
    if value == int(value):
        return str(int(value))
    return repr(value)


def write_catalog_csv(ds: Dataset, path) -> None:
    """Write the catalog CSV deterministically (UTF-8, LF, ints unadorned)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in ds.records:
            f = r.features
            writer.writerow(
                [
                    r.id,
                    r.name,
                    _fmt(f.ram),
                    _fmt(f.storage),
                    _fmt(f.front_camera),
                    _fmt(f.back_camera),
                    _fmt(f.battery),
                    _fmt(r.original_price),
                    _fmt(r.sale_price),
                ]
            )


def clean(ds: Dataset) -> tuple[Dataset, CleanReport]:
    """Drop null-featured records, then exact duplicates (first occurrence wins)."""
    non_null = [
        r for r in ds.records if r.features.is_complete and r.original_price is not None
    ]
    null_dropped = len(ds.records) - len(non_null)

    seen: set[tuple] = set()
    survivors = []
    for r in non_null:
        key = (r.features.as_tuple(), r.original_price, r.sale_price)
        if key in seen:
            continue
        seen.add(key)
        survivors.append(r)
    dedup_dropped = len(non_null) - len(survivors)

    out = Dataset(tuple(survivors), provenance=ds.provenance)
    return out, CleanReport(len(ds.records), null_dropped, dedup_dropped, len(survivors))


def stratified_split(
    ds: Dataset, bands: PriceBandSpec, train_fraction: float, seed: int
) -> tuple[Dataset, Dataset]:
    """Seeded per-band shuffle-and-split; outputs keep the input record order."""
    if not (0.0 < train_fraction < 1.0):
        raise ContractError(f"train_fraction must be in (0,1), got {train_fraction}")
    by_band: dict[str, list[int]] = {name: [] for name in bands.names}
    for idx, rec in enumerate(ds.records):
        by_band[assign_band(bands, rec.original_price)].append(idx)

    rng = random.Random(seed)
    train_idx: set[int] = set()
    for name in bands.names:
        indices = list(by_band[name])
        rng.shuffle(indices)
        size = len(indices)
        n_train = round(train_fraction * size)
        if size >= 2:
            n_train = min(n_train, size - 1)  # keep at least one test record
        train_idx.update(indices[:n_train])

    train = [r for i, r in enumerate(ds.records) if i in train_idx]
    test = [r for i, r in enumerate(ds.records) if i not in train_idx]
    return (
        Dataset(tuple(train), provenance=ds.provenance),
        Dataset(tuple(test), provenance=ds.provenance),
    )
