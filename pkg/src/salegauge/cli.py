"""Command-line front door: extract, stats, train, analyze, synth."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from . import catalog, extract, pricebands, report, significance, svm, synth
from .errors import (
    ConfigError,
    ContractError,
    DataError,
    NumericError,
    PersistenceError,
    SaleGaugeError,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4


def _load_bands(args) -> pricebands.PriceBandSpec:
    if getattr(args, "bands", None):
        return pricebands.load_band_spec(args.bands)
    return pricebands.default_band_spec()


def _kernel_from_args(args) -> svm.KernelConfig:
    return svm.KernelConfig(
        kind=args.kernel, gamma=args.gamma, degree=args.degree, coef0=args.coef0
    )


def _load_grid(path) -> list[tuple[svm.KernelConfig, float]]:
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, list):
        raise ConfigError("grid file must be a JSON list")
    grid = []
    for entry in raw:
        try:
            k = entry["kernel"]
            grid.append(
                (
                    svm.KernelConfig(
                        kind=k["kind"],
                        gamma=k.get("gamma"),
                        degree=int(k.get("degree", 3)),
                        coef0=float(k.get("coef0", 0.0)),
                    ),
                    float(entry["c"]),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad grid entry {entry!r}: {exc}") from exc
    if not grid:
        raise ConfigError("grid file is empty")
    return grid


def cmd_extract(args) -> int:
    rules = extract.load_rules(args.rules)
    records = extract.extract_corpus(args.snapshots, rules)
    text = extract.records_to_csv(records, rules)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        print(f"extracted {len(records)} records -> {args.output}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _stats_table_lines(stats: pricebands.PriceBandStats) -> list[str]:
    lines = [f"{'band':<12} {'count':>6} {'mean':>12} {'sd':>12}"]
    for r in stats.rows:
        mean = f"{r.mean:.2f}" if r.mean is not None else "-"
        lines.append(f"{r.name:<12} {r.count:>6} {mean:>12} {r.sd:>12.2f}")
    lines.append(f"{'total':<12} {stats.total:>6}")
    return lines


def cmd_stats(args) -> int:
    bands = _load_bands(args)
    ds = catalog.load_catalog_csv(args.catalog)
    cleaned, clean_report = catalog.clean(ds)
    stats = pricebands.band_stats(bands, cleaned)
    for line in _stats_table_lines(stats):
        print(line)
    print(f"clean: {clean_report.as_dict()}")
    if args.output:
        pricebands.save_stats(stats, args.output)
        print(f"stats -> {args.output}")
    return EXIT_OK


def cmd_train(args) -> int:
    bands = _load_bands(args)
    ds = catalog.load_catalog_csv(args.catalog)
    cleaned, clean_report = catalog.clean(ds)
    train_ds, test_ds = catalog.stratified_split(cleaned, bands, args.train_fraction, args.seed)

    kernel = _kernel_from_args(args)
    c = args.c
    if args.cv:
        grid = _load_grid(args.grid) if args.grid else [(kernel, c)]
        ranked = svm.cross_validate(train_ds, bands, grid, args.cv, args.seed)
        print(f"{'kernel':<10} {'gamma':>10} {'C':>8} {'cv_accuracy':>12}")
        for cfg, cc, acc in ranked:
            gamma = f"{cfg.gamma:.6g}" if cfg.gamma is not None else "auto"
            print(f"{cfg.kind:<10} {gamma:>10} {cc:>8g} {acc:>12.4f}")
        kernel, c, _ = ranked[0][0], ranked[0][1], ranked[0][2]

    model = svm.train_multiclass(train_ds, bands, kernel, c)
    train_acc = svm.accuracy(model, train_ds, bands)
    test_acc = svm.accuracy(model, test_ds, bands)
    print(f"train accuracy: {train_acc:.4f} ({len(train_ds)} records)")
    print(f"holdout accuracy: {test_acc:.4f} ({len(test_ds)} records)")
    print(f"clean: {clean_report.as_dict()}")
    svm.save_model(model, args.model)
    print(f"model -> {args.model}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    bands = _load_bands(args)
    model = svm.load_model(args.model)
    if tuple(model.class_names) != tuple(bands.names):
        raise ConfigError(
            f"model classes {list(model.class_names)} do not match band spec {bands.names}"
        )

    clean_counts = None
    if args.stats:
        stats = pricebands.load_stats(args.stats)
        if stats.spec != bands:
            raise ConfigError("stats file band spec does not match --bands")
    elif args.catalog:
        nonsale, clean_report = catalog.clean(catalog.load_catalog_csv(args.catalog))
        stats = pricebands.band_stats(bands, nonsale)
        clean_counts = clean_report.as_dict()
    else:
        raise ConfigError("analyze needs --stats or --catalog for sigma values")

    policy = (
        significance.load_policy(args.policy) if args.policy else significance.default_policy()
    )
    if args.k is not None:
        policy = replace(policy, k=args.k)

    sale_ds = catalog.load_catalog_csv(args.sale)
    verdicts, rejects = significance.classify_dataset(policy, bands, stats, model, sale_ds)

    config_echo = {
        "command": "analyze",
        "model": str(args.model),
        "sale": str(args.sale),
        "stats": str(args.stats) if args.stats else None,
        "catalog": str(args.catalog) if args.catalog else None,
        "policy": {
            "k": policy.k,
            "fold_names": list(policy.fold_names),
            "cross_class_name": policy.cross_class_name,
            "graded_cross_class": policy.graded_cross_class,
        },
        "input_records": len(sale_ds),
        "nonsale_clean": clean_counts,
    }
    doc = report.build_report(policy, stats, verdicts, rejects, config_echo)
    text = report.report_to_json(doc)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"report -> {args.output}")
    else:
        sys.stdout.write(text)
    if args.verdicts_csv:
        with open(args.verdicts_csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(report.verdicts_to_csv(verdicts))
        print(f"verdicts -> {args.verdicts_csv}")

    totals = doc["summary_matrix"]["column_totals"]
    summary = ", ".join(f"{cls}: {totals[cls]}" for cls in doc["summary_matrix"]["classes"])
    print(f"{len(verdicts)} verdicts ({summary}), {len(rejects)} rejects")
    return EXIT_OK


def cmd_synth(args) -> int:
    bands = _load_bands(args)
    counts = (
        tuple(int(x) for x in args.counts.split(",")) if args.counts else synth.DEFAULT_BAND_COUNTS
    )
    nonsale, sale = synth.generate_catalogs(
        synth.SynthConfig(seed=args.seed, band_counts=counts), bands
    )
    out = args.output
    catalog.write_catalog_csv(nonsale, f"{out}/nonsale.csv")
    catalog.write_catalog_csv(sale, f"{out}/sale.csv")
    print(f"{len(nonsale)} records -> {out}/nonsale.csv, {out}/sale.csv")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="salegauge",
        description="Quantify the significance of sale-season discounts.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="extract catalog rows from HTML snapshots")
    p.add_argument("snapshots", help="directory of stored HTML pages")
    p.add_argument("--rules", required=True, help="JSON extraction rule file")
    p.add_argument("--output", help="CSV output path (default stdout)")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("stats", help="per-band count/mean/sd for a catalog")
    p.add_argument("--catalog", required=True)
    p.add_argument("--bands", help="band spec JSON (default: built-in 4 bands)")
    p.add_argument("--output", help="write a stats JSON file")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("train", help="train the band classifier")
    p.add_argument("--catalog", required=True, help="non-sale catalog CSV")
    p.add_argument("--bands")
    p.add_argument("--kernel", choices=list(svm.KERNEL_KINDS), default="rbf")
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--degree", type=int, default=3)
    p.add_argument("--coef0", type=float, default=0.0)
    p.add_argument("--cv", type=int, default=0, help="cross-validation fold count")
    p.add_argument("--grid", help="JSON grid of (kernel, c) configs for --cv")
    p.add_argument("--train-fraction", type=float, default=0.8)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--model", required=True, help="model output path")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("analyze", help="classify discounts in a sale catalog")
    p.add_argument("--model", required=True)
    p.add_argument("--sale", required=True, help="sale catalog CSV")
    p.add_argument("--catalog", help="non-sale catalog CSV for sigma values")
    p.add_argument("--stats", help="saved stats JSON for sigma values")
    p.add_argument("--bands")
    p.add_argument("--policy", help="significance policy JSON")
    p.add_argument("--k", type=float, default=None, help="fold width multiplier (default 0.5)")
    p.add_argument("--output", help="report JSON path (default stdout)")
    p.add_argument("--verdicts-csv", help="optional flat CSV of verdicts")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("synth", help="generate deterministic synthetic catalogs")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--counts", help="comma-separated per-band record counts")
    p.add_argument("--bands")
    p.add_argument("--output", required=True, help="output directory")
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, PersistenceError) as exc:
        print(f"{args.command}: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericError as exc:
        print(f"{args.command}: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DataError, ContractError, SaleGaugeError, OSError) as exc:
        print(f"{args.command}: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    raise SystemExit(main())
