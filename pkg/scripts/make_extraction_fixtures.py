#!/usr/bin/env python3
"""Regenerate the snapshot fixture corpus and its golden CSV.

The golden file is written from the same row data the HTML is rendered from,
never by running the extractor, so the extraction tests compare against an
independent statement of intent. Deterministic: fixed seed, fixed layout.
"""

import csv
import io
import json
import random
from pathlib import Path

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"
SNAPSHOTS = FIXTURES / "snapshots"

RULES = [
    {"field_name": "_record", "tag": "div", "attr_name": "class", "attr_value": "product-card"},
    {"field_name": "name", "tag": "a", "attr_name": "class", "attr_value": "prod-name",
     "value_pattern": "(.+)"},
    {"field_name": "ram", "tag": "span", "attr_name": "class", "attr_value": "spec-ram",
     "value_pattern": r"(\d+) GB RAM"},
    {"field_name": "storage", "tag": "span", "attr_name": "class", "attr_value": "spec-storage",
     "value_pattern": r"(\d+) GB ROM"},
    {"field_name": "front_cam", "tag": "span", "attr_name": "class", "attr_value": "spec-fcam",
     "value_pattern": r"(\d+) MP front"},
    {"field_name": "back_cam", "tag": "span", "attr_name": "class", "attr_value": "spec-bcam",
     "value_pattern": r"(\d+) MP rear"},
    {"field_name": "battery", "tag": "span", "attr_name": "class", "attr_value": "spec-batt",
     "value_pattern": r"(\d+) mAh"},
    {"field_name": "original_price", "tag": "div", "attr_name": "class", "attr_value": "price",
     "value_pattern": r"Rs\. (\d+)"},
    {"field_name": "sale_price", "tag": "div", "attr_name": "class", "attr_value": "sale-price",
     "value_pattern": r"Rs\. (\d+)"},
]

BRANDS = ["Acme", "Nimbus", "Voltex", "Orbit", "Pixelo", "Zenfone", "Luma"]


def render_card(row, ram_text=None):
    ram_line = ram_text if ram_text is not None else f"{row['ram']} GB RAM"
    sale_div = (
        f'    <div class="sale-price">Rs. {row["sale_price"]}</div>\n'
        if row["sale_price"]
        else ""
    )
    return (
        '  <div class="product-card">\n'
        f'    <a class="prod-name" href="/p/{row["slug"]}">{row["name"]}</a>\n'
        '    <div class="specs">\n'
        f'      <span class="spec-ram">{ram_line}</span>\n'
        f'      <span class="spec-storage">{row["storage"]} GB ROM</span>\n'
        f'      <span class="spec-fcam">{row["front_cam"]} MP front</span>\n'
        f'      <span class="spec-bcam">{row["back_cam"]} MP rear</span>\n'
        f'      <span class="spec-batt">{row["battery"]} mAh</span>\n'
        "    </div>\n"
        f'    <div class="price">Rs. {row["original_price"]}</div>\n'
        f"{sale_div}"
        "  </div>\n"
    )


def make_row(rng, serial):
    brand = rng.choice(BRANDS)
    model = rng.randint(2, 30)
    price = rng.randint(1500, 60000)
    on_sale = rng.random() < 0.6
    return {
        "slug": f"item-{serial}",
        "name": f"{brand} {model}",
        "ram": rng.choice([2, 3, 4, 6, 8, 12]),
        "storage": rng.choice([16, 32, 64, 128, 256]),
        "front_cam": rng.choice([0, 2, 5, 8, 16, 32]),
        "back_cam": rng.choice([5, 8, 13, 48, 64, 108]),
        "battery": rng.choice([2000, 3000, 4000, 5000]),
        "original_price": price,
        "sale_price": rng.randint(price // 2, price) if on_sale else None,
    }


def main():
    SNAPSHOTS.mkdir(parents=True, exist_ok=True)
    rng = random.Random(20200319)
    golden = []  # (source_file, expected field dict)
    serial = 0

    for file_no in range(20):
        fname = f"snap_{file_no:02d}.html"
        body = io.StringIO()
        body.write("<html><head><title>Listing</title></head>\n<body>\n")
        body.write('<div class="header">Mobile phones - page %d</div>\n' % file_no)

        if file_no == 7:
            # promo page: no product cards at all
            body.write('<div class="promo">Sale starts tomorrow!</div>\n')
        else:
            n_cards = rng.randint(1, 3)
            for card_no in range(n_cards):
                serial += 1
                row = make_row(rng, serial)
                expected = {
                    "name": row["name"],
                    "ram": str(row["ram"]),
                    "storage": str(row["storage"]),
                    "front_cam": str(row["front_cam"]),
                    "back_cam": str(row["back_cam"]),
                    "battery": str(row["battery"]),
                    "original_price": str(row["original_price"]),
                    "sale_price": str(row["sale_price"]) if row["sale_price"] else "",
                }
                if file_no == 5 and card_no == 0:
                    # deliberately unparseable RAM: pattern misses, field absent
                    body.write(render_card(row, ram_text="N/A"))
                    expected["ram"] = ""
                else:
                    body.write(render_card(row))
                if file_no == 11 and card_no == 0:
                    # mild tag soup between cards: unclosed <p>, stray </span>
                    body.write("  <p>hot deal<br>\n  </span>\n")
                golden.append((fname, expected))

        body.write("</body></html>\n")
        (SNAPSHOTS / fname).write_text(body.getvalue(), encoding="utf-8")

    with open(FIXTURES / "rules.json", "w", encoding="utf-8") as fh:
        json.dump(RULES, fh, indent=2)
        fh.write("\n")

    columns = [r["field_name"] for r in RULES if r["field_name"] != "_record"]
    with open(FIXTURES / "golden_extract.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["source_file"] + columns)
        for fname, expected in golden:
            writer.writerow([fname] + [expected[c] for c in columns])

    print(f"wrote {len(golden)} expected records across 20 snapshots -> {FIXTURES}")


if __name__ == "__main__":
    main()
