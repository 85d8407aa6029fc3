"""Declarative extraction of catalog rows from stored HTML listing snapshots.

Input is always a directory of saved pages; there is no live fetching. A rule
set names one "record boundary" element (reserved field "_record") that marks
a product card, plus one rule per catalog field. Within a card each rule binds
to the first matching descendant element and pulls its payload out of the
element text with a single-capture-group regex.
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass, field
from html.parser import HTMLParser
from pathlib import Path
from typing import Optional

from .errors import ConfigError

__all__ = [
    "RECORD_FIELD",
    "ExtractionRule",
    "RawRecord",
    "load_rules",
    "parse_snapshot",
    "extract_corpus",
    "records_to_csv",
]

RECORD_FIELD = "_record"

# elements that never carry content and are not closed in tag soup
_VOID_TAGS = frozenset(
    {"area", "base", "br", "col", "embed", "hr", "img", "input",
     "link", "meta", "param", "source", "track", "wbr"}
)


@dataclass(frozen=True)
class ExtractionRule:
    field_name: str
    tag: str
    attr_name: str
    attr_value: str
    value_pattern: Optional[str] = None  # required except for the _record rule

    def __post_init__(self):
        if self.field_name != RECORD_FIELD:
            if self.value_pattern is None:
                raise ConfigError(f"rule {self.field_name!r} has no value_pattern")
            if re.compile(self.value_pattern).groups != 1:
                raise ConfigError(
                    f"rule {self.field_name!r}: value_pattern must have exactly one capture group"
                )


@dataclass(frozen=True)
class RawRecord:
    source_file: str
    fields: dict[str, str]


@dataclass
class _Node:
    tag: str
    attrs: dict[str, str]
    children: list = field(default_factory=list)
    text_parts: list = field(default_factory=list)

    def text(self) -> str:
        parts = list(self.text_parts)
        for child in self.children:
            parts.append(child.text())
        return "".join(parts)


class _SoupParser(HTMLParser):
    """Tolerant tag-level scanner: builds a tree, ignoring stray close tags."""

    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.root = _Node("", {})
        self.stack = [self.root]

    def handle_starttag(self, tag, attrs):
        node = _Node(tag, dict(attrs))
        self.stack[-1].children.append(node)
        if tag not in _VOID_TAGS:
            self.stack.append(node)

    def handle_startendtag(self, tag, attrs):
        self.stack[-1].children.append(_Node(tag, dict(attrs)))

    def handle_endtag(self, tag):
        for depth in range(len(self.stack) - 1, 0, -1):
            if self.stack[depth].tag == tag:
                del self.stack[depth:]
                return
        # unmatched close tag: tag soup, ignore

    def handle_data(self, data):
        self.stack[-1].text_parts.append(data)


def _validate_rules(rules: list[ExtractionRule]) -> ExtractionRule:
    names = [r.field_name for r in rules]
    if len(set(names)) != len(names):
        dupes = sorted({n for n in names if names.count(n) > 1})
        raise ConfigError(f"duplicate field_name in rule set: {dupes}")
    for r in rules:
        if r.field_name == RECORD_FIELD:
            return r
    raise ConfigError(f"rule set has no {RECORD_FIELD!r} record-boundary rule")


def _matches(node: _Node, rule: ExtractionRule) -> bool:
    return node.tag == rule.tag and node.attrs.get(rule.attr_name) == rule.attr_value


def _find_cards(node: _Node, record_rule: ExtractionRule, out: list[_Node]) -> None:
    for child in node.children:
        if _matches(child, record_rule):
            out.append(child)  # cards do not nest; skip descendants
        else:
            _find_cards(child, record_rule, out)


def _first_match(node: _Node, rule: ExtractionRule) -> Optional[_Node]:
    for child in node.children:
        if _matches(child, rule):
            return child
        found = _first_match(child, rule)
        if found is not None:
            return found
    return None


def parse_snapshot(
    html_text: str, rules: list[ExtractionRule], source_file: str = "<memory>"
) -> list[RawRecord]:
    """One RawRecord per product card, document order; misses leave fields absent."""
    record_rule = _validate_rules(rules)
    parser = _SoupParser()
    parser.feed(html_text)
    parser.close()

    cards: list[_Node] = []
    _find_cards(parser.root, record_rule, cards)

    records = []
    for card in cards:
        fields: dict[str, str] = {}
        for rule in rules:
            if rule.field_name == RECORD_FIELD:
                continue
            element = card if _matches(card, rule) else _first_match(card, rule)
            if element is None:
                continue
            m = re.search(rule.value_pattern, element.text())
            if m is not None:
                fields[rule.field_name] = m.group(1)
        records.append(RawRecord(source_file=source_file, fields=fields))
    return records


def extract_corpus(snapshot_dir, rules: list[ExtractionRule]) -> list[RawRecord]:
    """parse_snapshot over every file, lexicographic filename order."""
    directory = Path(snapshot_dir)
    if not directory.is_dir():
        raise FileNotFoundError(f"snapshot directory not found: {directory}")
    _validate_rules(rules)
    records: list[RawRecord] = []
    for path in sorted(p for p in directory.iterdir() if p.is_file()):
        text = path.read_text(encoding="utf-8")
        records.extend(parse_snapshot(text, rules, source_file=path.name))
    return records


def load_rules(path) -> list[ExtractionRule]:
    """Rule set from a JSON array of rule objects."""
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, list):
        raise ConfigError("rules file must be a JSON array")
    rules = []
    for entry in raw:
        try:
            rules.append(
                ExtractionRule(
                    field_name=entry["field_name"],
                    tag=entry["tag"],
                    attr_name=entry["attr_name"],
                    attr_value=entry["attr_value"],
                    value_pattern=entry.get("value_pattern"),
                )
            )
        except KeyError as exc:
            raise ConfigError(f"rule entry {entry!r} missing key {exc}") from exc
    _validate_rules(rules)
    return rules


def records_to_csv(records: list[RawRecord], rules: list[ExtractionRule]) -> str:
    """CSV text: source_file column plus one column per rule, in rule order."""
    columns = [r.field_name for r in rules if r.field_name != RECORD_FIELD]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["source_file"] + columns)
    for rec in records:
        writer.writerow([rec.source_file] + [rec.fields.get(c, "") for c in columns])
    return buf.getvalue()
