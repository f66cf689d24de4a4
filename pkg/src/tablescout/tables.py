"""Canonical in-memory model of tables, pools, queries and gold labels.

Disk conventions:
- Table files: UTF-8 CSV, comma-delimited, double-quote escaping, first row
  is the header.
- Metadata sidecar: ``<stem>.meta.json`` with keys ``caption`` and
  ``description`` next to the CSV.
- Benchmark directory: ``queries.jsonl`` + ``qrels.tsv`` + ``manifest.json``
  (declares the maximum relevance grade) + a ``tables/`` pool directory.

Pools are immutable once built; mutation means reloading and re-indexing.
"""

from __future__ import annotations

import csv
import json
import logging
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .errors import (
    DanglingQrelError,
    DuplicateIdError,
    EmptyPoolError,
    EmptyTableError,
    GradeOutOfRangeError,
    MissingConditionError,
    MissingKeyColumnError,
    MissingQueryTableError,
    RaggedTableError,
    UnknownColumnError,
)

logger = logging.getLogger(__name__)

_NUMERIC_RE = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")
_DATE_RE = re.compile(r"^\d{4}-\d{2}-\d{2}$|^\d{1,2}/\d{1,2}/\d{2,4}$")


class ColumnKind(str, Enum):
    NUMERIC = "numeric"
    TEXT = "text"
    DATE = "date"
    MIXED = "mixed"


class QueryMode(str, Enum):
    NL_ONLY = "nl_only"
    UNION = "nlc_union"
    JOIN = "nlc_join"


def infer_kind(values: list[str]) -> ColumnKind:
    """Advisory cell-kind inference; storage stays textual either way."""
    nonblank = [v for v in values if v.strip()]
    if not nonblank:
        return ColumnKind.TEXT
    numeric = sum(1 for v in nonblank if _NUMERIC_RE.match(v.strip()))
    dates = sum(1 for v in nonblank if _DATE_RE.match(v.strip()))
    if numeric == len(nonblank):
        return ColumnKind.NUMERIC
    if dates == len(nonblank):
        return ColumnKind.DATE
    if numeric == 0 and dates == 0:
        return ColumnKind.TEXT
    return ColumnKind.MIXED


@dataclass
class ColumnData:
    """One named column with its cell values (stored as text)."""

    name: str
    values: list[str]
    inferred_kind: ColumnKind = ColumnKind.TEXT

    @classmethod
    def from_values(cls, name: str, values: list[str]) -> "ColumnData":
        return cls(name=name, values=values, inferred_kind=infer_kind(values))


@dataclass
class TableMetadata:
    caption: str = ""
    description: str = ""

    def is_empty(self) -> bool:
        return not (self.caption.strip() or self.description.strip())

    def text(self) -> str:
        """Caption and description joined for embedding."""
        return f"{self.caption} {self.description}".strip()


@dataclass
class TableRecord:
    """A table: the unit of retrieval."""

    id: str
    columns: list[ColumnData]
    row_count: int
    metadata: TableMetadata = field(default_factory=TableMetadata)

    def column_names(self) -> list[str]:
        return [c.name for c in self.columns]

    def column(self, name: str) -> ColumnData:
        for c in self.columns:
            if c.name == name:
                return c
        raise UnknownColumnError(f"table {self.id!r} has no column {name!r}")

    def rows(self, limit: int | None = None) -> list[list[str]]:
        n = self.row_count if limit is None else min(limit, self.row_count)
        return [[c.values[i] for c in self.columns] for i in range(n)]


@dataclass
class TablePool:
    """Immutable-after-load collection of tables keyed by id."""

    pool_id: str
    tables: dict[str, TableRecord] = field(default_factory=dict)

    def add(self, table: TableRecord) -> None:
        if table.id in self.tables:
            raise DuplicateIdError(f"duplicate table id {table.id!r} in pool {self.pool_id!r}")
        self.tables[table.id] = table

    def get(self, table_id: str) -> TableRecord | None:
        return self.tables.get(table_id)

    def __len__(self) -> int:
        return len(self.tables)

    def __iter__(self):
        return iter(self.tables.values())


@dataclass
class QuerySpec:
    """One search request; ``query_id`` is set for benchmark queries."""

    mode: QueryMode
    query_table: TableRecord | None = None
    condition: str | None = None
    key_column: str | None = None
    k: int = 10
    query_id: str | None = None


@dataclass
class GoldLabel:
    query_id: str
    table_id: str
    relevance: int


@dataclass
class Benchmark:
    """Loaded benchmark: queries, graded judgments and the grade ceiling."""

    queries: list[QuerySpec]
    qrels: list[GoldLabel]
    max_grade: int
    root: Path | None = None

    def qrels_for(self, query_id: str) -> dict[str, int]:
        return {g.table_id: g.relevance for g in self.qrels if g.query_id == query_id}


# --------------------------------------------------------------------------
# parsing / loading
# --------------------------------------------------------------------------


def _dedupe_headers(names: list[str]) -> list[str]:
    """Empty or duplicate header cells get ordinal suffixes (web tables have both)."""
    seen: dict[str, int] = {}
    out: list[str] = []
    for i, raw in enumerate(names):
        name = raw.strip() or f"column_{i + 1}"
        if name in seen:
            seen[name] += 1
            deduped = f"{name}_{seen[name]}"
            logger.warning("duplicate header %r renamed to %r", name, deduped)
            name = deduped
        else:
            seen[name] = 1
        out.append(name)
    return out


def _load_metadata(path: Path) -> TableMetadata:
    raw = json.loads(path.read_text(encoding="utf-8"))
    return TableMetadata(caption=str(raw.get("caption", "")), description=str(raw.get("description", "")))


def metadata_sidecar_path(table_path: Path) -> Path:
    return table_path.with_name(table_path.stem + ".meta.json")


def parse_table_csv(path: str | Path, metadata_path: str | Path | None = None) -> TableRecord:
    """Parse one CSV file (plus optional metadata sidecar) into a TableRecord.

    Raises EmptyTableError on a file without a header row and
    RaggedTableError when any data row's arity differs from the header's.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        rows = list(reader)
    if not rows:
        raise EmptyTableError(f"{path}: no header row")
    header = _dedupe_headers(rows[0])
    data = rows[1:]
    for rownum, row in enumerate(data, start=2):
        if len(row) != len(header):
            raise RaggedTableError(f"{path}: row {rownum} has {len(row)} cells, header has {len(header)}")
    columns = [ColumnData.from_values(name, [row[j] for row in data]) for j, name in enumerate(header)]

    meta = TableMetadata()
    meta_path = Path(metadata_path) if metadata_path else metadata_sidecar_path(path)
    if meta_path.exists():
        meta = _load_metadata(meta_path)

    return TableRecord(id=path.stem, columns=columns, row_count=len(data), metadata=meta)


def parse_table_text(table_id: str, csv_text: str, caption: str = "", description: str = "") -> TableRecord:
    """Parse inline CSV text (service uploads) into a TableRecord."""
    rows = list(csv.reader(csv_text.splitlines()))
    if not rows:
        raise EmptyTableError(f"inline table {table_id!r}: no header row")
    header = _dedupe_headers(rows[0])
    data = rows[1:]
    for rownum, row in enumerate(data, start=2):
        if len(row) != len(header):
            raise RaggedTableError(f"inline table {table_id!r}: row {rownum} has {len(row)} cells")
    columns = [ColumnData.from_values(name, [row[j] for row in data]) for j, name in enumerate(header)]
    return TableRecord(
        id=table_id,
        columns=columns,
        row_count=len(data),
        metadata=TableMetadata(caption=caption, description=description),
    )


def load_pool(directory: str | Path) -> TablePool:
    """Load every ``*.csv`` under a directory into a pool (ids = file stems)."""
    directory = Path(directory)
    files = sorted(directory.glob("*.csv"))
    if not files:
        raise EmptyPoolError(f"{directory}: no table files")
    pool = TablePool(pool_id=directory.name)
    for f in files:
        pool.add(parse_table_csv(f))
    return pool


def write_table_csv(table: TableRecord, path: str | Path) -> None:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(table.column_names())
        for row in table.rows():
            writer.writerow(row)
    if not table.metadata.is_empty():
        sidecar = metadata_sidecar_path(path)
        sidecar.write_text(
            json.dumps({"caption": table.metadata.caption, "description": table.metadata.description}),
            encoding="utf-8",
        )


def write_pool(pool: TablePool, directory: str | Path) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for table in pool:
        write_table_csv(table, directory / f"{table.id}.csv")


# --------------------------------------------------------------------------
# benchmarks
# --------------------------------------------------------------------------


def load_benchmark(directory: str | Path) -> Benchmark:
    """Load ``queries.jsonl`` / ``qrels.tsv`` / ``manifest.json`` from a directory."""
    directory = Path(directory)
    manifest = json.loads((directory / "manifest.json").read_text(encoding="utf-8"))
    max_grade = int(manifest["max_grade"])

    queries: list[QuerySpec] = []
    with (directory / "queries.jsonl").open(encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            table = None
            if obj.get("query_table"):
                table = parse_table_csv(directory / obj["query_table"])
            queries.append(
                QuerySpec(
                    mode=QueryMode(obj["mode"]),
                    query_table=table,
                    condition=obj.get("condition"),
                    key_column=obj.get("key_column"),
                    k=int(obj.get("k", 10)),
                    query_id=str(obj["id"]),
                )
            )
    known = {q.query_id for q in queries}

    qrels: list[GoldLabel] = []
    with (directory / "qrels.tsv").open(encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise DanglingQrelError(f"qrels.tsv line {lineno}: expected 3 tab-separated fields")
            query_id, table_id, grade_s = parts
            grade = int(grade_s)
            if query_id not in known:
                raise DanglingQrelError(f"qrels.tsv line {lineno}: unknown query {query_id!r}")
            if grade < 0 or grade > max_grade:
                raise GradeOutOfRangeError(
                    f"qrels.tsv line {lineno}: grade {grade} outside [0, {max_grade}]"
                )
            qrels.append(GoldLabel(query_id=query_id, table_id=table_id, relevance=grade))

    return Benchmark(queries=queries, qrels=qrels, max_grade=max_grade, root=directory)


def write_benchmark(benchmark: Benchmark, directory: str | Path) -> None:
    """Serialize a benchmark so load_benchmark can reconstruct it."""
    directory = Path(directory)
    (directory / "queries").mkdir(parents=True, exist_ok=True)
    (directory / "manifest.json").write_text(json.dumps({"max_grade": benchmark.max_grade}), encoding="utf-8")

    with (directory / "queries.jsonl").open("w", encoding="utf-8") as f:
        for q in benchmark.queries:
            rel = None
            if q.query_table is not None:
                rel = f"queries/{q.query_id}.csv"
                write_table_csv(q.query_table, directory / rel)
            f.write(
                json.dumps(
                    {
                        "id": q.query_id,
                        "mode": q.mode.value,
                        "condition": q.condition,
                        "query_table": rel,
                        "key_column": q.key_column,
                        "k": q.k,
                    }
                )
                + "\n"
            )

    with (directory / "qrels.tsv").open("w", encoding="utf-8") as f:
        for g in benchmark.qrels:
            f.write(f"{g.query_id}\t{g.table_id}\t{g.relevance}\n")


# --------------------------------------------------------------------------
# query validation
# --------------------------------------------------------------------------


def validate_query(spec: QuerySpec) -> None:
    """Enforce the QuerySpec invariants; raises a typed error on violation."""
    if spec.k < 1:
        raise ValueError(f"k must be positive, got {spec.k}")
    if spec.mode is QueryMode.NL_ONLY:
        if not (spec.condition and spec.condition.strip()):
            raise MissingConditionError("nl_only query needs a non-empty condition")
        return
    if spec.query_table is None:
        raise MissingQueryTableError(f"{spec.mode.value} query needs a query table")
    if spec.mode is QueryMode.JOIN:
        if not spec.key_column:
            raise MissingKeyColumnError("nlc_join query needs a key column")
        if spec.key_column not in spec.query_table.column_names():
            raise UnknownColumnError(
                f"key column {spec.key_column!r} not in query table columns {spec.query_table.column_names()}"
            )
