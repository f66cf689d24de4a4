"""Bounded union/join previews for the processing panel.

These are previews, not an ETL engine: output is capped at a fixed number
of rows and all cells stay text.
"""

from __future__ import annotations

from .errors import UnknownColumnError
from .tables import ColumnData, TableMetadata, TableRecord

PREVIEW_ROW_CAP = 200


def union_preview(
    left: TableRecord,
    right: TableRecord,
    column_pairs: list[tuple[str, str]],
    max_rows: int = PREVIEW_ROW_CAP,
) -> TableRecord:
    """Append right-table rows under the left schema.

    ``column_pairs`` maps left column -> right column (the union matching);
    left columns without a partner are blank on appended rows.
    """
    mapping = dict(column_pairs)
    for l_col, r_col in mapping.items():
        if l_col not in left.column_names():
            raise UnknownColumnError(f"left table has no column {l_col!r}")
        if r_col not in right.column_names():
            raise UnknownColumnError(f"right table has no column {r_col!r}")

    out_rows: list[list[str]] = left.rows()
    right_cols = {c.name: c.values for c in right.columns}
    appended = 0
    for i in range(right.row_count):
        if len(out_rows) >= max_rows:
            break
        row = []
        for name in left.column_names():
            partner = mapping.get(name)
            row.append(right_cols[partner][i] if partner else "")
        out_rows.append(row)
        appended += 1
    out_rows = out_rows[:max_rows]

    columns = [
        ColumnData.from_values(name, [r[j] for r in out_rows])
        for j, name in enumerate(left.column_names())
    ]
    return TableRecord(
        id=f"{left.id}+{right.id}",
        columns=columns,
        row_count=len(out_rows),
        metadata=TableMetadata(caption=f"union preview of {left.id} and {right.id}"),
    )


def join_preview(
    left: TableRecord,
    right: TableRecord,
    left_key: str,
    right_key: str,
    max_rows: int = PREVIEW_ROW_CAP,
) -> TableRecord:
    """Left equi-join on key values; left rows repeat only per key multiplicity."""
    left_values = left.column(left_key).values
    right_values = right.column(right_key).values

    by_key: dict[str, list[int]] = {}
    for i, v in enumerate(right_values):
        by_key.setdefault(v, []).append(i)

    left_names = left.column_names()
    right_extra = [c for c in right.columns if c.name != right_key]
    used = set(left_names)
    out_names = list(left_names)
    for c in right_extra:
        name = c.name if c.name not in used else f"{right.id}.{c.name}"
        used.add(name)
        out_names.append(name)

    out_rows: list[list[str]] = []
    for i in range(left.row_count):
        if len(out_rows) >= max_rows:
            break
        base = [col.values[i] for col in left.columns]
        matches = by_key.get(left_values[i], [])
        if not matches:
            out_rows.append(base + [""] * len(right_extra))
            continue
        for j in matches:
            if len(out_rows) >= max_rows:
                break
            out_rows.append(base + [c.values[j] for c in right_extra])

    columns = [ColumnData.from_values(name, [r[k] for r in out_rows]) for k, name in enumerate(out_names)]
    return TableRecord(
        id=f"{left.id}*{right.id}",
        columns=columns,
        row_count=len(out_rows),
        metadata=TableMetadata(caption=f"join preview of {left.id} and {right.id} on {left_key}={right_key}"),
    )
