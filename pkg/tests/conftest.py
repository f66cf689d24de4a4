import numpy as np
import pytest

from tablescout.embedding import EmbeddingProviderConfig, make_provider
from tablescout.tables import ColumnData, TableMetadata, TablePool, TableRecord


@pytest.fixture(scope="session")
def provider():
    """Small-dim hashing provider shared across tests."""
    return make_provider(EmbeddingProviderConfig(dim=32, seed=7))


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)


def make_table(table_id="t1", columns=None, caption="", description="") -> TableRecord:
    columns = columns or {"id": ["1", "2", "3"], "name": ["ada", "bo", "cy"]}
    cols = [ColumnData.from_values(n, list(v)) for n, v in columns.items()]
    n_rows = len(next(iter(columns.values()))) if columns else 0
    return TableRecord(
        id=table_id,
        columns=cols,
        row_count=n_rows,
        metadata=TableMetadata(caption=caption, description=description),
    )


@pytest.fixture()
def small_pool():
    pool = TablePool(pool_id="small")
    pool.add(make_table("alpha", {"id": ["1", "2"], "score": ["10", "20"]}, caption="alpha scores"))
    pool.add(make_table("beta", {"id": ["3", "4"], "score": ["30", "40"]}, caption="beta scores"))
    pool.add(make_table("gamma", {"city": ["oslo", "lima"], "temp": ["3", "25"]}, caption="weather"))
    return pool


def unit(v):
    v = np.asarray(v, dtype=np.float64)
    return v / np.linalg.norm(v)
