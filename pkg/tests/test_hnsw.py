import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tablescout.errors import (
    CorruptIndexError,
    DimMismatchError,
    DuplicateIdError,
    UnsupportedVersionError,
)
from tablescout.hnsw import (
    INDEX_VERSION,
    HnswParams,
    IndexEntry,
    brute_force_search,
    build,
    load,
    save,
)


def unit_entries(rng, n, dim):
    vecs = rng.normal(size=(n, dim))
    vecs /= np.linalg.norm(vecs, axis=1, keepdims=True)
    return [IndexEntry(f"v{i:04d}", vecs[i]) for i in range(n)]


class TestBuild:
    def test_single_entry(self, rng):
        idx = build(unit_entries(rng, 1, 8))
        assert len(idx) == 1
        ((tid, score),) = idx.search(rng.normal(size=8), 1)
        assert tid == "v0000"

    def test_duplicate_ids(self, rng):
        entries = unit_entries(rng, 2, 8)
        entries[1].table_id = entries[0].table_id
        with pytest.raises(DuplicateIdError):
            build(entries)

    def test_dim_mismatch(self, rng):
        entries = unit_entries(rng, 2, 8)
        entries[1].vector = np.ones(4)
        with pytest.raises(DimMismatchError):
            build(entries)

    def test_deterministic_builds(self, rng):
        entries = unit_entries(rng, 300, 16)
        idx1 = build(entries, HnswParams(seed=42))
        idx2 = build(entries, HnswParams(seed=42))
        queries = rng.normal(size=(20, 16))
        for q in queries:
            assert idx1.search(q, 10) == idx2.search(q, 10)

    def test_graph_integrity(self, rng):
        entries = unit_entries(rng, 400, 16)
        params = HnswParams(m=8, seed=0)
        idx = build(entries, params)
        m0 = 2 * params.m
        for node in range(len(idx)):
            level = idx._levels[node]
            assert len(idx._neighbors[node]) == level + 1
            for layer, nbrs in enumerate(idx._neighbors[node]):
                bound = m0 if layer == 0 else params.m
                assert len(nbrs) <= bound
                for nb in nbrs:
                    # a neighbor at layer L must itself exist at layer L
                    assert idx._levels[nb] >= layer


class TestSearch:
    def test_n_larger_than_index(self, rng):
        idx = build(unit_entries(rng, 5, 8))
        assert len(idx.search(rng.normal(size=8), 50)) == 5

    def test_empty_index(self):
        idx = build([])
        assert idx.search(np.ones(8), 3) == []

    def test_scores_non_increasing(self, rng):
        idx = build(unit_entries(rng, 200, 16))
        scores = [s for _, s in idx.search(rng.normal(size=16), 50)]
        assert all(a >= b for a, b in zip(scores, scores[1:]))

    def test_exact_on_small_index(self, rng):
        entries = unit_entries(rng, 32, 8)
        idx = build(entries, HnswParams(ef_search=32, seed=1))
        for _ in range(25):
            q = rng.normal(size=8)
            got = idx.search(q, 10)
            exact = brute_force_search(entries, q, 10)
            # ids and ranking agree exactly; scores may differ in the last ulp
            # because the two paths sum the dot product in different orders
            assert [t for t, _ in got] == [t for t, _ in exact]
            assert np.allclose([s for _, s in got], [s for _, s in exact], atol=1e-9)

    def test_monotone_ef(self, rng):
        entries = unit_entries(rng, 1500, 24)
        queries = rng.normal(size=(100, 24))
        exact = [set(t for t, _ in brute_force_search(entries, q, 10)) for q in queries]

        def recall(ef):
            idx = build(entries, HnswParams(ef_search=ef, seed=3))
            got = [set(t for t, _ in idx.search(q, 10)) for q in queries]
            return np.mean([len(a & b) / 10 for a, b in zip(got, exact)])

        assert recall(128) >= recall(16)


class TestBruteForce:
    def test_orthogonal_scores_zero_order_by_id(self):
        entries = [IndexEntry("b", np.array([0.0, 1.0])), IndexEntry("a", np.array([0.0, -1.0]))]
        out = brute_force_search(entries, np.array([1.0, 0.0]), 2)
        assert out == [("a", 0.0), ("b", 0.0)]

    def test_identical_vector_scores_one(self):
        v = np.array([0.6, 0.8])
        out = brute_force_search([IndexEntry("x", v)], v, 1)
        assert abs(out[0][1] - 1.0) < 1e-12

    def test_tie_break_ascending_id(self):
        v = np.array([1.0, 0.0])
        entries = [IndexEntry("z", v), IndexEntry("a", v), IndexEntry("m", v)]
        out = brute_force_search(entries, v, 3)
        assert [t for t, _ in out] == ["a", "m", "z"]


class TestZeroBlockInvariance:
    @given(st.integers(0, 2**31 - 1))
    @settings(max_examples=25, deadline=None)
    def test_zero_padding_preserves_content_order(self, seed):
        rng = np.random.default_rng(seed)
        d = 6
        entries = unit_entries(rng, 30, 2 * d)
        content = rng.normal(size=d)
        padded = np.concatenate([content, np.zeros(d)])
        scores_padded = {t: s for t, s in brute_force_search(entries, padded, 30)}
        # inner product with a zero metadata block equals the content-block product
        for e in entries:
            assert abs(scores_padded[e.table_id] - float(e.vector[:d] @ content)) < 1e-12


class TestPersistence:
    def test_round_trip_search_equality(self, rng, tmp_path):
        entries = unit_entries(rng, 1000, 16)
        idx = build(entries, HnswParams(seed=11, ef_search=48))
        path = tmp_path / "index.bin"
        save(idx, path)
        back = load(path)
        assert back.params.ef_search == 48
        for _ in range(50):
            q = rng.normal(size=16)
            assert idx.search(q, 10) == back.search(q, 10)

    def test_truncated_file(self, rng, tmp_path):
        idx = build(unit_entries(rng, 50, 8), HnswParams(seed=0))
        path = tmp_path / "index.bin"
        save(idx, path)
        blob = path.read_bytes()
        path.write_bytes(blob[: len(blob) - 100])
        with pytest.raises(CorruptIndexError) as exc_info:
            load(path)
        assert "byte" in str(exc_info.value)

    def test_future_version(self, rng, tmp_path):
        idx = build(unit_entries(rng, 5, 8), HnswParams(seed=0))
        path = tmp_path / "index.bin"
        save(idx, path)
        blob = bytearray(path.read_bytes())
        blob[4:8] = (INDEX_VERSION + 1).to_bytes(4, "little")
        path.write_bytes(bytes(blob))
        with pytest.raises(UnsupportedVersionError):
            load(path)

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "index.bin"
        path.write_bytes(b"XXXX" + b"\x00" * 100)
        with pytest.raises(CorruptIndexError):
            load(path)

    def test_empty_round_trip(self, tmp_path):
        idx = build([])
        path = tmp_path / "index.bin"
        save(idx, path)
        assert load(path).search(np.ones(4), 1) == []


class TestParams:
    def test_m_bound(self):
        with pytest.raises(ValueError):
            HnswParams(m=1)

    def test_ef_positive(self):
        with pytest.raises(ValueError):
            HnswParams(ef_search=0)
