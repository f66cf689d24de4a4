import json

import pytest
from click.testing import CliRunner

from tablescout import synth
from tablescout.cli import main
from tablescout.tables import write_benchmark, write_pool, write_table_csv


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    pool, bench = synth.planted_benchmark(n_queries=4, pool_size=30, seed=4)
    pool_dir = root / "pool"
    bench_dir = root / "bench"
    write_pool(pool, pool_dir)
    write_benchmark(bench, bench_dir)
    qtable = root / "query.csv"
    write_table_csv(bench.queries[0].query_table, qtable)
    return root, pool_dir, bench_dir, bench, qtable


def run(*args):
    return CliRunner().invoke(main, [str(a) for a in args], catch_exceptions=False)


class TestIngest:
    def test_reports_size(self, corpus):
        _, pool_dir, *_ = corpus
        result = run("ingest", pool_dir)
        assert result.exit_code == 0
        assert "30 tables" in result.output

    def test_empty_dir_exit_2(self, tmp_path):
        result = CliRunner().invoke(main, ["ingest", str(tmp_path)])
        assert result.exit_code == 2


class TestIndexAndSearch:
    def test_index_then_search(self, corpus):
        root, pool_dir, _, bench, qtable = corpus
        out = root / "idx"
        result = run("index", pool_dir, "--out", out, "--dim", 32, "--seed", 1)
        assert result.exit_code == 0
        assert (out / "index.bin").exists()
        assert (out / "embeddings.npz").exists()

        q = bench.queries[0]
        result = run(
            "search", pool_dir, "--index", out, "--dim", 32, "--seed", 1,
            "--mode", q.mode.value, "--table", qtable,
            "--condition", q.condition, "--k", 5,
        )
        assert result.exit_code == 0, result.output
        lines = [l for l in result.output.splitlines() if l.strip()]
        assert lines[0].startswith("rank")
        assert "5 results" in lines[-1]

    def test_search_builds_in_memory_without_index(self, corpus):
        _, pool_dir, _, bench, qtable = corpus
        result = run(
            "search", pool_dir, "--dim", 32, "--mode", "nl_only",
            "--condition", "students with merit scholarship", "--k", 3,
        )
        assert result.exit_code == 0
        assert "3 results" in result.output

    def test_join_mode_missing_key_exit_2(self, corpus):
        _, pool_dir, _, bench, qtable = corpus
        result = CliRunner().invoke(
            main,
            ["search", str(pool_dir), "--dim", "32", "--mode", "nlc_join", "--table", str(qtable),
             "--condition", "x"],
        )
        assert result.exit_code == 2


class TestTrainEval:
    def test_train_writes_checkpoint(self, corpus):
        root, pool_dir, bench_dir, *_ = corpus
        ckpt = root / "model.ckpt"
        result = run(
            "train", pool_dir, "--benchmark", bench_dir, "--out", ckpt,
            "--dim", 32, "--epochs", 2, "--lr", 0.1, "--hidden-dim", 8, "--negatives", 4,
        )
        assert result.exit_code == 0, result.output
        assert ckpt.exists()
        assert "trained 2 epochs" in result.output

    def test_eval_prints_report(self, corpus):
        root, pool_dir, bench_dir, *_ = corpus
        report_dir = root / "report"
        result = run(
            "eval", pool_dir, "--benchmark", bench_dir, "--dim", 32,
            "--report-dir", report_dir,
        )
        assert result.exit_code == 0, result.output
        assert "mean NDCG@5" in result.output
        assert (report_dir / "results.json").exists()
        payload = json.loads((report_dir / "results.json").read_text())
        assert len(payload["queries"]) == 4

    def test_missing_benchmark_exit_3(self, corpus):
        _, pool_dir, *_ = corpus
        result = CliRunner().invoke(
            main, ["eval", str(pool_dir), "--benchmark", str(pool_dir), "--dim", "32"]
        )
        assert result.exit_code == 3  # manifest.json missing
