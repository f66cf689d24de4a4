"""Build the 50-table demo fixture pool and the student query table used by
the web console and the end-to-end tests.

Usage: python scripts/make_demo_fixtures.py [OUT_DIR]   (default: fixtures/)
"""

import sys
from pathlib import Path

from tablescout.synth import DEMO_CONDITION, demo_fixture
from tablescout.tables import write_pool, write_table_csv


def main() -> None:
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("fixtures")
    pool, query = demo_fixture(seed=7, pool_size=50)
    write_pool(pool, out / "demo_pool")
    write_table_csv(query, out / "student_query.csv")
    (out / "condition.txt").write_text(DEMO_CONDITION + "\n", encoding="utf-8")
    print(f"wrote {len(pool)}-table pool to {out / 'demo_pool'}")
    print(f"wrote query table to {out / 'student_query.csv'}")
    print(f"case-study condition: {DEMO_CONDITION}")


if __name__ == "__main__":
    main()
