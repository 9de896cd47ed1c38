from pathlib import Path

import pytest

from config import DIRECTORY_DATA
from lib.tiling import load_table
from lib.tiling_verifier import TilingReport, check_cover_and_disjoint


@pytest.fixture
def data_dir() -> Path:
    return DIRECTORY_DATA


@pytest.fixture(scope="session")
def table_report():
    """Verification reports of shipped table rows, computed once per session."""
    cache: dict[tuple[str, str], TilingReport] = {}

    def report(table: str, row: str) -> TilingReport:
        if (table, row) not in cache:
            tilings = {t.name: t for t in load_table(DIRECTORY_DATA / f"{table}.tiling")}
            cache[(table, row)] = check_cover_and_disjoint(tilings[row])
        return cache[(table, row)]

    return report
