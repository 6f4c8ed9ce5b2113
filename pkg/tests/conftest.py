import sys
from pathlib import Path

import pytest

TESTS_DIR = Path(__file__).resolve().parent
if str(TESTS_DIR) not in sys.path:
    sys.path.insert(0, str(TESTS_DIR))

from synth import make_dump, make_labels  # noqa: E402


@pytest.fixture(scope="session")
def small_dump():
    dump, truth = make_dump(n_changes=16, comments_per_change=3, seed=3)
    return dump, truth


@pytest.fixture(scope="session")
def small_labels(small_dump):
    dump, truth = small_dump
    return make_labels(dump, truth)


@pytest.fixture()
def loaded_store(small_dump):
    from reviewlens.store import ReviewStore

    dump, _ = small_dump
    store = ReviewStore(":memory:")
    store.upsert_dump(dump)
    yield store
    store.close()
