from pathlib import Path
from typing import Callable

import pytest

from polyenc import config
from polyenc.cli import load_problem
from polyenc.logic import Problem


def load_corpus(name: str) -> Problem:
    path = Path(config.CORPUS_DIR) / name
    return load_problem(path.read_text(), include_dir=path.parent)


@pytest.fixture
def corpus() -> Callable[[str], Problem]:
    return load_corpus


@pytest.fixture
def lists() -> Problem:
    return load_corpus("lists.p")


@pytest.fixture
def lists_mono() -> Problem:
    return load_corpus("lists_mono.p")


@pytest.fixture
def monkey() -> Problem:
    return load_corpus("monkey_village.p")
