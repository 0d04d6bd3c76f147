from __future__ import annotations

from pathlib import Path

import pytest

from varkit.oracle import enumerate_universe
from varkit.parser import parse
from varkit.types import Signature, default_signature

CORPUS = Path(__file__).resolve().parent.parent / "corpus"
GOLDEN = Path(__file__).resolve().parent / "golden"

_parsed: dict = {}


def corpus_path(name: str) -> Path:
    return CORPUS / name


def load_corpus(name: str) -> Signature:
    """Parse a corpus file, asserting it is clean, with caching."""
    if name not in _parsed:
        sig, diags = parse(corpus_path(name).read_text())
        assert not diags, f"{name}: {diags}"
        _parsed[name] = sig
    return _parsed[name]


def corpus_names() -> list:
    return sorted(p.name for p in CORPUS.glob("*.vt"))


@pytest.fixture(scope="session")
def dsig() -> Signature:
    return default_signature()


@pytest.fixture(scope="session")
def u2(dsig):
    return enumerate_universe(dsig, 2)


@pytest.fixture(scope="session")
def u3(dsig):
    return enumerate_universe(dsig, 3)
