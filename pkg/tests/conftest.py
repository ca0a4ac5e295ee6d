"""Shared fixtures: the generated corpus and lazily cached analyses."""
from __future__ import annotations

import pytest

from cstarenv.analysis import AnalysisConfig, analyze_pair, analyze_system
from cstarenv.corpus import corpus_entries
from cstarenv.linalg import DEFAULT_TOL
from cstarenv.opsys import generated_cstar
from cstarenv.specio import opsys_of, spec_digest
from cstarenv.wedderburn import wedderburn_decompose


@pytest.fixture(scope="session")
def entries():
    return {e.spec.name: e for e in corpus_entries(seed=1, count=20)}


@pytest.fixture(scope="session")
def system(entries):
    """Factory: corpus name -> OperatorSystem, cached."""
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = opsys_of(entries[name].spec, DEFAULT_TOL)
        return cache[name]

    return get


@pytest.fixture(scope="session")
def wedderburn(system):
    """Factory: corpus name -> (algebra, WedderburnData), cached."""
    cache = {}

    def get(name):
        if name not in cache:
            A = generated_cstar(system(name))
            cache[name] = (A, wedderburn_decompose(A))
        return cache[name]

    return get


@pytest.fixture(scope="session")
def config():
    return AnalysisConfig()


@pytest.fixture(scope="session")
def analyses(entries, system, config):
    """Factory: corpus name -> SystemAnalysis, cached across the session."""
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = analyze_system(
                system(name), config, name=name, digest=spec_digest(entries[name].spec)
            )
        return cache[name]

    return get


@pytest.fixture(scope="session")
def pair_analyses(analyses, config):
    """Factory: (left name, right name) -> PairAnalysis, cached."""
    cache = {}

    def get(left, right):
        key = (left, right)
        if key not in cache:
            cache[key] = analyze_pair(analyses(left), analyses(right), config)
        return cache[key]

    return get
