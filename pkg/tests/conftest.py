import os
import random

import pytest

from dynsigma.algebra.exactpoly import ExactPolynomial
from dynsigma.core.errors import NotAMorphismError
from dynsigma.dynamics.families import SplitSpec, split_endomorphism
from dynsigma.dynamics.projdyn import DynamicalSystem, new_dynamical_system, projective_variables


def pytest_addoption(parser):
    parser.addoption(
        "--tier",
        action="store",
        default=os.getenv("TIER", "fast"),
        choices=("fast", "slow"),
        help="fast skips tests marked slow",
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--tier") == "slow":
        return
    skip_slow = pytest.mark.skip(reason="slow tier; run with --tier slow or TIER=slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(scope="session")
def seed():
    value = int(os.getenv("TEST_SEED", random.SystemRandom().randrange(1 << 30)))
    print(f"\nTEST_SEED={value}")
    return value


@pytest.fixture
def rng(seed, request):
    # one stream per test, so reordering tests keeps each reproducible
    return random.Random(f"{seed}:{request.node.nodeid}")


@pytest.fixture
def cli_env(monkeypatch, tmp_path):
    monkeypatch.setenv("NAME_APP", "dynsigma-test")
    monkeypatch.setenv("RUN_ENVIRONMENT", "development")
    monkeypatch.delenv("PATH_RESULTS", raising=False)
    monkeypatch.delenv("OUTPUT_FORMAT", raising=False)
    monkeypatch.delenv("TIER", raising=False)
    monkeypatch.chdir(tmp_path)
    return tmp_path


def _random_form(rng: random.Random, names, degree: int, bound: int) -> ExactPolynomial:
    terms = {}
    n = len(names)

    def monomials(remaining, slots):
        if slots == 1:
            yield (remaining,)
            return
        for e in range(remaining, -1, -1):
            for rest in monomials(remaining - e, slots - 1):
                yield (e,) + rest

    for mono in monomials(degree, n):
        terms[mono] = rng.randint(-bound, bound)
    return ExactPolynomial(names, terms)


def _random_morphism(rng: random.Random, N: int, d: int, bound: int) -> DynamicalSystem:
    names = projective_variables(N)
    while True:
        coords = [_random_form(rng, names, d, bound) for _ in range(N + 1)]
        if any(c.is_zero or c.degree() != d for c in coords):
            continue
        try:
            return new_dynamical_system(coords)
        except NotAMorphismError:
            continue


@pytest.fixture
def make_morphism(rng):
    """Random endomorphism of P^N with integer coefficients in [-bound, bound]."""

    def build(N: int, d: int, bound: int = 9) -> DynamicalSystem:
        return _random_morphism(rng, N, d, bound)

    return build


def _random_split_component(rng: random.Random, bound: int) -> ExactPolynomial:
    # x^2 + b*x + c with simple fixed points: x^2 + (b - 1)*x + c has nonzero discriminant
    while True:
        b, c = rng.randint(-bound, bound), rng.randint(-bound, bound)
        if (b - 1) ** 2 != 4 * c:
            return ExactPolynomial(("x",), {(2,): 1, (1,): b, (0,): c})


@pytest.fixture
def make_split_plane(rng):
    """Random split quadratic map of P^2; sparse enough for chow mode."""

    def build(bound: int = 3) -> DynamicalSystem:
        spec = SplitSpec((_random_split_component(rng, bound), _random_split_component(rng, bound)))
        return split_endomorphism(spec)

    return build
