import numpy as np
import pytest

from isoclust import Dataset, min_max_normalize

_acceptance_results: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "call":
        _acceptance_results[name] = report.outcome.upper()
    elif report.when == "setup" and report.outcome != "passed":
        _acceptance_results[name] = report.outcome.upper()


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for name in sorted(_acceptance_results):
        terminalreporter.write_line(f"{name}: {_acceptance_results[name]}")


def _sklearn_dataset(loader, name: str) -> Dataset:
    bunch = loader()
    data = Dataset(points=bunch.data, labels=bunch.target, name=name)
    normalized, _ = min_max_normalize(data)
    return normalized


@pytest.fixture(scope="session")
def iris() -> Dataset:
    from sklearn.datasets import load_iris

    return _sklearn_dataset(load_iris, "iris")


@pytest.fixture(scope="session")
def wine() -> Dataset:
    from sklearn.datasets import load_wine

    return _sklearn_dataset(load_wine, "wine")


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def two_blobs() -> Dataset:
    """Two well-separated 5-point groups."""
    gen = np.random.default_rng(7)
    a = gen.normal([0.2, 0.2], 0.02, size=(5, 2))
    b = gen.normal([0.8, 0.8], 0.02, size=(5, 2))
    return Dataset(
        points=np.vstack([a, b]),
        labels=np.array([0] * 5 + [1] * 5),
        name="two_blobs",
    )
