from __future__ import annotations

import pytest

from giat_grouping.bench_suite import (BaseFunctionKind, ProblemSpec, SubcomponentSpec, example1,
                                       example1_spec)
from giat_grouping.experiment import ExperimentConfig, ProblemEntry


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long seed sweeps and full-suite runs")


def _two_group_spec(separable_dims: int = 6, group_size: int = 3) -> ProblemSpec:
    """Two rotated Elliptic groups plus a separable Sphere block."""
    return ProblemSpec(
        separable_dims=separable_dims,
        separable_base=BaseFunctionKind.SPHERE,
        subcomponents=(SubcomponentSpec(group_size, BaseFunctionKind.ELLIPTIC, rotated=True),
                       SubcomponentSpec(group_size, BaseFunctionKind.ELLIPTIC, rotated=True)),
    )


@pytest.fixture
def two_group_spec() -> ProblemSpec:
    return _two_group_spec()


@pytest.fixture
def example1_balanced():
    return example1(1.0, 1.0)


@pytest.fixture
def example1_imbalanced():
    return example1(1e-6, 1.0)


@pytest.fixture
def small_config(tmp_path) -> ExperimentConfig:
    return ExperimentConfig(
        problems=(
            ProblemEntry("example1_imbalanced", example1_spec(1e-6, 1.0), seed=0),
            ProblemEntry("separable_sphere", ProblemSpec(separable_dims=10)),
            ProblemEntry("two_group", _two_group_spec()),
        ),
        output_dir=str(tmp_path / "out"),
        master_seed=5,
    )
