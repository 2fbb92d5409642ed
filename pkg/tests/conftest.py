import numpy as np
import pytest

from sqakz.core import BathKernel, CouplingSet, SpinField, build_kernel


def random_field(rng: np.random.Generator, L: int, P: int,
                 with_cache: bool = False,
                 kernel: BathKernel | None = None) -> SpinField:
    spins = rng.choice(np.array([-1, 1], dtype=np.int8), size=(L, P))
    field = SpinField(spins)
    if with_cache:
        assert kernel is not None
        field.enable_bath_cache(kernel)
    return field


def random_couplings(rng: np.random.Generator, beta_eff: float = 1.0,
                     alpha: float = 0.0) -> CouplingSet:
    return CouplingSet(J=float(rng.uniform(0.0, 1.0)),
                       Gamma=float(rng.uniform(0.05, 1.0)),
                       gamma=float(rng.uniform(0.0, 2.0)),
                       beta_eff=beta_eff, alpha=alpha)


@pytest.fixture
def nprng():
    return np.random.default_rng(20240817)
