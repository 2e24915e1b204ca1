import pytest

import levymut as lm


def make_baseline(**overrides):
    """Symmetric persistent configuration with diffusion and one jump mark."""
    kwargs = dict(
        r1=0.5, b1=1.0, K1=2.0, eps1=0.5,
        r2=0.5, b2=1.0, K2=2.0, eps2=0.5,
        alpha1=0.2, alpha2=0.2,
        marks=lm.MarkTable(
            (lm.Mark(1.0, lm.Constant(0.1), lm.Constant(0.1)),)
        ),
        x0=0.5, y0=0.5,
    )
    kwargs.update(overrides)
    return lm.ModelSpec(**kwargs)


def make_extinct(**overrides):
    """Symmetric configuration with noise penalty above the growth rate."""
    kwargs = dict(
        r1=0.1, b1=1.0, K1=2.0, eps1=0.5,
        r2=0.1, b2=1.0, K2=2.0, eps2=0.5,
        alpha1=0.8, alpha2=0.8,
        x0=0.5, y0=0.5,
    )
    kwargs.update(overrides)
    return lm.ModelSpec(**kwargs)


def make_unit_symmetric(**overrides):
    """Noise-free r=b=K=eps=1 model; equilibrium at the golden-ratio point."""
    kwargs = dict(
        r1=1.0, b1=1.0, K1=1.0, eps1=1.0,
        r2=1.0, b2=1.0, K2=1.0, eps2=1.0,
        x0=0.5, y0=0.5,
    )
    kwargs.update(overrides)
    return lm.ModelSpec(**kwargs)


@pytest.fixture(scope="session")
def baseline_model():
    return make_baseline()


@pytest.fixture(scope="session")
def extinct_model():
    return make_extinct()


@pytest.fixture(scope="session")
def unit_symmetric_model():
    return make_unit_symmetric()
