import numpy as np
import pytest

from poincare_convex.spectral_core import HarmonicSpectrum, harmonic_dimension


@pytest.fixture
def rng():
    return np.random.default_rng(20201)


def random_spectrum(rng, d, band_limit, low=0, high=None, scale=1.0):
    """Random coefficients on degrees [low, high]; zero elsewhere."""
    high = band_limit if high is None else high
    blocks = []
    for n in range(band_limit + 1):
        size = harmonic_dimension(n, d)
        if low <= n <= high:
            blocks.append(scale * rng.normal(size=size))
        else:
            blocks.append(np.zeros(size))
    return HarmonicSpectrum(tuple(blocks), d)


def single_block(d, n, sq_norm=1.0, slot=0, band_limit=None):
    """Spectrum with one nonzero coefficient sqrt(sq_norm) in degree n."""
    N = n if band_limit is None else band_limit
    blocks = [np.zeros(harmonic_dimension(k, d)) for k in range(N + 1)]
    blocks[n][slot] = np.sqrt(sq_norm)
    return HarmonicSpectrum(tuple(blocks), d)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k, title in mod.CRITERIA.items():
        if k not in mod.RESULTS:
            terminalreporter.write_line(f"criterion {k:2d} {title}: NOT RUN")
            continue
        ok, detail = mod.RESULTS[k]
        terminalreporter.write_line(f"criterion {k:2d} {title}: {'PASS' if ok else 'FAIL'} ({detail})")
