"""Shared fixtures for the clcoherence test suite."""

import numpy as np
import pytest

from clcoherence import BeamParameters

# One-line verdicts appended by tests/test_acceptance.py; echoed after the
# run so they stay visible even under output capture.
ACCEPTANCE_VERDICTS: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_VERDICTS:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def beam200():
    """200 keV electron modulated by an 800 nm laser — the workhorse configuration."""
    return BeamParameters.from_wavelength(200e3, 800.0)


def circular_align(a, b):
    """Best circular shift of ``b`` onto ``a`` (max |diff| after alignment).

    Periodic densities synthesized with different window origins agree only up
    to a cyclic shift by an integer number of samples; this finds the shift
    with maximal cross-correlation and returns the max absolute mismatch.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError("arrays must have identical shapes")
    corr = np.fft.ifft(np.fft.fft(a) * np.conj(np.fft.fft(b)))
    shift = int(np.argmax(corr.real))
    return float(np.max(np.abs(a - np.roll(b, shift))))
