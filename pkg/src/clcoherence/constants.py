"""Physical constants in the package unit system.

UNITS: energies in eV, times in fs, lengths in nm. Angular frequencies are
rad/fs, wavenumbers rad/nm. All public APIs use these units unless a name
says otherwise.
"""

HBAR_EV_FS = 0.6582119569
"""Reduced Planck constant, eV*fs."""

C_NM_FS = 299.792458
"""Speed of light, nm/fs."""

HBARC_EV_NM = 197.3269804
"""hbar*c, eV*nm."""

ELECTRON_REST_EV = 510998.95
"""Electron rest energy m*c^2, eV."""

TWO_PI = 6.283185307179586
