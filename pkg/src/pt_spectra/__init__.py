"""pt-spectra: spectra and PT-phase analysis of oscillator Hamiltonians
with non-Hermitian couplings, in truncated number-state bases."""

__version__ = "0.1.0"
