"""Thermometry of a mechanical oscillator via the nonlinear optomechanical interaction.

Subpackages: :mod:`optherm.hilbert` (Fock-space foundations),
:mod:`optherm.dynamics` (probe-state construction and channels),
:mod:`optherm.metrology` (QFI/CFI engines and optimizers),
:mod:`optherm.gaussian` (linearized covariance-matrix benchmark),
:mod:`optherm.wigner` (phase-space evaluation), :mod:`optherm.cli`
(batch front end).
"""

__version__ = "0.1.0"
