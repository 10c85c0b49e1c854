"""Entanglement detection with learning by confusion.

Modules
-------
numkernel   linear algebra on states and unitaries
qstate      density matrices and canonical states
qchannel    Kraus channels (depolarizing, amplitude damping, Bell dephasing)
entwitness  concurrence and PPT oracles
sicpovm     Weyl-Heisenberg SIC-POVMs and tomography
trajectory  state families and labeled datasets
ffnn        one-hidden-layer classifier with Adam
confusion   W-shape sweeps, peak extraction, phase diagrams, classification
fixtures    golden reference values
cli         command-line entry point
"""

from .errors import (
    ChannelError,
    ConstructionError,
    DataError,
    DimensionError,
    DivergenceError,
    DomainError,
    EntConfusionError,
    FixtureError,
    NoPeakError,
    NormError,
    ShapeError,
    StateError,
    SymmetryError,
    UnitarityError,
)

__version__ = "0.1.0"
