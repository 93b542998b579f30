"""Two-person quantum games on two qubits.

Submodules
----------
core        dense one- and two-qubit linear algebra
scheme      two-qubit game scheme and closed-form payoffs
games       canonical games, Nash search and named results
channels    single-qubit channels and correlated dephasing
qkd         game-based key distribution with an eavesdropper
tomography  single-qubit state tomography through payoffs
cli         command-line front end
"""

__version__ = "0.1.0"
