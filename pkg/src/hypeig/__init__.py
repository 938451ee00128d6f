"""First Dirichlet eigenvalues of hyperbolic balls and related model computations."""

__version__ = "0.1.0"
