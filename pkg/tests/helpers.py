import numpy as np


def crandn(rng, *shape):
    """Unit-variance circular complex Gaussian samples."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)

# filled by the acceptance tests, echoed in the session summary
ACCEPTANCE_LINES: list[str] = []
