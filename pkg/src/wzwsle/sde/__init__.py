from .kernels import active_backend  # noqa: F401
from .laurent import LaurentState, NoisePath  # noqa: F401
