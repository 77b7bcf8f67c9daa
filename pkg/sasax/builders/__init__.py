from .elliptic import new_e1
from .torus import new_t4
from .x_manifold import XManifoldBuilder, build_x

__all__ = ["new_e1", "new_t4", "XManifoldBuilder", "build_x"]
