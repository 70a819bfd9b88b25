"""Shape profiling for the linear regions of fully connected ReLU networks."""

from polyprof.geometry import BoundingBox, HalfspaceSystem
from polyprof.network import ActivationPattern, InitConfig, NetworkSpec, build_initialized, load_network
from polyprof.profiler import profile_network, summarize
from polyprof.regions import EnumerationConfig

__all__ = [
    "ActivationPattern",
    "BoundingBox",
    "EnumerationConfig",
    "HalfspaceSystem",
    "InitConfig",
    "NetworkSpec",
    "build_initialized",
    "load_network",
    "profile_network",
    "summarize",
]
