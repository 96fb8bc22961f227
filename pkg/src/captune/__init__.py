"""captune: safe exploration of hardware configuration spaces under a power cap.

A resource-manager toolkit built around an iterative control loop (monitor,
construct a predicted-safe set restricted to a neighborhood of the last safe
configuration, optimize the objective inside it), the usual comparison
policies, and a seeded synthetic execution-space simulator standing in for
real cluster hardware.
"""

from . import controller, harness, metrics, model, sim, space

__all__ = ["space", "model", "controller", "sim", "metrics", "harness"]
__version__ = "0.1.0"
