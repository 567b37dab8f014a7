"""momsec: numerical certification of momentum-section geometry on Lie algebroids."""

from .modelfile import Model, ModelError, load_model, load_model_bytes
from .reporting import CheckReport, CheckResult
from .suites import RunConfig, SuiteError, run

__version__ = "0.1.0"

__all__ = [
    "CheckReport",
    "CheckResult",
    "Model",
    "ModelError",
    "RunConfig",
    "SuiteError",
    "load_model",
    "load_model_bytes",
    "run",
]
