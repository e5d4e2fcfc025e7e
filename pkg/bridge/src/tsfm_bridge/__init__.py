"""Child-process forecaster bridge for the benchmark wire protocol."""

from .config import FAMILY_VARIANTS, BridgeConfig, BridgeConfigError
from .models import ModelLoadError, load_forecaster
from .protocol import serve_forecaster

__version__ = "0.1.0"

__all__ = [
    "BridgeConfig",
    "BridgeConfigError",
    "FAMILY_VARIANTS",
    "ModelLoadError",
    "__version__",
    "load_forecaster",
    "serve_forecaster",
]
