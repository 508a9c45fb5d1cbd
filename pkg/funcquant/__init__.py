"""funcquant package initialization."""

__version__ = "0.1.0"

from .config import Config, load_config  # noqa: E402
from .cli import app  # noqa: E402

__all__ = ["Config", "load_config", "app", "__version__"]
