"""HTTP sidecar serving token-level contextual embeddings to navscore."""
from navscore_sidecar.service import SidecarConfig, TokenEmbedder, create_app, serve

__version__ = "0.1.0"

__all__ = ["SidecarConfig", "TokenEmbedder", "create_app", "serve", "__version__"]
