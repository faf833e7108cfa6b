from splatlab.service.app import create_app
from splatlab.service.config import ServiceConfig, load_config
from splatlab.service.metrics import LatencyRecord, MetricsStore
from splatlab.service.sessions import SceneRegistry, SessionHandle, SessionManager

__all__ = [
    "LatencyRecord",
    "MetricsStore",
    "SceneRegistry",
    "ServiceConfig",
    "SessionHandle",
    "SessionManager",
    "create_app",
    "load_config",
]
