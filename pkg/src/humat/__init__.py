"""HUMAT socio-cognitive agents: deterministic simulation and replication tooling."""

from .communication import InfluenceParams
from .config import ActivationOrder, BeliefInit, ScenarioConfig, load_config, parse_config
from .core import Alternative, DilemmaStatus, Humat, Motive, MotiveGroup, MotiveState
from .engine import ModelState, initialize, run, step
from .network import AlterRepresentation, CommunicationEvent, EventKind, NetworkSpec, SocialNetwork

__version__ = "0.1.0"

__all__ = [
    "ActivationOrder", "AlterRepresentation", "Alternative", "BeliefInit", "CommunicationEvent",
    "DilemmaStatus", "EventKind", "Humat", "InfluenceParams", "ModelState", "Motive", "MotiveGroup",
    "MotiveState", "NetworkSpec", "ScenarioConfig", "SocialNetwork", "initialize", "load_config",
    "parse_config", "run", "step",
]
