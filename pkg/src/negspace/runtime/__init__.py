"""Executable surface: network simulator, scripted agents, session authority,
live server with gateway, headless client, and the CLI."""

from .agents import AgentPolicy, Instruction, Interpretation, ParticipantAgent
from .config import EngineConfig, load_config
from .netsim import ConfigError, NetworkModel, SimLink, VirtualClock
from .sessioncore import SessionCore, SessionFull
from .simulate import SimulationResult, default_policies, simulate_session

__all__ = [name for name in dir() if not name.startswith("_")]
