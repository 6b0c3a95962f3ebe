from app.flow.base import ExperimentFlow, FlowOutcome
from app.flow.flow_factory import FlowFactory, FlowType


__all__ = ["ExperimentFlow", "FlowFactory", "FlowOutcome", "FlowType"]
