from rklab.schemas.base import BaseSchema
from rklab.schemas.graph import VertexId, EdgeSpec, GraphSpec, WeightedGraph
from rklab.schemas.path import EndReason, EndKind, StopRule, JumpPath, ReversedRun
from rklab.schemas.ising import IsingSpec
from rklab.schemas.report import StatisticKind, Verdict, CheckRecord, ExperimentReport
from rklab.schemas.run_config import ExperimentId, OutputFormat, RunConfig

__all__ = [
	"BaseSchema",
	"VertexId",
	"EdgeSpec",
	"GraphSpec",
	"WeightedGraph",
	"EndReason",
	"EndKind",
	"StopRule",
	"JumpPath",
	"ReversedRun",
	"IsingSpec",
	"StatisticKind",
	"Verdict",
	"CheckRecord",
	"ExperimentReport",
	"ExperimentId",
	"OutputFormat",
	"RunConfig",
]
