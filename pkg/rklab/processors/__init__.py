from typing import Dict, Type
from rklab.schemas.run_config import ExperimentId
from rklab.processors.base_processor import BaseProcessor
from rklab.processors.rk2_processor import Rk2Processor
from rklab.processors.inverse_rk2_processor import InverseRk2Processor
from rklab.processors.rk1_processor import Rk1Processor
from rklab.processors.inverse_rk1_processor import InverseRk1Processor
from rklab.processors.martingale_processor import MartingaleProcessor
from rklab.processors.rn_processor import RnProcessor
from rklab.processors.ising_table_processor import IsingTableProcessor

PROCESSORS: Dict[ExperimentId, Type[BaseProcessor]] = {
	ExperimentId.RK2: Rk2Processor,
	ExperimentId.INVERSE_RK2: InverseRk2Processor,
	ExperimentId.RK1: Rk1Processor,
	ExperimentId.INVERSE_RK1: InverseRk1Processor,
	ExperimentId.MARTINGALE_CHECK: MartingaleProcessor,
	ExperimentId.RN_CHECK: RnProcessor,
	ExperimentId.ISING_TABLE: IsingTableProcessor,
}

__all__ = [
	"PROCESSORS",
	"BaseProcessor",
	"Rk2Processor",
	"InverseRk2Processor",
	"Rk1Processor",
	"InverseRk1Processor",
	"MartingaleProcessor",
	"RnProcessor",
	"IsingTableProcessor",
]
