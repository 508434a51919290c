"""
Command-line entry point.

	rklab <experiment> --graph g.json [params] --replicates N --seed S --out r.json

Exit codes: 0 pass, 1 statistical failure, 2 usage or configuration error,
3 numerical-failure rate above the threshold.
"""
import argparse
import json
import time
from datetime import datetime, timezone
from typing import Any, Dict, List, Optional
import pydantic
import yaml
import rklab
from rklab.config import settings
from rklab.logging_config import get_logger, setup_logging
from rklab.schemas.run_config import ExperimentId, OutputFormat, RunConfig
from rklab.services.graph_service import GraphService
from rklab.processors import PROCESSORS
from rklab.exceptions import ConfigError, EXIT_USAGE, handle_cli_exceptions
from rklab.utils.report_io import write_report, write_sidecar

logger = get_logger(__name__)

DESCRIPTIONS = {
	ExperimentId.RK2: "Second Ray-Knight identity: local times at tau_u plus a GFF against a shifted GFF square",
	ExperimentId.INVERSE_RK2: "Recover (l(tau_u), phi) from Phi with the magnetized reversed process",
	ExperimentId.RK1: "First Ray-Knight identity with its signed and positive weights",
	ExperimentId.INVERSE_RK1: "Inversion of the first identity, reversed process stopped at x0",
	ExperimentId.MARTINGALE_CHECK: "E[M] = M_0 and E[N] = N_0 at t ^ T",
	ExperimentId.RN_CHECK: "Change of measure between the jump process and the reinforced processes",
	ExperimentId.ISING_TABLE: "Exact Ising log F and magnetizations over a beta grid",
}


def build_parser() -> argparse.ArgumentParser:
	common = argparse.ArgumentParser(add_help=False)
	common.add_argument("--graph", help="Path to the graph JSON file")
	common.add_argument("--u", type=float, help="Local time level at x0 (rk2, inverse-rk2)")
	common.add_argument("--s", type=float, help="Shift of the free field (rk1, inverse-rk1)")
	common.add_argument("--z0", help="Start vertex id (rk1, inverse-rk1)")
	common.add_argument("--t", type=float, nargs="+", help="Horizons (martingale-check, rn-check)")
	common.add_argument("--beta", type=float, nargs="+", help="Inverse temperatures (ising-table)")
	common.add_argument("--replicates", type=int, help="Replicates per pipeline")
	common.add_argument("--seed", type=int, help="Master seed, 64-bit unsigned")
	common.add_argument("--out", help="Report path; stdout when omitted")
	common.add_argument("--format", choices=[f.value for f in OutputFormat], help="Report format")
	common.add_argument("--threads", type=int, help="Worker threads (default RKLAB_THREADS)")
	common.add_argument("--config", help="JSON or YAML file with the same fields as the flags")
	common.add_argument("--log-level", dest="log_level", help="Logging level")
	common.add_argument("--dump-dir", dest="dump_dir", help="Write the first replicate paths here as CSV")
	common.add_argument(
		"--no-power-control", dest="power_control", action="store_const", const=False, default=None,
		help="Skip the rk2 control run with u' = 1.5u",
	)

	parser = argparse.ArgumentParser(prog="rklab", description="Monte Carlo checks of Ray-Knight identities on finite graphs")
	parser.add_argument("--version", action="version", version=f"%(prog)s {rklab.__version__}")
	subparsers = parser.add_subparsers(dest="experiment", metavar="experiment")
	subparsers.required = True
	for experiment in ExperimentId:
		subparsers.add_parser(experiment.value, parents=[common], help=DESCRIPTIONS[experiment])
	return parser


def load_config_file(path: str) -> Dict[str, Any]:
	"""Read a --config file; YAML is a superset of JSON, so one loader covers both."""
	try:
		with open(path, "r", encoding="utf-8") as fh:
			data = yaml.safe_load(fh)
	except FileNotFoundError:
		raise ConfigError(f"Config file not found: {path}")
	except yaml.YAMLError as e:
		raise ConfigError(f"Config file {path} could not be parsed", detail=f"Config file {path} could not be parsed: {e}")
	if data is None:
		return {}
	if not isinstance(data, dict):
		raise ConfigError(f"Config file {path} must contain a mapping")
	return {str(k).replace("-", "_"): v for k, v in data.items()}


def build_run_config(args: argparse.Namespace) -> RunConfig:
	"""Config file first, flags on top, subcommand last."""
	data: Dict[str, Any] = load_config_file(args.config) if args.config else {}
	flags = vars(args).copy()
	flags.pop("config", None)
	data.update({k: v for k, v in flags.items() if v is not None})
	if data.get("graph") is None:
		raise ConfigError(f"{args.experiment} requires --graph")
	if data.get("z0") is not None:
		data["z0"] = str(data["z0"])
	try:
		return RunConfig.from_dict(data)
	except pydantic.ValidationError as e:
		messages = "; ".join(
			f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}" for err in e.errors()
		)
		raise ConfigError("Invalid run configuration", detail=f"Invalid run configuration: {messages}")


@handle_cli_exceptions
def main(argv: Optional[List[str]] = None) -> int:
	parser = build_parser()
	try:
		args = parser.parse_args(argv)
	except SystemExit as e:
		if isinstance(e.code, int):
			return e.code
		return EXIT_USAGE if e.code else 0

	setup_logging(level=args.log_level or settings.log_level)
	config = build_run_config(args)
	g = GraphService.load_graph(config.graph)

	started_at = datetime.now(timezone.utc).isoformat().replace("+00:00", "Z")
	start = time.perf_counter()
	report = PROCESSORS[config.experiment](g, config).execute()
	wall_time = time.perf_counter() - start

	write_report(report, config.out, config.format)
	if config.out is not None:
		write_sidecar(config.out, wall_time, started_at, config.threads)
	logger.info(f"{config.experiment.value}: verdict {report.verdict.value} in {wall_time:.3f}s")
	for check in report.failed_checks:
		logger.warning(f"failed check {check.name}: {json.dumps(check.to_dict())}")
	return report.exit_code
