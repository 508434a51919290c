"""
Report emission: JSON body, CSV check summary, plot-ready tables and the timing sidecar.
"""
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional, Union
import pandas as pd
from rklab.schemas.report import ExperimentReport
from rklab.schemas.run_config import OutputFormat

logger = logging.getLogger(__name__)

SUMMARY_COLUMNS = ["name", "estimate", "stderr", "target", "stat", "p", "verdict"]
FLOAT_FORMAT = "%.17g"


def summary_frame(report: ExperimentReport) -> pd.DataFrame:
	"""One row per check."""
	rows = [
		{
			"name": check.name,
			"estimate": check.estimate,
			"stderr": check.stderr,
			"target": check.target,
			"stat": check.statistic,
			"p": check.p_value,
			"verdict": "pass" if check.passed else "fail",
		}
		for check in report.checks
	]
	return pd.DataFrame(rows, columns=SUMMARY_COLUMNS)


def write_report(
	report: ExperimentReport,
	out: Optional[Union[str, Path]],
	format: Union[OutputFormat, str] = OutputFormat.JSON,
) -> List[Path]:
	"""
	Write the report in the requested format and return the files written.

	`both` writes <stem>.json and <stem>.csv next to `out`. Tables (ising-table)
	go to <stem>.<table>.csv. Without `out` the JSON body is printed to stdout.
	"""
	format = OutputFormat(format)
	if out is None:
		sys.stdout.write(report.to_json() + "\n")
		return []

	out = Path(out)
	out.parent.mkdir(parents=True, exist_ok=True)
	written: List[Path] = []
	if format == OutputFormat.BOTH:
		targets = {OutputFormat.JSON: out.with_suffix(".json"), OutputFormat.CSV: out.with_suffix(".csv")}
	else:
		targets = {format: out}

	if OutputFormat.JSON in targets:
		path = targets[OutputFormat.JSON]
		path.write_text(report.to_json() + "\n", encoding="utf-8")
		written.append(path)
	if OutputFormat.CSV in targets:
		path = targets[OutputFormat.CSV]
		summary_frame(report).to_csv(path, index=False, float_format=FLOAT_FORMAT)
		written.append(path)

	for table_name, rows in report.tables.items():
		path = out.with_name(f"{out.stem}.{table_name}.csv")
		pd.DataFrame(rows).to_csv(path, index=False, float_format=FLOAT_FORMAT)
		written.append(path)

	for path in written:
		logger.info(f"Wrote {path}")
	return written


def write_sidecar(out: Union[str, Path], wall_time: float, started_at: str, threads: int) -> Path:
	"""Timing data kept out of the report body: <out>.meta.json."""
	out = Path(out)
	path = out.with_name(out.name + ".meta.json")
	payload = {"started_at": started_at, "wall_time_seconds": wall_time, "threads": threads}
	path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
	return path
