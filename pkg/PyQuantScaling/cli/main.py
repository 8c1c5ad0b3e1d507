import sys
import json
import typing
import logging
import argparse
import pandas
from PyQuantScaling.cli.config import ExperimentConfig, apply_overrides
from PyQuantScaling.cli.sweep import run_sweep
from PyQuantScaling.cli.verify import SUITES, VerifySettings, format_report, verify, write_report
from PyQuantScaling.errors import OutOfRegimeError, SweepFailedError
from PyQuantScaling.fit.data import AXES
from PyQuantScaling.fit.power_law import aggregate_points, fit_single_axis, theory_exponent
from PyQuantScaling.theory.coefficients import compound_coefficients
from PyQuantScaling.theory.data import ADDITIVE, BOUND_SIDES, MULTIPLICATIVE
from PyQuantScaling.theory.effective_sizes import bound_envelope, effective_sizes, lower_bound_regime
from PyQuantScaling.utilities import setup_logging


logger = logging.getLogger(__name__)

FAMILY_ALIASES = {"mult": MULTIPLICATIVE, "add": ADDITIVE, MULTIPLICATIVE: MULTIPLICATIVE, ADDITIVE: ADDITIVE}


def build_parser() -> argparse.ArgumentParser:
	parser = argparse.ArgumentParser(
			prog="PyQuantScaling",
			description="Scaling-law experiments for quantized SGD on sketched linear regression.",
	)
	subparsers = parser.add_subparsers(dest="command", required=True)
	
	sweep = subparsers.add_parser("sweep", help="Run a sweep described by a JSON config.")
	sweep.add_argument("--config", required=True, help="Path to the JSON experiment config.")
	sweep.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE", help="Dotted config override.")
	sweep.add_argument("--output-dir", default=None, help="Overrides output_dir of the config.")
	sweep.add_argument("--workers", type=int, default=None, help="Overrides workers of the config.")
	sweep.add_argument("--quiet", action="store_true", help="Hide the progress bar.")
	
	verify_parser = subparsers.add_parser("verify", help="Run a property suite.")
	verify_parser.add_argument("suite", choices=SUITES)
	verify_parser.add_argument("--config", default=None, help="JSON file with verify settings (top level or a 'verify' section).")
	verify_parser.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")
	verify_parser.add_argument("--output-dir", default="verify_reports", help="Report directory.")
	
	fit = subparsers.add_parser("fit", help="Fit a power law to a points or runs CSV.")
	fit.add_argument("--points", required=True, help="points.csv (or runs.csv) of a sweep.")
	fit.add_argument("--axis", required=True, choices=AXES)
	fit.add_argument("--a", type=float, default=None, help="Spectrum exponent, adds the theoretical exponent.")
	
	theory = subparsers.add_parser("theory", help="Print compound coefficients and effective sizes as JSON.")
	theory.add_argument("--family", required=True, choices=sorted(FAMILY_ALIASES))
	theory.add_argument("--eps", required=True, type=float, nargs="+", help="One value for every site or seven values (d s f l p a o).")
	theory.add_argument("--eps-lower", type=float, nargs="+", default=None, help="Lower site values. Defaults to --eps.")
	theory.add_argument("--M", type=int, required=True)
	theory.add_argument("--N", type=int, required=True)
	theory.add_argument("--a", type=float, required=True)
	theory.add_argument("--p", type=int, default=1000)
	theory.add_argument("--gamma", type=float, default=0.1)
	theory.add_argument("--sigma", type=float, default=0.0)
	theory.add_argument("--side", choices=BOUND_SIDES, action="append", default=None, help="Bound sides to report. Defaults to all.")
	
	return parser


def _site_values(values: typing.Sequence[float]) -> list[float]:
	if len(values) == 1:
		return list(values) * 7
	
	if len(values) != 7:
		raise ValueError(f"Expected 1 or 7 eps values, got {len(values)}")
	
	return list(values)


def command_sweep(args: argparse.Namespace) -> int:
	overrides = list(args.overrides)
	
	if args.output_dir is not None:
		overrides.append(f"output_dir={json.dumps(args.output_dir)}")
	
	if args.workers is not None:
		overrides.append(f"workers={args.workers}")
	
	config = ExperimentConfig.from_json(args.config, overrides)
	setup_logging(config.output_dir)
	
	try:
		outputs = run_sweep(config, progress=not args.quiet)
	except SweepFailedError as error:
		logger.error(str(error))
		return 1
	
	print(json.dumps(outputs, indent=4))
	
	return 0


def command_verify(args: argparse.Namespace) -> int:
	data = {}
	
	if args.config is not None:
		with open(args.config, "r", encoding="utf-8") as file:
			data = json.load(file)
	
		data = data.get("verify", data)
	
	settings = VerifySettings.from_dict(apply_overrides(dict(data), args.overrides))
	setup_logging(args.output_dir)
	
	report = verify(args.suite, settings)
	write_report(report, args.output_dir)
	print(format_report(report), end="")
	
	return 0 if report["passed"] else 1


def command_fit(args: argparse.Namespace) -> int:
	frame = pandas.read_csv(args.points)
	
	if "mean_excess" in frame.columns:
		points = frame.to_dict("records")
	else:
		points = aggregate_points(frame)
	
	fit = dict(fit_single_axis(points, args.axis))
	
	if args.a is not None:
		fit["theory_exponent"] = theory_exponent(args.a, args.axis)
		fit["abs_gap"] = abs(fit["exponent"] - fit["theory_exponent"])
	
	print(json.dumps(fit, indent=4))
	
	return 0


def command_theory(args: argparse.Namespace) -> int:
	family = FAMILY_ALIASES[args.family]
	upper = _site_values(args.eps)
	lower = _site_values(args.eps_lower) if args.eps_lower is not None else upper
	
	coeffs = compound_coefficients(family, upper, lower, args.p, args.M, args.a)
	sides = {}
	
	for side in args.side or BOUND_SIDES:
		try:
			sizes = effective_sizes(coeffs, args.M, args.N, args.a, side, args.gamma)
			sides[side] = {**sizes, "envelope": bound_envelope(sizes, coeffs, args.sigma, args.a, args.N)}
		except OutOfRegimeError as error:
			sides[side] = {"error": str(error)}
	
	output = {
		"coefficients": coeffs,
		"effective_sizes": sides,
		"lower_bound_regime": lower_bound_regime(coeffs, args.M, args.N, args.a, args.gamma),
	}
	print(json.dumps(output, indent=4))
	
	return 0


_COMMANDS = {
	"sweep": command_sweep,
	"verify": command_verify,
	"fit": command_fit,
	"theory": command_theory,
}


def main(argv: typing.Optional[typing.Sequence[str]] = None) -> int:
	"""
    Command line entry point.

    :Usage:
        python -m PyQuantScaling sweep --config configs/a2_mult_neff.json --set workers=8
        python -m PyQuantScaling verify dynamics
        python -m PyQuantScaling theory --family mult --eps 1e-3 --M 200 --N 10000 --a 2
    """
	args = build_parser().parse_args(argv)
	
	try:
		return _COMMANDS[args.command](args)
	except (ValueError, OSError) as error:
		logging.getLogger("PyQuantScaling").error(f"{args.command} failed: {error}")
		print(f"error: {error}", file=sys.stderr)
		return 2
