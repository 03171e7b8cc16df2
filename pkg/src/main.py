import argparse
import json
import sys
from typing import Optional, Sequence

import pandas as pd

from analysis_tables import (
  SWEEP_FAMILIES,
  build_sweep_table,
  epoch_stats_record,
  serial_trace_record,
  staged_stats_record,
)
from errors import InputDataError, ReductionError, SpecFileError
from logger import AppLogger, set_level
from sampler import ExactSampler
from settings import load_settings
from spec_files import dump_explicit, load_spec_file
from storage import save_json, save_table_to_csv, table_to_csv_text, to_json_text
from utils import format_rational, iter_glyphs, parse_int_list, parse_rational_list
from verification import chi_square_prefixes, verify_reduction_exact, verify_reduction_lazy
from visualization import generate_sweep_plot

# Exit codes
EXIT_OK = 0
EXIT_SPEC = 1
EXIT_INPUT = 2
EXIT_VERIFY = 3

DEFAULT_SAMPLED_INPUTS = 1000

logger = AppLogger("[Main]")


class UsageError(Exception):
  """Flags that do not fit the command or the protocol kind."""


class CliParser(argparse.ArgumentParser):
  """ArgumentParser whose usage errors follow the exit-code contract (1, not 2)."""

  def error(self, message):
    self.print_usage(sys.stderr)
    self.exit(EXIT_SPEC, f"{self.prog}: error: {message}\n")


def _seed(value: str) -> int:
  seed = int(value)
  if not 0 <= seed < 2 ** 64:
    raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer, got {value}")
  return seed


class Chi2Args(argparse.Action):
  """``--chi2 L TRIALS [SEED]``; without SEED the seed comes from --seed or the settings."""

  def __call__(self, parser, namespace, values, option_string=None):
    if len(values) not in (2, 3):
      parser.error(f"{option_string} takes L TRIALS [SEED], got {len(values)} values")
    try:
      length, trials = int(values[0]), int(values[1])
      seed = _seed(values[2]) if len(values) == 3 else None
    except (ValueError, argparse.ArgumentTypeError) as e:
      parser.error(f"{option_string}: {e}")
    setattr(namespace, self.dest, (length, trials, seed))


def run_convert(args) -> int:
  """
  Stream conversion: glyphs from stdin (default) or symbols sampled with --seed.
  """
  loaded = load_spec_file(args.spec)
  p = loaded.protocol
  out_alphabet = loaded.nu.alphabet
  in_alphabet = loaded.mu.alphabet

  if args.seed is not None and not args.stdin_symbols:
    n = args.n if args.n is not None else DEFAULT_SAMPLED_INPUTS
    sampler = ExactSampler(loaded.mu, args.seed)
    symbols = (sampler.draw() for _ in range(n))
  else:
    symbols = iter_glyphs(sys.stdin.read(), in_alphabet, args.n)

  state, out, consumed = p.start, [], 0
  for a in symbols:
    state, z = p.step(state, a)
    out.extend(z)
    consumed += 1

  sys.stdout.write(out_alphabet.format(out) + "\n")
  if args.stats:
    sys.stderr.write(json.dumps({"consumed": consumed, "produced": len(out)}) + "\n")
  return EXIT_OK


def run_analyze(args) -> int:
  loaded = load_spec_file(args.spec)
  if loaded.restart is not None:
    record = {"family": loaded.family, **epoch_stats_record(loaded.restart)}
    if args.dump_explicit:
      record["explicit"] = dump_explicit(loaded.restart)
  elif loaded.lazy is not None:
    depth = args.depth if args.depth is not None else 64
    record = {"family": loaded.family, **staged_stats_record(loaded.lazy, depth)}
  elif loaded.chain is not None:
    if args.components < 1:
      raise UsageError(f"--components must be >= 1, got {args.components}")
    record = {"family": loaded.family, **serial_trace_record(loaded.chain, args.components)}
  else:
    raise UsageError(f"analyze needs a finite restart, uniform_arbitrary or serial spec, got {loaded.family}")

  if args.format == "csv":
    flat = {k: v for k, v in record.items() if not isinstance(v, (list, dict))}
    sys.stdout.write(table_to_csv_text(pd.DataFrame([flat])))
  else:
    sys.stdout.write(to_json_text(record))
  if args.output:
    save_json(record, args.output)
  return EXIT_OK


def _sweep_params(args) -> dict:
  family = args.family
  needed = {
    "uniform_uniform": ("d", "c"),
    "uniform_rational": ("d", "numerators"),
    "uniform_arbitrary": ("d", "target"),
    "arbitrary_uniform": ("source", "c"),
    "biased_uniform": ("r",),
  }[family]
  params = {}
  for name in needed:
    value = getattr(args, name)
    if value is None:
      raise UsageError(f"sweep --family {family} needs --{name}")
    params[name] = value
  if "numerators" in params:
    params["numerators"] = parse_int_list(params["numerators"])
  for key in ("target", "source"):
    if key in params:
      params[key] = parse_rational_list(params[key])
  return params


def run_sweep(args) -> int:
  try:
    params = _sweep_params(args)
  except ValueError as e:
    raise UsageError(str(e))
  df = build_sweep_table(args.family, params, range(args.k_from, args.k_to + 1))

  if args.format == "json":
    sys.stdout.write(to_json_text(df.to_dict(orient="records")))
  else:
    sys.stdout.write(table_to_csv_text(df))
  if args.output:
    save_table_to_csv(df, args.output)
  return EXIT_OK


def _report_record(report, tolerance: Optional[float] = None) -> dict:
  record = {
    "name": report.name,
    "mode": "lazy" if tolerance is not None else "exact",
    "length": report.length,
    "max_deviation": format_rational(report.max_deviation),
    "complete": report.complete,
    "passed": report.passed(tolerance or 0.0),
    "rows": [
      {"y": list(row.y), "computed": format_rational(row.computed), "expected": format_rational(row.expected)}
      for row in report.rows
    ],
  }
  if tolerance is not None:
    record.update(
      bound=format_rational(report.bound),
      bound_decimal=float(report.bound),
      lost_mass=format_rational(report.lost_mass),
      tolerance=tolerance,
    )
  return record


def run_verify(args) -> int:
  settings = load_settings()
  loaded = load_spec_file(args.spec)

  if args.exact is not None:
    if loaded.restart is None:
      raise UsageError(f"--exact needs a finite restart spec, got {loaded.family}")
    record = _report_record(verify_reduction_exact(loaded.restart, args.exact))

  elif args.lazy is not None:
    if loaded.lazy is None:
      raise UsageError(f"--lazy needs a uniform_arbitrary spec, got {loaded.family}")
    tolerance = args.tolerance if args.tolerance is not None else settings.tolerance
    report = verify_reduction_lazy(loaded.lazy, loaded.nu, args.length, args.lazy)
    record = _report_record(report, tolerance)

  else:
    length, trials, seed = args.chi2
    if seed is not None and args.seed is not None:
      raise UsageError("give the chi-squared seed either after --chi2 or with --seed, not both")
    if seed is None:
      seed = args.seed if args.seed is not None else settings.default_seed
    result = chi_square_prefixes(loaded.protocol, loaded.mu, loaded.nu, length, trials, seed)
    record = {
      "name": loaded.protocol.name,
      "mode": "chi2",
      "length": length,
      "trials": trials,
      "seed": seed,
      "statistic": result.statistic,
      "threshold": result.threshold,
      "p_value": result.p_value,
      "dof": result.dof,
      "quantile": result.quantile,
      "passed": result.passed,
    }

  sys.stdout.write(to_json_text(record))
  return EXIT_OK if record["passed"] else EXIT_VERIFY


def run_plot(args) -> int:
  try:
    generate_sweep_plot(args.sweep_csv, args.output)
  except (OSError, KeyError, ValueError) as e:
    raise UsageError(f"cannot plot {args.sweep_csv}: {e}")
  return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
  parser = CliParser(prog="reductions", description="Entropy-conserving reductions between random processes")
  parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG logs on stderr")
  sub = parser.add_subparsers(dest="command", required=True, parser_class=CliParser)

  # convert
  p_conv = sub.add_parser("convert", help="Run a protocol over an input symbol stream")
  p_conv.add_argument("spec", help="Protocol spec file (JSON)")
  p_conv.add_argument("--seed", type=_seed, help="Sample the input stream from μ with this seed")
  p_conv.add_argument("--stdin-symbols", action="store_true", help="Read input glyphs from stdin (default)")
  p_conv.add_argument("-n", type=int, help="Number of input symbols to consume")
  p_conv.add_argument("--stats", action="store_true", help="Print consumed/produced counts to stderr")
  p_conv.set_defaults(handler=run_convert)

  # analyze
  p_an = sub.add_parser("analyze", help="Exact epoch statistics of a spec")
  p_an.add_argument("spec")
  p_an.add_argument("--format", choices=["json", "csv"], default="json")
  p_an.add_argument("--depth", type=int, help="Residual stages to explore (uniform_arbitrary)")
  p_an.add_argument("--dump-explicit", action="store_true", help="Include the explicit code table")
  p_an.add_argument("--components", type=int, default=10, help="Components to trace (serial)")
  p_an.add_argument("--output", help="Also save the JSON report here")
  p_an.set_defaults(handler=run_analyze)

  # sweep
  p_sw = sub.add_parser("sweep", help="Tabulate a family over a range of k")
  p_sw.add_argument("--family", choices=SWEEP_FAMILIES, required=True)
  p_sw.add_argument("--d", type=int)
  p_sw.add_argument("--c", type=int)
  p_sw.add_argument("--r", type=int)
  p_sw.add_argument("--numerators", help="Comma-separated integers, e.g. 1,3")
  p_sw.add_argument("--target", help="Comma-separated rationals, e.g. 1/3,2/3")
  p_sw.add_argument("--source", help="Comma-separated rationals, e.g. 1/3,2/3")
  p_sw.add_argument("--k-from", type=int, default=1)
  p_sw.add_argument("--k-to", type=int, default=10)
  p_sw.add_argument("--format", choices=["csv", "json"], default="csv")
  p_sw.add_argument("--output", help="Also save the CSV here")
  p_sw.set_defaults(handler=run_sweep)

  # verify
  p_ver = sub.add_parser("verify", help="Check that a protocol is a reduction")
  p_ver.add_argument("spec")
  mode = p_ver.add_mutually_exclusive_group(required=True)
  mode.add_argument("--exact", type=int, metavar="L", help="Exact prefix probabilities up to length L")
  mode.add_argument("--chi2", nargs="+", action=Chi2Args, metavar="N",
                    help="L TRIALS [SEED]: chi-squared test of the first L symbols over TRIALS runs")
  mode.add_argument("--lazy", type=int, metavar="DEPTH", help="Residual-stage verification to DEPTH stages")
  p_ver.add_argument("--length", type=int, default=2, help="Prefix length for --lazy")
  p_ver.add_argument("--seed", type=_seed)
  p_ver.add_argument("--tolerance", type=float, help="Largest acceptable truncation bound for --lazy")
  p_ver.set_defaults(handler=run_verify)

  # plot
  p_plot = sub.add_parser("plot", help="Plot a sweep CSV")
  p_plot.add_argument("sweep_csv")
  p_plot.add_argument("--output", required=True, help="PNG path")
  p_plot.set_defaults(handler=run_plot)

  return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
  parser = build_parser()
  args = parser.parse_args(argv)
  if args.verbose:
    set_level("DEBUG" if args.verbose > 1 else "INFO")

  try:
    return args.handler(args)
  except InputDataError as e:
    logger.error(f"Input error: {e}")
    sys.stderr.write(f"error: {e}\n")
    return EXIT_INPUT
  except SpecFileError as e:
    logger.error(f"Spec error at {e.path}: {e}")
    sys.stderr.write(f"error: {e}\n")
    return EXIT_SPEC
  except (UsageError, ReductionError) as e:
    logger.error(f"{type(e).__name__}: {e}")
    sys.stderr.write(f"error: {e}\n")
    return EXIT_SPEC


if __name__ == "__main__":
  sys.exit(main())
