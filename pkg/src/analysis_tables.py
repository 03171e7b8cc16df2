import math
from fractions import Fraction
from typing import Any, Iterable, Optional

import pandas as pd

from alphabet import Dist, entropy
from composition import check_growth_condition, serial_epoch_trace, serial_partial_efficiency
from errors import ReductionError
from expansions import coin_output_length, fractional_part_below_inverse
from logger import AppLogger
from reductions import (
  arbitrary_to_uniform,
  biased_to_uniform,
  coin_information_bound,
  source_information_bound,
  uniform_to_rational,
  uniform_to_uniform,
)
from residual import staged_stats, uniform_to_arbitrary
from restart import epoch_stats
from utils import format_rational

logger = AppLogger("[AnalysisTables]")

SWEEP_FAMILIES = ("uniform_uniform", "uniform_rational", "uniform_arbitrary", "arbitrary_uniform", "biased_uniform")

# Column order is part of the CSV contract.
SWEEP_COLUMNS = [
  "family",
  "k",
  "c",
  "p",
  "p_succ",
  "latency",
  "m",
  "efficiency_bits",
  "loss_times_k",
  "information_bound",
  "bound_gap_scaled",
  "dirichlet_k",
  "exact",
  "error",
]

LAZY_SWEEP_DEPTH = 64


def _decimal(value: Optional[float]) -> str:
  return "" if value is None else f"{value:.9f}"


def _row(family: str, params: dict[str, Any], k: int) -> dict[str, Any]:
  """One sweep row; construction errors are left for the caller to record."""
  row: dict[str, Any] = {col: "" for col in SWEEP_COLUMNS}
  row.update(family=family, k=k, exact=True)

  if family == "uniform_arbitrary":
    target = Dist.of(params["target"])
    st = staged_stats(uniform_to_arbitrary(params["d"], target, k), LAZY_SWEEP_DEPTH)
    row.update(
      c=format_rational(st.epoch_consumption),
      p=format_rational(Fraction(k)),
      p_succ=format_rational(Fraction(1)),
      latency=format_rational(st.latency),
      m=st.stage_bound,
      efficiency_bits=_decimal(st.efficiency_bits),
      loss_times_k=_decimal((1 - st.efficiency_bits) * k),
      exact=st.complete,
    )
    return row

  if family == "uniform_uniform":
    spec = uniform_to_uniform(params["d"], params["c"], k)
  elif family == "uniform_rational":
    spec = uniform_to_rational(params["d"], params["numerators"], k)
  elif family == "arbitrary_uniform":
    spec = arbitrary_to_uniform(Dist.of(params["source"]), params["c"], k)
  else:
    spec = biased_to_uniform(params["r"], k)

  st = epoch_stats(spec)
  eff = st.efficiency_bits
  row.update(
    c=format_rational(st.c),
    p=format_rational(st.p),
    p_succ=format_rational(st.p_succ),
    latency=format_rational(st.latency) or "",
    m=st.m,
    efficiency_bits=_decimal(eff),
    loss_times_k=_decimal((1 - eff) * k),
  )

  bound = None
  if family == "arbitrary_uniform":
    bound = source_information_bound(Dist.of(params["source"]), params["c"])
    if k >= 2:
      row["bound_gap_scaled"] = _decimal((bound - float(st.ratio)) * k / math.log2(k))
  elif family == "biased_uniform":
    r = params["r"]
    bound = coin_information_bound(r)
    row["bound_gap_scaled"] = _decimal((bound - float(st.ratio)) * k)
    row["dirichlet_k"] = coin_output_length(r, k) > k and fractional_part_below_inverse(r, k)
  row["information_bound"] = _decimal(bound)
  return row


def build_sweep_table(family: str, params: dict[str, Any], ks: Iterable[int]) -> pd.DataFrame:
  """
  Exact epoch statistics of one family over a range of k.

  Columns (fixed order, see ``SWEEP_COLUMNS``):
    c, p, p_succ, latency: exact rationals as "num/den".
    efficiency_bits, loss_times_k: 9 decimals; loss_times_k = (1 - eff)·k.
    information_bound: H(source)/log c (arbitrary_uniform) or
      log_{r-1} r - (r-1)/r (biased_uniform).
    bound_gap_scaled: (bound - ratio)·k/log2 k (arbitrary_uniform, k >= 2) or
      (bound - ratio)·k (biased_uniform).
    dirichlet_k: whether k qualifies for the coin family.
    exact: False when a lazy protocol was truncated before its residuals closed.
    error: construction failure for this k; the sweep goes on.
  """
  if family not in SWEEP_FAMILIES:
    raise ValueError(f"unknown sweep family {family!r}")
  logger.info(f"Building sweep table for {family} with {params}.")

  rows = []
  for k in ks:
    try:
      rows.append(_row(family, params, k))
    except ReductionError as e:
      logger.warning(f"{family} k={k}: {e}")
      row = {col: "" for col in SWEEP_COLUMNS}
      row.update(family=family, k=k, exact=False, error=str(e))
      rows.append(row)

  df = pd.DataFrame(rows, columns=SWEEP_COLUMNS)
  logger.info(f"Sweep finished (rows={len(df)})")
  return df


def epoch_stats_record(spec) -> dict[str, Any]:
  """JSON-ready epoch statistics of a restart spec (the analyze report)."""
  st = epoch_stats(spec)
  record: dict[str, Any] = {
    "name": spec.name,
    "productive": st.productive,
    "c": format_rational(st.c),
    "p": format_rational(st.p),
    "p_succ": format_rational(st.p_succ),
    "latency": format_rational(st.latency),
    "m": st.m,
    "ratio": format_rational(st.ratio),
    "h_mu": st.h_mu,
    "h_nu": st.h_nu,
  }
  record["efficiency_bits"] = st.efficiency_bits if st.h_mu > 0 else None
  record["latency_bits"] = st.latency_bits
  return record


def staged_stats_record(protocol, depth: int) -> dict[str, Any]:
  """JSON-ready staged statistics of a lazy uniform -> arbitrary protocol."""
  st = staged_stats(protocol, depth)
  return {
    "name": protocol.name,
    "productive": True,
    "stages": len(st.stage_consumption),
    "complete": st.complete,
    "epoch_consumption": format_rational(st.epoch_consumption),
    "latency": format_rational(st.latency),
    "p": format_rational(Fraction(st.k)),
    "m": st.stage_bound,
    "rhos": [format_rational(r) for r in st.rhos],
    "lost_mass": format_rational(st.lost_mass),
    "h_mu": math.log2(protocol.d),
    "h_nu": entropy(protocol.target),
    "efficiency_bits": st.efficiency_bits,
  }


def serial_trace_record(chain, n: int) -> dict[str, Any]:
  """JSON-ready trace of the first n components of a serial chain."""
  rows = serial_epoch_trace(chain, n)
  eff = serial_partial_efficiency(chain, n)
  logger.info(f"Traced {n} components of {chain.name}: partial efficiency {eff.bits:.6f}.")
  return {
    "name": chain.name,
    "components": [
      {"index": row.index, "name": row.name, "c": format_rational(row.c),
       "p": format_rational(row.p), "m": row.m}
      for row in rows
    ],
    "ratio": format_rational(eff.ratio),
    "efficiency_bits": eff.bits,
    "growth_ratios": [format_rational(r) for r in check_growth_condition(chain, n)] if n > 1 else [],
  }
