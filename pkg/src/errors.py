"""Exception hierarchy shared by the library and the CLI."""


class ReductionError(Exception):
  """Base class for every error raised by this package."""


class DistributionError(ReductionError):
  """Probabilities are negative, do not sum to one, or vanish under strict mode."""


class AlphabetError(ReductionError):
  """A symbol is out of range or two alphabets do not match."""


class StateError(ReductionError):
  """A state id is not valid for the protocol it was used with."""


class InfeasibleCodeError(ReductionError):
  """Requested codeword lengths violate the Kraft inequality."""


class PrefixCodeError(ReductionError):
  """A code is not prefix-free or is not exhaustive."""


class PreconditionError(ReductionError):
  """Parameters of a reduction family are outside its domain."""


class UnproductiveError(ReductionError):
  """A protocol never emits (p_succ = 0), so its latency is infinite."""


class InsufficientTrialsError(ReductionError):
  """Too few trials for the chi-squared approximation to be trusted."""


class SpecFileError(ReductionError):
  """A protocol spec file does not match the schema."""

  def __init__(self, path: str, message: str):
    self.path = path
    super().__init__(f"{path}: {message}")


class InputDataError(ReductionError):
  """An input stream contains a glyph outside the alphabet."""

  def __init__(self, position: int, glyph: str):
    self.position = position
    self.glyph = glyph
    super().__init__(f"unknown glyph {glyph!r} at position {position}")
