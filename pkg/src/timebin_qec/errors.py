"""Exception hierarchy shared by the simulator modules."""


class SimulationError(Exception):
    """Base class for all errors raised by timebin_qec."""


class NormalizationError(SimulationError, ValueError):
    """A qubit's amplitudes do not satisfy |alpha|^2 + |beta|^2 = 1."""


class EmptyBranchError(SimulationError, ValueError):
    """A post-selected branch carries (numerically) zero probability."""


class UnknownModeError(SimulationError, ValueError):
    """A spatial mode outside the declared mode set was referenced."""


class OutOfRangeError(SimulationError, ValueError):
    """A time-bin delay lies outside the range a protocol can produce."""


class BinRangeError(OutOfRangeError):
    """A received state occupies time-bins a decoder does not accept."""


class ConfigError(SimulationError, ValueError):
    """Invalid experiment, sampler or CLI configuration."""
