from enum import Enum, IntEnum
from typing import Literal


class SweepKind(str, Enum):
    """Sweep families of the ``sweep`` command"""

    NOISE = "noise"
    LENGTHS = "lengths"
    MASSES = "masses"
    SUCCESS = "success"


SWEEP_KIND_VALUES = tuple(kind.value for kind in SweepKind)
SWEEP_KIND_TYPE = Literal[SWEEP_KIND_VALUES]  # type: ignore


class ExitCode(IntEnum):
    """Process exit codes of the command-line runner"""

    SUCCESS = 0
    CONFIG_ERROR = 1
    RUNTIME_ERROR = 2
    TRACKING_FAILURE = 3
