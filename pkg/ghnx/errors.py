"""Exceptions raised by ghnx

All errors derive from `GhnxError`, itself a `RuntimeError`. The command line
maps `ConfigError` to exit code 2 and every other `GhnxError` to exit code 3.
"""


class GhnxError(RuntimeError):
    """Base class for ghnx errors"""


class DimensionError(GhnxError, ValueError):
    """Operand shapes are incompatible or an output extent underflows"""


class InputError(GhnxError, ValueError):
    """An argument is outside its documented range"""


class GraphError(GhnxError):
    """Architecture graph is structurally invalid (e.g. cyclic)

    Parameters
    ----------
    msg: str
       error message
    witness: list of int, optional
       node ids forming a cycle, when one was found
    """

    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


class ArchParseError(GhnxError):
    """Architecture text could not be parsed

    Parameters
    ----------
    msg: str
       error message
    location: str
       where parsing failed: "line L column C" for malformed JSON, else a
       path into the document such as "nodes[3].op"
    """

    def __init__(self, msg, location=None):
        if location is not None:
            msg = f"{location}: {msg}"
        super().__init__(msg)
        self.location = location


class ConfigError(GhnxError):
    """Configuration values are missing, unknown or inconsistent"""


class ModeError(GhnxError):
    """Operation requested in the wrong mode (standard vs anytime)"""


class NumericError(GhnxError):
    """Non-finite values appeared in a computation"""


class OptimizerError(GhnxError):
    """Optimizer received an unusable gradient

    Parameters
    ----------
    msg: str
       error message
    name: str
       name of the offending parameter
    """

    def __init__(self, msg, name=None):
        super().__init__(msg)
        self.name = name


class AssemblyError(GhnxError):
    """Candidate network could not be assembled

    Parameters
    ----------
    msg: str
       error message
    node: int or str
       node (or network part) whose weights are missing or mis-shaped
    """

    def __init__(self, msg, node=None):
        super().__init__(msg)
        self.node = node


class TrainingError(GhnxError):
    """GHN training diverged

    Parameters
    ----------
    msg: str
       error message
    graph_json: str
       serialized architecture that produced the failure, for reproduction
    """

    def __init__(self, msg, graph_json=None):
        super().__init__(msg)
        self.graph_json = graph_json


class StatisticsError(GhnxError):
    """Statistic is undefined for the given data (e.g. zero variance)"""


class CheckpointError(GhnxError):
    """Checkpoint file is corrupt or has the wrong schema version"""
