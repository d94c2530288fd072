"""Exception hierarchy shared by every stage of the planner.

Each class carries the process exit code the command line maps it to.
"""


class PlannerError(Exception):
    exit_code = 1


class MapSyntaxError(PlannerError):
    exit_code = 2

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column})" if column is not None else ")")
        super().__init__(f"{message}{where}")


class LtlSyntaxError(PlannerError):
    exit_code = 2

    def __init__(self, message, position=None):
        self.position = position
        where = f" at position {position}" if position is not None else ""
        super().__init__(f"{message}{where}")


class NegationError(LtlSyntaxError):
    pass


class UndeclaredAtomError(LtlSyntaxError):
    pass


class AlphabetMismatchError(PlannerError):
    exit_code = 2


class UnknownStateError(PlannerError):
    exit_code = 2


class PlanError(PlannerError):
    exit_code = 2


class InfeasibleSpecError(PlannerError):
    exit_code = 3


class UnreachableTargetError(PlannerError):
    exit_code = 4
