"""
Custom exception classes
"""
from typing import List, Optional


class HerculesException(Exception):
    """Base exception for the Hercules application"""
    def __init__(self, message: str, status_code: int = 400, exit_code: int = 3):
        self.message = message
        self.status_code = status_code
        self.exit_code = exit_code
        super().__init__(self.message)


class RequirementError(HerculesException):
    """Exception for requirements violating their invariants"""
    def __init__(self, message: str = "Invalid requirement"):
        super().__init__(message, status_code=422, exit_code=2)


class DegenerateRequirement(RequirementError):
    """Maximum rate not strictly above the minimum rate"""
    def __init__(self, message: str = "max_rate must be strictly greater than min_rate"):
        super().__init__(message)


class NonPositiveMin(RequirementError):
    """Minimum rate not strictly positive"""
    def __init__(self, message: str = "min_rate must be positive"):
        super().__init__(message)


class StaleStats(HerculesException):
    """Interval statistics do not match the scheduled interval"""
    def __init__(self, message: str = "Interval statistics do not cover the scheduled interval"):
        super().__init__(message, status_code=400, exit_code=3)


class EmptyWindow(HerculesException):
    """No feedback samples inside a measurement window"""
    def __init__(self, message: str = "No samples in measurement window"):
        super().__init__(message, status_code=400, exit_code=3)


class GridTooLarge(HerculesException):
    """Brute-force enumeration exceeds the configured budget"""
    def __init__(self, message: str = "Grid enumeration exceeds budget"):
        super().__init__(message, status_code=400, exit_code=3)


class LengthMismatch(HerculesException):
    """Vectors compared lexicographically differ in length"""
    def __init__(self, message: str = "Vectors must have the same length"):
        super().__init__(message, status_code=400, exit_code=3)


class InvalidScenario(HerculesException):
    """Scenario violates its schema or invariants"""
    def __init__(self, message: str = "Invalid scenario", errors: Optional[List[str]] = None):
        self.errors = errors or []
        super().__init__(message, status_code=422, exit_code=2)


class ScenarioParseError(InvalidScenario):
    """Scenario file is not well-formed"""
    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        location = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(f"{location}{message}", errors=[f"{location}{message}"])


class ScenarioValidationError(InvalidScenario):
    """Scenario is well-formed but violates one or more invariants"""
    def __init__(self, errors: List[str]):
        summary = "; ".join(errors) if errors else "Validation error"
        super().__init__(f"Scenario validation failed: {summary}", errors=errors)


class OutputError(HerculesException):
    """Output path cannot be written"""
    def __init__(self, message: str = "Output path is not writable"):
        super().__init__(message, status_code=500, exit_code=3)
