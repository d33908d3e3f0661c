from typing import Any, Dict, List, Optional

from models.enums import UniversalMessage


class CheckResult:
    """One acceptance assertion: its measured value, the threshold and the verdict"""

    def __init__(self, name: str, passed: bool, value: Any = None, threshold: Any = None,
                 h: Optional[float] = None, message: str = ""):
        self.name = name
        self.passed = bool(passed)
        self.value = value
        self.threshold = threshold
        self.h = h
        self.message = message or (UniversalMessage.check_passed.value.format(name) if self.passed else
                                   UniversalMessage.check_failed.value.format(name, value, threshold))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'name': self.name,
            'h': self.h,
            'value': self.value,
            'threshold': self.threshold,
            'passed': self.passed,
            'message': self.message
        }


class ExperimentResult:
    """Checks, errors, JSON payload and CSV rows of one experiment, accumulated over the h sweep"""

    def __init__(self, name: str):
        self.name = name
        self.checks: List[CheckResult] = []
        self.errors: List[Dict[str, Any]] = []
        self.payload: Dict[str, Any] = {}
        self.tables: Dict[str, List[List[Any]]] = {}

    def add_check(self, name: str, passed: bool, value: Any = None, threshold: Any = None,
                  h: Optional[float] = None, message: str = "") -> CheckResult:
        check = CheckResult(f"{self.name}.{name}", passed, value, threshold, h, message)
        self.checks.append(check)
        return check

    def add_error(self, error: Exception, h: Optional[float] = None):
        message = UniversalMessage.experiment_error.value.format(self.name, type(error).__name__,
                                                                 getattr(error, 'message', str(error)))
        self.errors.append({'h': h, 'type': type(error).__name__, 'message': message})

    def add_rows(self, table: str, rows: List[List[Any]]):
        self.tables.setdefault(table, []).extend(rows)

    def merge(self, other: 'ExperimentResult'):
        self.checks.extend(other.checks)
        self.errors.extend(other.errors)
        self.payload.update(other.payload)
        for table, rows in other.tables.items():
            self.add_rows(table, rows)

    @property
    def passed(self) -> bool:
        return not self.errors and all(check.passed for check in self.checks)

    @property
    def failed_count(self) -> int:
        return sum(not check.passed for check in self.checks) + len(self.errors)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'passed': self.passed,
            'checks': [check.to_dict() for check in self.checks],
            'errors': list(self.errors)
        }
