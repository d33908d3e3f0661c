from typing import Any, Dict, List, Optional

from models.enums import RunStatus, UniversalMessage
from models.result import ExperimentResult


class SummaryJson:
    """Top-level run summary written to summary.json"""

    def __init__(self, potential: Optional[Dict[str, Any]] = None, h_values: Optional[List[float]] = None,
                 results: Optional[Dict[str, ExperimentResult]] = None,
                 per_h: Optional[Dict[str, Dict[str, Any]]] = None, seed: Optional[int] = None):
        self.potential = potential or {}
        self.h_values = h_values or []
        self.results = results or {}
        self.per_h = per_h or {}
        self.seed = seed

    @property
    def status(self) -> RunStatus:
        return RunStatus.success if all(r.passed for r in self.results.values()) else RunStatus.failed

    def counts(self) -> Dict[str, int]:
        checks = [c for r in self.results.values() for c in r.checks]
        return {
            'checks_total': len(checks),
            'checks_passed': sum(c.passed for c in checks),
            'checks_failed': sum(not c.passed for c in checks),
            'errors': sum(len(r.errors) for r in self.results.values())
        }

    def to_dict(self) -> Dict[str, Any]:
        status = self.status
        return {
            'schema_version': UniversalMessage.schema_version.value,
            'status': status.value[1],
            'exit_code': status.value[0],
            'arnoldi_seed': self.seed,
            'potential': self.potential,
            'h_values': list(self.h_values),
            'per_h': self.per_h,
            **self.counts(),
            'experiments': {name: result.to_dict() for name, result in self.results.items()}
        }
