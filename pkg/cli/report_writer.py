import json
import logging
import math
import threading
from pathlib import Path
from typing import Any, Dict, List, Sequence

import numpy as np
import pandas as pd

import config


class ReportWriter:
    """Single writer of every report file; floats carry enough digits to round-trip exactly"""

    def __init__(self, output_dir: str, digits: int = config.float_digits):
        self.output_dir = Path(output_dir)
        self.digits = digits
        self.float_format = f'%.{digits}g'
        self._lock = threading.Lock()

    def path(self, filename: str) -> Path:
        return self.output_dir / filename

    def format_float(self, value: float) -> str:
        return format(value, f'.{self.digits}g')

    def to_serializable(self, value: Any) -> Any:
        """numpy scalars, arrays and complex numbers to plain JSON types; non-finite floats to None"""
        if isinstance(value, dict):
            return {str(k): self.to_serializable(v) for k, v in value.items()}
        if isinstance(value, (list, tuple)):
            return [self.to_serializable(v) for v in value]
        if isinstance(value, np.ndarray):
            return self.to_serializable(value.tolist())
        if isinstance(value, (bool, np.bool_)):
            return bool(value)
        if isinstance(value, (int, np.integer)):
            return int(value)
        if isinstance(value, (complex, np.complexfloating)):
            return [self.to_serializable(float(value.real)), self.to_serializable(float(value.imag))]
        if isinstance(value, (float, np.floating)):
            value = float(value)
            return value if math.isfinite(value) else None
        if hasattr(value, 'value') and isinstance(getattr(value, 'value'), (str, int)):
            return value.value
        return value

    def dumps(self, payload: Any) -> str:
        """Deterministic JSON with every float printed at the configured precision"""
        tokens: Dict[str, str] = {}

        def tokenize(value):
            if isinstance(value, dict):
                return {k: tokenize(v) for k, v in value.items()}
            if isinstance(value, list):
                return [tokenize(v) for v in value]
            if isinstance(value, float):
                token = f'@@float{len(tokens)}@@'
                tokens[token] = self.format_float(value)
                return token
            return value

        text = json.dumps(tokenize(self.to_serializable(payload)), indent=2, sort_keys=True, ensure_ascii=False)
        for token, number in tokens.items():
            text = text.replace(f'"{token}"', number, 1)
        return text + '\n'

    def write_json(self, filename: str, payload: Any) -> Path:
        return self._write(filename, self.dumps(payload))

    def write_csv(self, filename: str, header: Sequence[str], rows: List[Sequence[Any]]) -> Path:
        frame = pd.DataFrame([list(row) for row in rows], columns=list(header))
        text = frame.to_csv(index=False, float_format=self.float_format, na_rep='', lineterminator='\n')
        return self._write(filename, text)

    def _write(self, filename: str, text: str) -> Path:
        target = self.path(filename)
        with self._lock:
            try:
                target.parent.mkdir(parents=True, exist_ok=True)
                target.write_text(text, encoding='utf-8')
            except OSError as e:
                logging.error(f"REPORT_WRITER: Error writing report - path={target}, error={str(e)}")
                raise OSError(f"Cannot write report file {target}: {e}") from e
        logging.info(f"REPORT_WRITER: Report written - path={target}, bytes={len(text)}")
        return target
