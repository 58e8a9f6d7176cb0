"""
Dataset description for CSV ingestion.
"""
import logging
from pathlib import Path
from typing import List, Literal, Optional, Union

from pydantic import BaseModel, Field, field_validator

logger = logging.getLogger(__name__)


class DatasetSpec(BaseModel):
    path: Path
    delimiter: str = ","
    has_header: bool = True
    # Column names, or 0-based positions when the file has no header
    columns: Optional[List[Union[int, str]]] = None
    transform: Literal["none", "first-difference"] = "none"

    @field_validator('delimiter')
    @classmethod
    def validate_delimiter(cls, v: str) -> str:
        if v in ("\\t", "tab"):
            return "\t"
        if len(v) != 1:
            raise ValueError(f"Delimiter must be a single character, got {v!r}")
        return v

    @field_validator('columns', mode='before')
    @classmethod
    def split_columns(cls, v):
        if isinstance(v, str):
            v = [c.strip() for c in v.split(",") if c.strip()]
        if v is not None:
            v = [int(c) if isinstance(c, str) and c.isdigit() else c for c in v]
        return v or None
