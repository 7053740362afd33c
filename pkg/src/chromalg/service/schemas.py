"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from typing import Any, Literal, Optional

from pydantic import BaseModel, Field


class DeriveRequest(BaseModel):
    p: int = 3
    i: int
    n: int
    m: int
    trunc: Optional[int] = None
    scheme: Literal["hazewinkel", "araki"] = "hazewinkel"
    emit: Literal["json", "tex"] = "json"
    max_order: int = 260


class HHRequest(BaseModel):
    algebra: dict
    method: Literal["hkr", "koszul", "bar"]
    smax: int = 4
    window: Optional[tuple[int, int]] = None
    smooth: list[str] = Field(default_factory=list)
    emit: Literal["json", "csv", "tex"] = "json"


class ConjectureRequest(BaseModel):
    p: int = 3
    n: int
    i: Optional[int] = None
    emit: Literal["json", "tex"] = "json"


class SplittingRequest(BaseModel):
    p: int = 3
    emit: Literal["json", "tex"] = "json"


class CollapseRequest(BaseModel):
    page: dict


class ReproduceRequest(BaseModel):
    p: int = 3
    fixture_filter: Optional[str] = None


class RunEnvelope(BaseModel):
    """Common response: verdict flag, deterministic manifest, artifacts.

    JSON artifacts come back parsed; TeX/CSV artifacts stay text.
    """

    ok: bool
    manifest: dict
    artifacts: dict[str, Any]


class HealthResponse(BaseModel):
    status: str
    version: str
