"""Latency instrumentation: time-to-first-token per chat request."""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass


@dataclass(frozen=True)
class LatencyRecord:
    request_id: str
    ttft_ms: float
    total_ms: float
    user_messages: int  # user-message count at request time

    def __post_init__(self):
        if not 0.0 <= self.ttft_ms <= self.total_ms:
            raise ValueError(
                f"ttft must satisfy 0 <= ttft <= total, got {self.ttft_ms} / {self.total_ms}"
            )


class MetricsStore:
    """Per-session TTFT series, summarized as mean ± std grouped by the
    user-message count (population std, so single samples report 0)."""

    def __init__(self):
        self._records: list[tuple[str, LatencyRecord]] = []
        self._lock = threading.Lock()

    def record(self, session_id: str, record: LatencyRecord) -> None:
        with self._lock:
            self._records.append((session_id, record))

    def records_for(self, session_id: str) -> list[LatencyRecord]:
        with self._lock:
            return [r for sid, r in self._records if sid == session_id]

    def __len__(self) -> int:
        with self._lock:
            return len(self._records)

    @staticmethod
    def _mean_std(values: list[float]) -> tuple[float, float]:
        mean = sum(values) / len(values)
        var = sum((v - mean) ** 2 for v in values) / len(values)
        return mean, math.sqrt(var)

    def snapshot(self) -> dict:
        with self._lock:
            records = [r for _, r in self._records]
        groups: dict[int, list[LatencyRecord]] = {}
        for rec in records:
            groups.setdefault(rec.user_messages, []).append(rec)
        out = []
        for count in sorted(groups):
            ttfts = [r.ttft_ms for r in groups[count]]
            totals = [r.total_ms for r in groups[count]]
            ttft_mean, ttft_std = self._mean_std(ttfts)
            total_mean, total_std = self._mean_std(totals)
            out.append(
                {
                    "user_messages": count,
                    "samples": len(ttfts),
                    "ttft_mean_ms": ttft_mean,
                    "ttft_std_ms": ttft_std,
                    "total_mean_ms": total_mean,
                    "total_std_ms": total_std,
                }
            )
        return {"groups": out, "total_requests": len(records)}


__all__ = ["LatencyRecord", "MetricsStore"]
