"""Injectable clock so every date-windowed operation is deterministic in tests."""

from __future__ import annotations

from datetime import date, datetime, timezone


class Clock:
    """Wall clock by default; construct with a fixed date to freeze time.

    A frozen clock reports ``now()`` as midnight UTC of the frozen day so
    that dates and timestamps agree.
    """

    def __init__(self, fixed_today: date | None = None):
        self._fixed = fixed_today

    def today(self) -> date:
        if self._fixed is not None:
            return self._fixed
        return datetime.now(timezone.utc).date()

    def now(self) -> datetime:
        if self._fixed is not None:
            return datetime(
                self._fixed.year, self._fixed.month, self._fixed.day, tzinfo=timezone.utc
            )
        return datetime.now(timezone.utc)

    @classmethod
    def fixed(cls, iso_date: str) -> "Clock":
        return cls(fixed_today=date.fromisoformat(iso_date))
