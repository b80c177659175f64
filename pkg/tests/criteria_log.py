"""Collects one pass/fail line per acceptance criterion for the run summary."""

from __future__ import annotations

from contextlib import contextmanager

# criterion number -> (status, title, detail)
RESULTS: dict[int, tuple[str, str, str]] = {}


def line(n: int) -> str:
    status, title, detail = RESULTS[n]
    return f"criterion {n} [{status}] {title}: {detail}"


@contextmanager
def criterion(n: int, title: str):
    """Record PASS if the block finishes, FAIL (with the error) if it raises.

    The block may call ``note(text)`` on the yielded list to add detail.
    """
    notes: list[str] = []
    try:
        yield notes
    except BaseException as exc:
        name = type(exc).__name__
        if name == "Skipped":
            RESULTS[n] = ("SKIP", title, str(exc) or "skipped")
        else:
            first = (str(exc).strip().splitlines() or [name])[0]
            RESULTS[n] = ("FAIL", title, "; ".join(notes + [first]))
        print(line(n))
        raise
    RESULTS[n] = ("PASS", title, "; ".join(notes))
    print(line(n))
