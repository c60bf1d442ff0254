"""Shared record of acceptance verdicts (criterion number -> (status, detail))."""

RESULTS: dict[int, tuple[str, str]] = {}


def record(n: int, ok: bool, detail: str = "", status: str | None = None) -> None:
    status = status or ("PASS" if ok else "FAIL")
    prev = RESULTS.get(n)
    if prev is not None and prev[0] != "PASS":
        # a criterion with several parts keeps its first non-passing verdict
        return
    RESULTS[n] = (status, detail)
    print(f"CRITERION {n}: {status}  {detail}")
