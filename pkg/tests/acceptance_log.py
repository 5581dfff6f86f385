"""Collects one pass/fail line per acceptance criterion."""

LINES: list[str] = []


def report(label: str, ok: bool, detail: str) -> bool:
    line = f"{'PASS' if ok else 'FAIL'}  {label}: {detail}"
    LINES.append(line)
    print(line, flush=True)
    return ok
