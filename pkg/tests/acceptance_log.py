"""Collected one-line outcomes of the acceptance criteria, printed at session end."""

LINES: list[str] = []


def record(num: int, title: str, ok: bool, detail: str, elapsed: float, limit: float,
           reported: bool = False) -> str:
    status = "REPORTED" if reported else ("PASS" if ok else "FAIL")
    line = f"{status} criterion {num:>2}: {title} [{detail}; {elapsed:.2f}s / limit {limit:g}s]"
    LINES.append(line)
    print(line)
    return line
