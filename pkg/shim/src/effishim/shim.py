"""Measurement shim: run one subject program under limits, report one line.

Invocation:

    effishim <program> <input-file> <time_ms> <mem_kb>

The subject runs as a child process in its own process group (so a timeout
kill cannot leave orphans) with an address-space cap.  Exactly one JSON line
is printed with the fields status/wall_ms/cpu_ms/max_rss_kb/stdout/
stderr_tail, and the exit code is 0 whenever a report was emitted, whatever
happened to the subject.

status: ok | timeout | runtime_error | oom.  stdout larger than 1 MiB is
replaced by "sha256:<hexdigest>:<bytes>"; stderr is truncated to its last
2 KiB (enough for a traceback, bounded for storage).
"""

from __future__ import annotations

import hashlib
import json
import os
import resource
import signal
import subprocess
import sys
import tempfile
import time

STDOUT_LIMIT_BYTES = 1 << 20  # 1 MiB
STDERR_TAIL_BYTES = 2048
POLL_INTERVAL_S = 0.005


def _child_setup(memory_limit_kb: int):
    def setup() -> None:
        os.setsid()  # own process group, so the whole tree can be killed
        limit = memory_limit_kb * 1024
        resource.setrlimit(resource.RLIMIT_AS, (limit, limit))

    return setup


def shim_run(program_path: str, input_path: str, time_limit_ms: int, memory_limit_kb: int) -> dict:
    """Run the subject once; returns the report as a dict (never raises)."""
    try:
        return _run(program_path, input_path, time_limit_ms, memory_limit_kb)
    except Exception as exc:  # internal failure: still a well-formed report
        return {
            "status": "runtime_error",
            "wall_ms": 0.0,
            "cpu_ms": 0.0,
            "max_rss_kb": 0,
            "stdout": "",
            "stderr_tail": f"shim failure: {exc!r}",
        }


def _run(program_path: str, input_path: str, time_limit_ms: int, memory_limit_kb: int) -> dict:
    if not os.path.exists(program_path):
        raise FileNotFoundError(program_path)
    deadline_s = time_limit_ms / 1000.0
    with tempfile.TemporaryFile() as out_file, tempfile.TemporaryFile() as err_file, \
            open(input_path, "rb") as in_file:
        start = time.perf_counter()
        proc = subprocess.Popen(
            [sys.executable, program_path],
            stdin=in_file,
            stdout=out_file,
            stderr=err_file,
            preexec_fn=_child_setup(memory_limit_kb),
        )
        timed_out = False
        status_info = None
        while True:
            pid, wait_status, usage = os.wait4(proc.pid, os.WNOHANG)
            if pid == proc.pid:
                status_info = (wait_status, usage)
                break
            if time.perf_counter() - start >= deadline_s:
                timed_out = True
                try:
                    os.killpg(proc.pid, signal.SIGKILL)
                except ProcessLookupError:
                    pass
                _, wait_status, usage = os.wait4(proc.pid, 0)
                status_info = (wait_status, usage)
                break
            time.sleep(POLL_INTERVAL_S)
        wall_ms = (time.perf_counter() - start) * 1000.0
        proc.returncode = 0  # already reaped via wait4; silence Popen cleanup

        wait_status, usage = status_info
        cpu_ms = (usage.ru_utime + usage.ru_stime) * 1000.0
        max_rss_kb = int(usage.ru_maxrss)  # KiB on Linux

        out_file.seek(0)
        stdout_data = out_file.read(STDOUT_LIMIT_BYTES + 1)
        if len(stdout_data) > STDOUT_LIMIT_BYTES:
            digest = hashlib.sha256(stdout_data)
            size = len(stdout_data)
            while True:
                chunk = out_file.read(1 << 20)
                if not chunk:
                    break
                digest.update(chunk)
                size += len(chunk)
            stdout = f"sha256:{digest.hexdigest()}:{size}"
        else:
            stdout = stdout_data.decode("utf-8", errors="replace")

        err_file.seek(0, os.SEEK_END)
        err_size = err_file.tell()
        err_file.seek(max(0, err_size - STDERR_TAIL_BYTES))
        stderr_tail = err_file.read().decode("utf-8", errors="replace")

    if timed_out:
        status = "timeout"
        wall_ms = max(wall_ms, float(time_limit_ms))
    elif os.WIFEXITED(wait_status) and os.WEXITSTATUS(wait_status) == 0:
        status = "ok"
    elif "MemoryError" in stderr_tail:
        status = "oom"
    else:
        status = "runtime_error"

    return {
        "status": status,
        "wall_ms": wall_ms,
        "cpu_ms": cpu_ms,
        "max_rss_kb": max_rss_kb,
        "stdout": stdout,
        "stderr_tail": stderr_tail,
    }


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 4:
        print(
            json.dumps(
                {
                    "status": "runtime_error",
                    "wall_ms": 0.0,
                    "cpu_ms": 0.0,
                    "max_rss_kb": 0,
                    "stdout": "",
                    "stderr_tail": "usage: effishim <program> <input-file> <time_ms> <mem_kb>",
                }
            )
        )
        return 0
    program, input_path, time_ms, mem_kb = argv
    report = shim_run(program, input_path, int(time_ms), int(mem_kb))
    print(json.dumps(report))
    return 0


if __name__ == "__main__":
    sys.exit(main())
