"""Membership oracles: caching wrapper, grammar-backed and process-backed backends."""
from __future__ import annotations

import os
import shlex
import subprocess
import tempfile
import threading
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Callable


class OracleError(RuntimeError):
    """The backend failed to answer (timeout, crash). Carries the query string."""

    def __init__(self, query: str, reason: str):
        super().__init__(f"oracle failed on {query!r}: {reason}")
        self.query = query
        self.reason = reason


@dataclass
class QueryStats:
    total_raw: int = 0
    unique: int = 0
    cache_hits: int = 0
    by_phase: dict[str, int] = field(default_factory=dict)

    def copy(self) -> "QueryStats":
        return QueryStats(self.total_raw, self.unique, self.cache_hits, dict(self.by_phase))

    def as_dict(self) -> dict:
        return {
            "total_raw": self.total_raw,
            "unique": self.unique,
            "cache_hits": self.cache_hits,
            "by_phase": dict(sorted(self.by_phase.items())),
        }


class MembershipOracle:
    """Deterministic membership function with a per-string answer cache.

    Every distinct string reaches the backend at most once. Unique queries are
    attributed to the phase active when they were first asked.
    """

    def __init__(self, backend: Callable[[str], bool], name: str = "oracle"):
        self._backend = backend
        self.name = name
        self._cache: dict[str, bool] = {}
        self._lock = threading.Lock()
        self._stats = QueryStats()
        self._phase = "default"

    def __call__(self, s: str) -> bool:
        return self.query(s)

    def query(self, s: str) -> bool:
        cached = self._cache.get(s)
        st = self._stats
        if cached is not None:
            st.total_raw += 1
            st.cache_hits += 1
            return cached
        answer = bool(self._backend(s))
        with self._lock:
            if s in self._cache:
                st.total_raw += 1
                st.cache_hits += 1
                return self._cache[s]
            self._cache[s] = answer
            st.total_raw += 1
            st.unique += 1
            st.by_phase[self._phase] = st.by_phase.get(self._phase, 0) + 1
        return answer

    def is_cached(self, s: str) -> bool:
        return s in self._cache

    def cached_answer(self, s: str) -> bool | None:
        return self._cache.get(s)

    def stats(self) -> QueryStats:
        return self._stats.copy()

    @property
    def phase(self) -> str:
        return self._phase

    @contextmanager
    def in_phase(self, name: str):
        previous = self._phase
        self._phase = name
        try:
            yield self
        finally:
            self._phase = previous


def query_stats(o: MembershipOracle) -> QueryStats:
    return o.stats()


@dataclass(frozen=True)
class ExternalProcessSpec:
    """How to run a black-box recognizer.

    ``command`` is a list of argv words; with ``input_mode == "file"`` every
    ``{}`` in it is replaced by the path of a temp file holding the candidate.
    """

    command: tuple[str, ...]
    input_mode: str = "stdin"
    accept_on: int = 0
    timeout_ms: int = 10_000

    def __post_init__(self):
        if self.timeout_ms <= 0:
            raise ValueError("timeout must be positive")
        if self.input_mode not in ("stdin", "file"):
            raise ValueError(f"unknown input mode {self.input_mode!r}")
        if not self.command:
            raise ValueError("empty command")


def process_backend(spec: ExternalProcessSpec) -> Callable[[str], bool]:
    def run(s: str) -> bool:
        data = s.encode("utf-8")
        timeout = spec.timeout_ms / 1000
        try:
            if spec.input_mode == "stdin":
                proc = subprocess.run(
                    list(spec.command), input=data, stdout=subprocess.DEVNULL,
                    stderr=subprocess.DEVNULL, timeout=timeout)
            else:
                with tempfile.NamedTemporaryFile("wb", delete=False) as fh:
                    fh.write(data)
                    path = fh.name
                try:
                    argv = [w.replace("{}", path) for w in spec.command]
                    proc = subprocess.run(
                        argv, stdin=subprocess.DEVNULL, stdout=subprocess.DEVNULL,
                        stderr=subprocess.DEVNULL, timeout=timeout)
                finally:
                    os.unlink(path)
        except subprocess.TimeoutExpired:
            raise OracleError(s, f"timeout after {spec.timeout_ms} ms") from None
        except OSError as exc:
            raise OracleError(s, str(exc)) from exc
        if proc.returncode < 0:
            raise OracleError(s, f"killed by signal {-proc.returncode}")
        return proc.returncode == spec.accept_on

    return run


def external_oracle(spec: ExternalProcessSpec) -> MembershipOracle:
    return MembershipOracle(process_backend(spec), name=" ".join(spec.command))


def vpg_oracle(grammar) -> MembershipOracle:
    return MembershipOracle(grammar.accepts, name="vpg")


def parse_oracle_spec(spec: str, timeout_ms: int | None = None) -> MembershipOracle:
    """Build an oracle from ``cmd:<shell words>`` or ``vpg:<grammar file>``."""
    if timeout_ms is None:
        timeout_ms = int(os.environ.get("VSTAR_ORACLE_TIMEOUT_MS", "10000"))
    if spec.startswith("cmd:"):
        words = tuple(shlex.split(spec[4:]))
        mode = "file" if any("{}" in w for w in words) else "stdin"
        return external_oracle(ExternalProcessSpec(words, mode, 0, timeout_ms))
    if spec.startswith("vpg:"):
        from .vpg import load_grammar

        return vpg_oracle(load_grammar(spec[4:]))
    raise ValueError(f"oracle spec must start with 'cmd:' or 'vpg:', got {spec!r}")
