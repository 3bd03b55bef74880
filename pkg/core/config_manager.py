from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from sympy import isprime

from euclid_engine.codecs import DocumentCodec
from euclid_engine.exact_linalg import DEFAULT_PRIME, MAX_PRIME_BOUND, MIN_PRIME

PRIME_ENV_VAR = "GRASSMANN_EUCLID_PRIME"


class ConfigError(ValueError):
    """A suite configuration that cannot be run."""


@dataclass
class SuiteConfig:
    prime: int = DEFAULT_PRIME
    toy: bool = False
    algebra: Dict[str, Any] = field(default_factory=lambda: {"kind": "random"})
    cases: Optional[List[Tuple[int, int]]] = None
    trials: Optional[int] = None
    seed: int = 0
    budget: int = 64
    flag_budget: int = 16
    grid_max_n: int = 9
    out: Optional[str] = None

    def validate(self) -> "SuiteConfig":
        if self.prime >= MAX_PRIME_BOUND:
            raise ConfigError(f"prime {self.prime} does not fit a 64-bit machine word")
        if self.prime < 2 or not isprime(self.prime):
            raise ConfigError(f"prime {self.prime} is not prime")
        if self.prime < MIN_PRIME and not self.toy:
            raise ConfigError(f"prime {self.prime} is below {MIN_PRIME}; use --toy for small primes")
        if self.trials is not None and self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if self.budget < 1 or self.flag_budget < 1:
            raise ConfigError("retry budgets must be at least 1")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        if self.grid_max_n < 2:
            raise ConfigError("grid_max_n must be at least 2")
        for case in self.cases or []:
            n, r = case
            if not 0 < r < n:
                raise ConfigError(f"case (n={n}, r={r}) needs 0 < r < n")
        kind = self.algebra.get("kind")
        if kind not in ("random", "monogenic", "table"):
            raise ConfigError(f"unknown algebra kind {kind!r}")
        return self

    def to_json(self) -> Dict[str, Any]:
        payload = asdict(self)
        payload["prime"] = str(self.prime)
        payload["cases"] = [list(c) for c in self.cases] if self.cases is not None else None
        return payload

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SuiteConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown configuration keys: {unknown}")
        values = dict(data)
        try:
            if "prime" in values:
                values["prime"] = int(values["prime"])
            if values.get("cases") is not None:
                values["cases"] = [(int(n), int(r)) for n, r in values["cases"]]
            for key in ("trials", "seed", "budget", "flag_budget", "grid_max_n"):
                if values.get(key) is not None:
                    values[key] = int(values[key])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"malformed configuration: {exc}") from exc
        return cls(**values)


class ConfigManager:
    """Manage user preferences, the report directory and suite configuration.

    Precedence for every suite setting: explicit overrides, then the config
    file, then preferences, then the environment (prime only), then defaults.
    """

    def __init__(self, base_dir: Optional[Path] = None, environ: Optional[Dict[str, str]] = None) -> None:
        # Allow tests to override where preferences are stored.
        self._base = Path(base_dir) if base_dir is not None else Path.home() / ".grassmann_euclid"
        self._base.mkdir(parents=True, exist_ok=True)
        self._environ = environ if environ is not None else os.environ
        self._preferences_path = self._base / "preferences.json"
        self._preferences: Dict[str, Any] = self._load_preferences()

    def _load_preferences(self) -> Dict[str, Any]:
        if not self._preferences_path.exists():
            return {}
        try:
            return json.loads(self._preferences_path.read_text(encoding="utf-8"))
        except Exception:
            return {}

    def _save_preferences(self) -> None:
        try:
            self._preferences_path.write_text(json.dumps(self._preferences, indent=2), encoding="utf-8")
        except Exception:
            # Best-effort persist; preferences only carry defaults.
            pass

    def get_preferences(self) -> Dict[str, Any]:
        return dict(self._preferences)

    def set_preference(self, key: str, value: Any) -> None:
        self._preferences[key] = value
        self._save_preferences()

    def get_data_root(self) -> Path:
        override = self._preferences.get("reportsRoot")
        if override:
            try:
                root = Path(override).expanduser()
                root.mkdir(parents=True, exist_ok=True)
                return root
            except Exception:
                pass
        self._base.mkdir(parents=True, exist_ok=True)
        return self._base

    def default_prime(self) -> int:
        raw = self._environ.get(PRIME_ENV_VAR)
        if raw:
            try:
                return int(raw)
            except ValueError as exc:
                raise ConfigError(f"{PRIME_ENV_VAR}={raw!r} is not an integer") from exc
        return DEFAULT_PRIME

    def build_suite_config(
        self, overrides: Optional[Dict[str, Any]] = None, config_path: Optional[Path] = None
    ) -> SuiteConfig:
        merged: Dict[str, Any] = {"prime": self.default_prime()}
        suite_prefs = self._preferences.get("suite") or {}
        if not isinstance(suite_prefs, dict):
            raise ConfigError("preference 'suite' must be a mapping")
        merged.update(suite_prefs)
        if config_path is not None:
            path = Path(config_path)
            if not path.exists():
                raise ConfigError(f"config file not found: {path}")
            try:
                merged.update(DocumentCodec().load(path))
            except Exception as exc:
                raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        merged.update({k: v for k, v in (overrides or {}).items() if v is not None})
        return SuiteConfig.from_dict(merged).validate()
