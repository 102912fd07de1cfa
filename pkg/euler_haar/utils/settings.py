"""
Runtime settings: resource guards and numerical defaults.

The settings live in a module-level singleton that the exact, symbolic and
sampling layers consult for their guards. They can be loaded from a JSON
file whose keys match the command-line flags.
"""
import json
import logging
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

from euler_haar.utils.errors import GuardError, ParseError

logger = logging.getLogger(__name__)


@dataclass
class Settings:
    """Guards and defaults used across the package.

    Attributes:
        max_rank: Largest group rank accepted by symbolic and exact routines.
        max_monomials: Largest term count a symbolic product may produce.
        max_cyclotomic_order: Largest root-of-unity order exact arithmetic may reach.
        max_digits: Largest precision accepted by exact-to-complex embedding.
        seed: Default random seed.
        samples: Default Monte Carlo sample count.
        chunk_size: Samples per worker task; results do not depend on it.
        workers: Threads used to evaluate sub-streams.
        digits: Digits of the float shadows printed next to exact values.
        quad_order: Default nodes per quadrature axis.
        jacobian_step: Finite-difference step of the Jacobian oracle.
        verify_samples: Monte Carlo samples per check in the verification suites.
        verify_draws: Random draws (angle sets, matrices, spectra) per verification check.
        log_file: Optional log file, overwritten on every run.
    """

    max_rank: int = 6
    max_monomials: int = 1_000_000
    max_cyclotomic_order: int = 1_000_000
    max_digits: int = 100
    seed: int = 0
    samples: int = 100_000
    chunk_size: int = 10_000
    workers: int = 1
    digits: int = 15
    quad_order: int = 12
    jacobian_step: float = 1e-5
    verify_samples: int = 20_000
    verify_draws: int = 100
    log_file: Optional[str] = None

    @classmethod
    def from_file(cls, filepath: str) -> 'Settings':
        """Create settings from a JSON file.

        Args:
            filepath: Path to a JSON object whose keys match the settings fields.

        Returns:
            Settings: Defaults overridden by the file contents.

        Raises:
            FileNotFoundError: If the file does not exist.
            ParseError: If the file is not a JSON object.
        """
        path = Path(filepath)
        if not path.exists():
            logger.error(f"Config file not found: {filepath}")
            raise FileNotFoundError(f"Config file not found: {filepath}")
        try:
            with open(path, 'r') as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            raise ParseError(f"Invalid config file {filepath}: {e}") from e
        if not isinstance(data, dict):
            raise ParseError(f"Config file {filepath} must contain a JSON object")
        settings = cls()
        settings.update(data)
        return settings

    def update(self, values: Mapping[str, Any]) -> None:
        """Apply overrides; keys may use dashes or underscores."""
        known = {f.name: f for f in fields(self)}
        for raw_key, value in values.items():
            key = raw_key.replace('-', '_')
            if key not in known:
                logger.warning(f"Ignoring unknown setting: {raw_key}")
                continue
            if value is None:
                continue
            current = getattr(self, key)
            try:
                if isinstance(current, bool) or current is None:
                    setattr(self, key, value)
                else:
                    setattr(self, key, type(current)(value))
            except (TypeError, ValueError) as e:
                raise ParseError(f"Invalid value for {raw_key}: {value!r}") from e

    def reset(self) -> None:
        """Restore every field to its default."""
        for f in fields(self):
            setattr(self, f.name, f.default)

    def check_rank(self, n: int) -> None:
        """Raise GuardError when ``n`` exceeds the rank guard."""
        if n > self.max_rank:
            raise GuardError(f"Rank {n} exceeds the configured maximum {self.max_rank}")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


# Shared instance
settings = Settings()
