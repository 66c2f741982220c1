"""Configuration dataclasses for sepfrag runs.

These dataclasses gather the command-line options into Parameter Objects
that the subcommands hand to the library.
"""

from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Literal, Optional, Tuple

from .fragments import DEFAULT_EXHAUSTIVE_LIMIT, DEFAULT_LEVELS
from .normal_forms import DEFAULT_MAX_TERMS
from .semantics import (
    DEFAULT_MAX_MODEL_SIZE,
    DEFAULT_MAX_SIZE,
    DEFAULT_SAMPLES,
    DEFAULT_STRUCTURE_BUDGET,
)
from .transforms import DEFAULT_MAX_ATOMS_FOR_EXPANSION, DEFAULT_MAX_FORMULA_LEN, BlowupBudget

SEED_ENV = 'SEPFRAG_SEED'


@dataclass
class OracleParams:
    """Bounded equivalence oracle."""
    max_size: int = DEFAULT_MAX_SIZE
    budget: int = DEFAULT_STRUCTURE_BUDGET
    samples: int = DEFAULT_SAMPLES
    seed: int = 0


@dataclass
class BudgetParams:
    """Blowup limits for translations and partition search."""
    max_formula_len: int = DEFAULT_MAX_FORMULA_LEN
    max_atoms_for_expansion: int = DEFAULT_MAX_ATOMS_FOR_EXPANSION
    max_terms: int = DEFAULT_MAX_TERMS
    exhaustive_limit: int = DEFAULT_EXHAUSTIVE_LIMIT

    def blowup(self) -> BlowupBudget:
        return BlowupBudget(self.max_formula_len, self.max_atoms_for_expansion, self.max_terms)


@dataclass
class SearchParams:
    """Model search and classification options."""
    max_model_size: int = DEFAULT_MAX_MODEL_SIZE
    allow_constants: bool = True
    fok_levels: Tuple[int, ...] = DEFAULT_LEVELS


@dataclass
class OutputParams:
    """Output settings."""
    format: Literal['csv', 'text', 'json'] = 'csv'
    trace: bool = False


@dataclass
class Config:
    """Complete run configuration.

    Example usage:
        config = Config(oracle=OracleParams(max_size=2, seed=7))
    """
    config_file: Optional[Path] = None
    debug: bool = False

    oracle: OracleParams = field(default_factory=OracleParams)
    budget: BudgetParams = field(default_factory=BudgetParams)
    search: SearchParams = field(default_factory=SearchParams)
    output: OutputParams = field(default_factory=OutputParams)

    def __post_init__(self) -> None:
        for name in ('max_size', 'budget', 'samples'):
            if getattr(self.oracle, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.oracle.seed < 0:
            raise ValueError("seed must be non-negative")
        if self.search.max_model_size < 1:
            raise ValueError("max_model_size must be positive")

    def to_dict(self) -> dict:
        """Convert config to dictionary for serialization."""
        result = asdict(self)
        if result['config_file'] is not None:
            result['config_file'] = str(result['config_file'])
        result['search']['fok_levels'] = list(result['search']['fok_levels'])
        return result

    @classmethod
    def from_cli_args(
        cls,
        config: Optional[Path] = None,
        debug: bool = False,
        max_size: int = DEFAULT_MAX_SIZE,
        budget: int = DEFAULT_STRUCTURE_BUDGET,
        samples: int = DEFAULT_SAMPLES,
        seed: int = 0,
        max_formula_len: int = DEFAULT_MAX_FORMULA_LEN,
        max_atoms_for_expansion: int = DEFAULT_MAX_ATOMS_FOR_EXPANSION,
        max_terms: int = DEFAULT_MAX_TERMS,
        exhaustive_limit: int = DEFAULT_EXHAUSTIVE_LIMIT,
        max_model_size: int = DEFAULT_MAX_MODEL_SIZE,
        allow_constants: bool = True,
        fok_levels: Tuple[int, ...] = DEFAULT_LEVELS,
        format: str = 'csv',
        trace: bool = False,
    ) -> 'Config':
        """Create a Config from flat command-line arguments."""
        return cls(
            config_file=config,
            debug=debug,
            oracle=OracleParams(max_size=max_size, budget=budget, samples=samples, seed=seed),
            budget=BudgetParams(
                max_formula_len=max_formula_len,
                max_atoms_for_expansion=max_atoms_for_expansion,
                max_terms=max_terms,
                exhaustive_limit=exhaustive_limit,
            ),
            search=SearchParams(
                max_model_size=max_model_size,
                allow_constants=allow_constants,
                fok_levels=tuple(fok_levels),
            ),
            output=OutputParams(format=format, trace=trace),  # type: ignore[arg-type]
        )
