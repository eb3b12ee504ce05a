from pydantic import ValidationInfo, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict
from sympy import isprime


class Settings(BaseSettings):
    # Field
    PRIME: int = 2147483629
    MAX_EXT_DEGREE: int = 4
    EXT_DEGREE: int = 1

    # Trial budgets
    FIBER_TRIALS: int = 300
    STAR_TRIALS: int = 50
    SAMPLER_RETRY_BUDGET: int = 200
    NONDEG_TRIALS: int = 200

    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_FILE: str = "logs/instanton.log"

    # Run ledger
    DATABASE_URL: str = "sqlite:///./data/database/instanton_runs.db"
    RECORD_RUNS: bool = False

    # Files
    LIBRARY_VERSION: str = "1.0.0"
    FORMAT_VERSION: str = "1"

    model_config = SettingsConfigDict(env_file=".env", case_sensitive=True, extra="ignore")

    @field_validator("PRIME")
    @classmethod
    def check_prime(cls, value: int) -> int:
        # int64 elimination needs p < 2^31; the canonical projector divides by 2
        if value == 2 or value >= 2 ** 31 or not isprime(value):
            raise ValueError(f"PRIME must be an odd prime below 2^31, got {value}")
        return value

    @field_validator("EXT_DEGREE")
    @classmethod
    def check_ext_degree(cls, value: int, info: ValidationInfo) -> int:
        bound = info.data.get("MAX_EXT_DEGREE", value)
        if not 1 <= value <= bound:
            raise ValueError(f"EXT_DEGREE must lie in [1, {bound}], got {value}")
        return value


settings = Settings()
