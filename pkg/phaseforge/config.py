from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    # Sampling
    SEED: int = 20240601

    # Logging
    LOG_LEVEL: str = "WARNING"

    # Numerical kernel
    PIVOT_RTOL: float = 1e-14
    POWER_TOL: float = 1e-12
    POWER_MAX_ITER: int = 10_000
    CROSSCHECK_MAX_ITER: int = 200_000

    # Realization validation
    CLAMP_TOL: float = 1e-12
    REJECT_TOL: float = 1e-9

    # Output formatting
    CSV_DIGITS: int = 10

    class Config:
        env_file = ".env"
        env_prefix = "PHASEFORGE_"


settings = Settings()
