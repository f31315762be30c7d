"""Workbench configuration and environment variables"""

from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Workbench settings loaded from environment variables"""

    # Logging
    LOG_LEVEL: str = "INFO"

    # Base field and reproducibility
    DEFAULT_Q: int = 5
    DEFAULT_SEED: int = 20240601
    SATAKE_HEIGHT: int = 7  # numerator/denominator bound for random Satake parameters

    # Exact engine
    RATFUN_DEGREE_CAP: int = 512
    RAY_MIN_TERMS: int = 8
    RAY_ORDER_BOUND: int = 16  # a-priori recurrence order of rays without a closer bound
    RAY_VERIFY_TERMS: int = 4

    # Numeric oracle
    NUMERIC_CUTOFF: int = 40
    NUMERIC_TOLERANCE: float = 1e-6
    ARCHIMEDEAN_TOLERANCE: float = 1e-8
    POLE_TOLERANCE: float = 1e-12
    MPMATH_DPS: int = 30
    BBAR_BOX: int = 12  # side of the diagonal valuation box for lower-Borel Tate sums

    # Suite workers (Celery on Redis; eager mode runs in-process)
    REDIS_URL: str = "redis://localhost:6379/0"
    SUITE_ALWAYS_EAGER: bool = True
    SUITE_TIME_LIMIT: int = 3600

    class Config:
        env_file = ".env"
        case_sensitive = True


settings = Settings()
