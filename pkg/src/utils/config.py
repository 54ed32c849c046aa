"""Application settings for the biflock simulator."""

from pathlib import Path

from dotenv import load_dotenv
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

# Load environment variables
load_dotenv()


class Settings(BaseSettings):
    """Defaults read from ``BIFLOCK_*`` environment variables or ``.env``."""

    model_config = SettingsConfigDict(env_prefix="BIFLOCK_", env_file=".env", case_sensitive=False, extra="ignore")

    # Application
    log_level: str = Field(default="INFO")
    output_dir: str = Field(default="./output")

    # Integration defaults
    default_dt: float = Field(default=1e-3, gt=0)
    default_t_end: float = Field(default=10.0, gt=0)
    default_sample_stride: int = Field(default=10, ge=1)

    # Stage thresholds
    eps_v: float = Field(default=0.1, gt=0)
    eps_x: float = Field(default=0.5, gt=0)
    eps_f: float = Field(default=1e-4, gt=0)

    # Certificate tolerances
    envelope_tol: float = Field(default=1e-2, ge=0)
    macro_tol: float = Field(default=1e-6, ge=0)
    eps0: float = Field(default=0.5, gt=0)
    eps0_tilde: float = Field(default=0.5, gt=0)

    sweep_parallelism: int = Field(default=1, ge=1)

    project_root: Path = Field(default_factory=lambda: Path(__file__).parent.parent.parent)

    @property
    def log_dir(self) -> Path:
        return Path(self.output_dir) / "logs"

    @property
    def stage_thresholds(self):
        return (self.eps_v, self.eps_x, self.eps_f)

    def certificate_options(self) -> dict:
        """Keyword defaults handed to every registered certificate."""
        return {
            "tol": self.envelope_tol,
            "macro_tol": self.macro_tol,
            "eps0": self.eps0,
            "eps0_tilde": self.eps0_tilde,
        }


# Global settings instance
settings = Settings()
