from __future__ import annotations

from dataclasses import asdict, dataclass

from cambi.errors import ConfigError

# Pooling weights are log2(16 / 2**scale); more scales would weigh negatively.
MAX_SCALES = 5


@dataclass(frozen=True)
class CambiConfig:
    """Pipeline hyperparameters. Defaults are the published CAMBI values."""

    canvas_width: int = 3840
    canvas_height: int = 2160
    window: int = 65
    tau_g: int = 2
    max_k: int = 4
    num_scales: int = 5
    top_percent: float = 0.30
    t_sec: float = 0.5

    def __post_init__(self):
        if self.canvas_width < 1 or self.canvas_height < 1:
            raise ConfigError(f"canvas must be positive, got {self.canvas_width}x{self.canvas_height}")
        if self.window < 3 or self.window % 2 == 0:
            raise ConfigError(f"window must be odd and >= 3, got {self.window}")
        if self.tau_g < 0:
            raise ConfigError(f"tau_g must be non-negative, got {self.tau_g}")
        if self.max_k < 1:
            raise ConfigError(f"max_k must be >= 1, got {self.max_k}")
        if not 1 <= self.num_scales <= MAX_SCALES:
            raise ConfigError(f"num_scales must be in 1..{MAX_SCALES}, got {self.num_scales}")
        if not 0.0 < self.top_percent <= 1.0:
            raise ConfigError(f"top_percent must be in (0, 1], got {self.top_percent}")
        if not self.t_sec > 0:
            raise ConfigError(f"t_sec must be positive, got {self.t_sec}")

    def to_dict(self) -> dict:
        return asdict(self)
