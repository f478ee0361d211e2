"""Run configuration: one JSON document per pipeline run."""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any

from .corpusops import SamplerConfig
from .noising import NoiseConfig
from .providers import URL_ENV, HttpProvider, MockProvider
from .pseudogen import MaskMode, PseudoConfig
from .textcore import get_language, languages


class ConfigError(ValueError):
    pass


def _check_keys(section: str, data: dict, allowed: set[str]) -> None:
    if not isinstance(data, dict):
        raise ConfigError(f"{section}: expected an object")
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ConfigError(f"{section}: unknown key(s) {unknown}")


@dataclass(frozen=True)
class ProviderConfig:
    kind: str = "mock"
    url: str | None = None
    dictionaries: dict[str, dict[str, str]] = field(default_factory=dict)
    max_attempts: int = 3
    backoff: float = 0.5
    timeout: float = 30.0

    def __post_init__(self) -> None:
        if self.kind not in ("mock", "http"):
            raise ConfigError(f"provider.kind must be 'mock' or 'http', not {self.kind!r}")

    def build(self):
        if self.kind == "mock":
            return MockProvider(self.dictionaries)
        url = os.environ.get(URL_ENV) or self.url
        if not url:
            raise ConfigError(f"http provider needs a URL ({URL_ENV} or provider.url)")
        return HttpProvider(url, max_attempts=self.max_attempts, backoff=self.backoff,
                            timeout=self.timeout)


@dataclass(frozen=True)
class SplitConfig:
    train: float = 0.8
    validation: float = 0.1
    test: float = 0.1
    zero_shot_languages: tuple[str, ...] = ()
    zero_shot_directions: tuple[str, ...] = ()
    # optional per-direction {"en-zh": [train, val, test]} sizes
    targets: dict[str, list[int]] = field(default_factory=dict)


@dataclass(frozen=True)
class PathsConfig:
    input: str | None = None
    output: str | None = None


@dataclass(frozen=True)
class RunConfig:
    global_seed: int = 0
    languages: tuple[str, ...] = tuple(lang.code for lang in languages())
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    pseudo: PseudoConfig = field(default_factory=PseudoConfig)
    sampler: SamplerConfig = field(default_factory=SamplerConfig)
    split: SplitConfig = field(default_factory=SplitConfig)
    provider: ProviderConfig = field(default_factory=ProviderConfig)
    paths: PathsConfig = field(default_factory=PathsConfig)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "RunConfig":
        try:
            return cls._from_dict(data)
        except ConfigError:
            raise
        except (ValueError, TypeError) as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def _from_dict(cls, data: dict[str, Any]) -> "RunConfig":
        _check_keys("config", data, {f.name for f in fields(cls)})
        kw: dict[str, Any] = {}
        if "global_seed" in data:
            kw["global_seed"] = int(data["global_seed"])
        if "languages" in data:
            kw["languages"] = tuple(get_language(x).code for x in data["languages"])
        noise = NoiseConfig()
        if "noise" in data:
            _check_keys("noise", data["noise"], {f.name for f in fields(NoiseConfig)})
            noise = NoiseConfig(**data["noise"])
        kw["noise"] = noise
        pseudo = dict(data.get("pseudo", {}))
        _check_keys("pseudo", pseudo, {"lambda_threshold", "k_choices", "mask_mode"})
        if "k_choices" in pseudo:
            pseudo["k_choices"] = tuple(pseudo["k_choices"])
        kw["pseudo"] = PseudoConfig(noise=noise, **pseudo)
        if "sampler" in data:
            _check_keys("sampler", data["sampler"], {"alpha", "direction_counts"})
            kw["sampler"] = SamplerConfig(**data["sampler"])
        if "split" in data:
            _check_keys("split", data["split"], {f.name for f in fields(SplitConfig)})
            sp = dict(data["split"])
            for key in ("zero_shot_languages", "zero_shot_directions"):
                if key in sp:
                    sp[key] = tuple(sp[key])
            kw["split"] = SplitConfig(**sp)
        if "provider" in data:
            _check_keys("provider", data["provider"], {f.name for f in fields(ProviderConfig)})
            kw["provider"] = ProviderConfig(**data["provider"])
        if "paths" in data:
            _check_keys("paths", data["paths"], {"input", "output"})
            kw["paths"] = PathsConfig(**data["paths"])
        return cls(**kw)

    def to_dict(self) -> dict[str, Any]:
        return {
            "global_seed": self.global_seed,
            "languages": list(self.languages),
            "noise": {f.name: getattr(self.noise, f.name) for f in fields(NoiseConfig)},
            "pseudo": {
                "lambda_threshold": self.pseudo.lambda_threshold,
                "k_choices": list(self.pseudo.k_choices),
                "mask_mode": MaskMode(self.pseudo.mask_mode).value,
            },
            "sampler": {"alpha": self.sampler.alpha,
                        "direction_counts": dict(self.sampler.direction_counts)},
            "split": {
                "train": self.split.train,
                "validation": self.split.validation,
                "test": self.split.test,
                "zero_shot_languages": list(self.split.zero_shot_languages),
                "zero_shot_directions": list(self.split.zero_shot_directions),
                "targets": dict(self.split.targets),
            },
            "provider": {f.name: getattr(self.provider, f.name) for f in fields(ProviderConfig)},
            "paths": {"input": self.paths.input, "output": self.paths.output},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, ensure_ascii=False, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
        return cls.from_dict(data)

    @classmethod
    def load(cls, path: str | Path) -> "RunConfig":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))

    def digest(self) -> str:
        canon = json.dumps(self.to_dict(), sort_keys=True, ensure_ascii=False, separators=(",", ":"))
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()
