"""Model loaders: one per family, each returning forecast(context) -> 24 floats.

Heavy libraries are imported lazily inside the loader so the bridge
starts (and the echo forecaster works) without any of them installed.
Probabilistic families are reduced to a point forecast by the median
of their sampled trajectories; sampling is reseeded per request so two
runs with the same seed produce identical output.
"""

from __future__ import annotations

import os
from typing import Callable

from .config import HORIZON, BridgeConfig, cache_dir

ForecastFn = Callable[[list[float], int], list[float]]


class ModelLoadError(RuntimeError):
    pass


def _export_cache_env() -> None:
    root = cache_dir()
    if root:
        os.environ.setdefault("HF_HOME", root)
        os.environ.setdefault("HUGGINGFACE_HUB_CACHE", root)


def _load_echo(config: BridgeConfig) -> ForecastFn:
    def forecast(context: list[float], request_id: int) -> list[float]:
        return context[-HORIZON:]

    return forecast


def _load_chronos_bolt(config: BridgeConfig) -> ForecastFn:
    _export_cache_env()
    try:
        import torch
        from chronos import BaseChronosPipeline
    except ImportError as exc:
        raise ModelLoadError(f"chronos-forecasting unavailable: {exc}") from exc
    pipeline = BaseChronosPipeline.from_pretrained(
        f"amazon/chronos-bolt-{config.variant}", device_map=config.device
    )

    def forecast(context: list[float], request_id: int) -> list[float]:
        torch.manual_seed(config.seed + request_id)
        values = torch.tensor(context, dtype=torch.float32).unsqueeze(0)
        quantiles, _ = pipeline.predict_quantiles(
            values, prediction_length=HORIZON, quantile_levels=[0.5]
        )
        return [float(v) for v in quantiles[0, :, 0]]

    return forecast


def _load_chronos_t5(config: BridgeConfig) -> ForecastFn:
    _export_cache_env()
    try:
        import torch
        from chronos import ChronosPipeline
    except ImportError as exc:
        raise ModelLoadError(f"chronos-forecasting unavailable: {exc}") from exc
    pipeline = ChronosPipeline.from_pretrained(
        f"amazon/chronos-t5-{config.variant}", device_map=config.device
    )

    def forecast(context: list[float], request_id: int) -> list[float]:
        torch.manual_seed(config.seed + request_id)
        values = torch.tensor(context, dtype=torch.float32).unsqueeze(0)
        samples = pipeline.predict(
            values, prediction_length=HORIZON,
            num_samples=config.num_samples,
        )
        return [float(v) for v in samples[0].median(dim=0).values]

    return forecast


def _load_moirai(config: BridgeConfig) -> ForecastFn:
    _export_cache_env()
    try:
        import torch
        from uni2ts.model.moirai import MoiraiForecast, MoiraiModule
    except ImportError as exc:
        raise ModelLoadError(f"uni2ts unavailable: {exc}") from exc
    module = MoiraiModule.from_pretrained(
        f"Salesforce/moirai-1.1-R-{config.variant}"
    )
    model = MoiraiForecast(
        module=module,
        prediction_length=HORIZON,
        context_length=168,
        patch_size="auto",
        num_samples=config.num_samples,
        target_dim=1,
        feat_dynamic_real_dim=0,
        past_feat_dynamic_real_dim=0,
    )

    def forecast(context: list[float], request_id: int) -> list[float]:
        torch.manual_seed(config.seed + request_id)
        past = torch.tensor(context, dtype=torch.float32).reshape(1, -1, 1)
        samples = model(
            past_target=past,
            past_observed_target=torch.ones_like(past, dtype=torch.bool),
            past_is_pad=torch.zeros(past.shape[:2], dtype=torch.bool),
        )
        return [float(v) for v in samples[0].median(dim=0).values]

    return forecast


def _load_timesfm(config: BridgeConfig) -> ForecastFn:
    _export_cache_env()
    try:
        import numpy as np
        import timesfm
    except ImportError as exc:
        raise ModelLoadError(f"timesfm unavailable: {exc}") from exc
    if config.variant == "200m":
        checkpoint = "google/timesfm-1.0-200m-pytorch"
    else:
        checkpoint = "google/timesfm-2.0-500m-pytorch"
    model = timesfm.TimesFm(
        hparams=timesfm.TimesFmHparams(
            context_len=192, horizon_len=HORIZON, backend=config.device
        ),
        checkpoint=timesfm.TimesFmCheckpoint(huggingface_repo_id=checkpoint),
    )

    def forecast(context: list[float], request_id: int) -> list[float]:
        point, _ = model.forecast([np.asarray(context)], freq=[0])
        return [float(v) for v in point[0][:HORIZON]]

    return forecast


def _load_time_moe(config: BridgeConfig) -> ForecastFn:
    _export_cache_env()
    try:
        import torch
        from transformers import AutoModelForCausalLM
    except ImportError as exc:
        raise ModelLoadError(f"transformers unavailable: {exc}") from exc
    repo = {"50m": "Maple728/TimeMoE-50M", "200m": "Maple728/TimeMoE-200M"}
    model = AutoModelForCausalLM.from_pretrained(
        repo[config.variant], trust_remote_code=True
    ).to(config.device)

    def forecast(context: list[float], request_id: int) -> list[float]:
        torch.manual_seed(config.seed + request_id)
        values = torch.tensor(context, dtype=torch.float32).unsqueeze(0)
        mean = values.mean(dim=-1, keepdim=True)
        std = values.std(dim=-1, keepdim=True).clamp_min(1e-8)
        normed = (values - mean) / std
        out = model.generate(normed.to(config.device), max_new_tokens=HORIZON)
        pred = out[0, -HORIZON:].cpu() * std[0] + mean[0]
        return [float(v) for v in pred]

    return forecast


def _load_timegpt(config: BridgeConfig) -> ForecastFn:
    try:
        import pandas as pd
        from nixtla import NixtlaClient
    except ImportError as exc:
        raise ModelLoadError(f"nixtla client unavailable: {exc}") from exc
    client = NixtlaClient(api_key=config.api_key)

    def forecast(context: list[float], request_id: int) -> list[float]:
        frame = pd.DataFrame(
            {
                "ds": pd.date_range("2000-01-01", periods=len(context),
                                    freq="h"),
                "y": context,
            }
        )
        out = client.forecast(df=frame, h=HORIZON, freq="h",
                              time_col="ds", target_col="y")
        return [float(v) for v in out["TimeGPT"][:HORIZON]]

    return forecast


LOADERS: dict[str, Callable[[BridgeConfig], ForecastFn]] = {
    "echo": _load_echo,
    "chronos-bolt": _load_chronos_bolt,
    "chronos-t5": _load_chronos_t5,
    "moirai": _load_moirai,
    "timesfm": _load_timesfm,
    "time-moe": _load_time_moe,
    "timegpt": _load_timegpt,
}


def load_forecaster(config: BridgeConfig) -> ForecastFn:
    return LOADERS[config.model_family](config)
