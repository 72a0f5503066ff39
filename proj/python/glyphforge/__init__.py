"""Python bindings for the glyphforge C++ core."""

from ._glyphforge import (
    BackendError,
    ValidationError,
    ablation_improvement,
    bbox_iou,
    clip_rescale,
    compute_stats,
    detect_math,
    extract_quoted_text,
    levenshtein,
    normalize_text,
    ocr_acc,
    ocr_ned,
    otsu_threshold,
    overlay_grid,
    parse_plan,
    render_plan,
    run_mock_pipeline,
    unicode_to_latex,
    vlm_score_normalize,
)

__all__ = [name for name in dir() if not name.startswith("_")]
