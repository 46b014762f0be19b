try:
    from adambio._adambio import (
        PersonRecord,
        RetrievalError,
        Store,
        canonical_name,
        cluster_count,
        grade_response,
        mask_biography,
        quantize_year,
        stub_embed,
    )
except ImportError:  # build-tree layout: extension on sys.path directly
    from _adambio import (
        PersonRecord,
        RetrievalError,
        Store,
        canonical_name,
        cluster_count,
        grade_response,
        mask_biography,
        quantize_year,
        stub_embed,
    )

__all__ = [
    "PersonRecord",
    "RetrievalError",
    "Store",
    "canonical_name",
    "cluster_count",
    "grade_response",
    "mask_biography",
    "quantize_year",
    "stub_embed",
]
