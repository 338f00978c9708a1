from .layout import LayoutRule, build_manifest, discover_videos
from .split import largest_remainder, source_groups, split_manifest
from .selection import merge, select

__all__ = [
    "LayoutRule",
    "build_manifest",
    "discover_videos",
    "largest_remainder",
    "source_groups",
    "split_manifest",
    "merge",
    "select",
]
