"""Scene-parsing class tables.

The default table is the standard 150-class scene-parsing label list used by
common pretrained segmenters; indices below are 0-based channel positions in
the model output. Models trained on a different label set can pass their own
table through ExporterConfig.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .errors import ConfigError

ADE20K_CLASS_NAMES = (
    "wall", "building", "sky", "floor", "tree",
    "ceiling", "road", "bed", "windowpane", "grass",
    "cabinet", "sidewalk", "person", "earth", "door",
    "table", "mountain", "plant", "curtain", "chair",
    "car", "water", "painting", "sofa", "shelf",
    "house", "sea", "mirror", "rug", "field",
    "armchair", "seat", "fence", "desk", "rock",
    "wardrobe", "lamp", "bathtub", "railing", "cushion",
    "base", "box", "column", "signboard", "chest of drawers",
    "counter", "sand", "sink", "skyscraper", "fireplace",
    "refrigerator", "grandstand", "path", "stairs", "runway",
    "case", "pool table", "pillow", "screen door", "stairway",
    "river", "bridge", "bookcase", "blind", "coffee table",
    "toilet", "flower", "book", "hill", "bench",
    "countertop", "stove", "palm", "kitchen island", "computer",
    "swivel chair", "boat", "bar", "arcade machine", "hovel",
    "bus", "towel", "light", "truck", "tower",
    "chandelier", "awning", "streetlight", "booth", "television",
    "airplane", "dirt track", "apparel", "pole", "land",
    "bannister", "escalator", "ottoman", "bottle", "buffet",
    "poster", "stage", "van", "ship", "fountain",
    "conveyer belt", "canopy", "washer", "plaything", "swimming pool",
    "stool", "barrel", "basket", "waterfall", "tent",
    "bag", "minibike", "cradle", "oven", "ball",
    "food", "step", "tank", "trade name", "microwave",
    "pot", "animal", "bicycle", "lake", "dishwasher",
    "screen", "blanket", "sculpture", "hood", "sconce",
    "vase", "traffic light", "tray", "ashcan", "fan",
    "pier", "crt screen", "plate", "monitor", "bulletin board",
    "shower", "radiator", "glass", "clock", "flag",
)

# Classes whose probability mass counts as foreground evidence: the moving
# things a surveillance scene cares about.
DEFAULT_FOREGROUND_NAMES = (
    "person", "car", "cushion", "box", "book", "boat",
    "bus", "truck", "bottle", "van", "bag", "bicycle",
)


def resolve_class_indices(
    names: Iterable[str], table: Sequence[str] = ADE20K_CLASS_NAMES
) -> tuple[int, ...]:
    """Map class names to channel indices; every name must resolve."""
    lookup = {name: i for i, name in enumerate(table)}
    indices = []
    for name in names:
        if name not in lookup:
            raise ConfigError(f"unknown class name {name!r} (table has {len(table)})")
        indices.append(lookup[name])
    if not indices:
        raise ConfigError("at least one foreground class name is required")
    return tuple(indices)
