# Mawarith tools: Arabic text folding, JSON recovery, dataset I/O, report rendering
# dataset_io, tables and plots depend on core and are imported by module path.

from . import arabic_text
from . import json_extract

__all__ = [
    "arabic_text",
    "json_extract",
]
