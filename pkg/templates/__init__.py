
from .comparison_template import get_comparison_template
from .summary_template import get_summary_template
__all__ = ["get_comparison_template", "get_summary_template"]
