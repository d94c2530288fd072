"""Zero-shot planning of LTL tasks over labeled grid maps."""

from ltlcompose.pipeline import Pipeline, compile_formula

__all__ = ["Pipeline", "compile_formula"]
