"""Code-review analytics: mine review histories, classify comment usefulness,
rank reviewers and projects, and serve the results over HTTP."""

__version__ = "0.1.0"
