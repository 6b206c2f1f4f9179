"""Sphinx configuration for Pontrol documentation."""

# Standard library imports
import os
import sys
from datetime import datetime

# Add the project root to the Python path
sys.path.insert(0, os.path.abspath("../.."))

# First-party imports
from pontrol import __version__  # noqa: E402

# Project information
project = "Pontrol"
copyright = f"{datetime.now().year}, Pontrol Contributors"
author = "Pontrol Contributors"
release = __version__
version = ".".join(__version__.split(".")[:2])

# General configuration
extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.autosummary",
    "sphinx.ext.doctest",
    "sphinx.ext.mathjax",
    "sphinx.ext.napoleon",
    "sphinx.ext.viewcode",
    "sphinx.ext.intersphinx",
    "sphinx_autodoc_typehints",
    "myst_parser",
]
autosummary_generate = True

# Google-style docstrings; attribute sections render as variables
napoleon_google_docstring = True
napoleon_numpy_docstring = False
napoleon_include_init_with_doc = False
napoleon_use_ivar = True
napoleon_use_param = True
napoleon_use_rtype = True

# Dataclasses document their fields, so skip the generated __init__
autodoc_default_options = {
    "members": True,
    "member-order": "bysource",
    "undoc-members": True,
    "exclude-members": "__weakref__, __init__",
}
autodoc_typehints = "description"
autodoc_class_signature = "separated"

# Examples in docstrings run under `sphinx-build -b doctest`
doctest_global_setup = """
from pontrol.integrators import TimeGrid
from pontrol.models import ModelKind
from pontrol.ocp import OcpProblem
from pontrol.reproduction import reference_params
"""

myst_enable_extensions = ["colon_fence", "deflist", "dollarmath"]

intersphinx_mapping = {
    "python": ("https://docs.python.org/3", None),
    "numpy": ("https://numpy.org/doc/stable/", None),
    "scipy": ("https://docs.scipy.org/doc/scipy/", None),
    "pandas": ("https://pandas.pydata.org/docs/", None),
}

templates_path = ["_templates"]
exclude_patterns: list[str] = ["api/generated"]

# HTML output options
html_theme = "sphinx_rtd_theme"
html_static_path: list[str] = []
html_title = f"Pontrol {release}"
html_theme_options = {
    "prev_next_buttons_location": "bottom",
    "collapse_navigation": False,
    "sticky_navigation": True,
    "navigation_depth": 3,
}
