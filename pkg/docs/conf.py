# Sphinx configuration for the commgraph API pages

import os
import sys
from importlib.metadata import PackageNotFoundError, version

sys.path.insert(0, os.path.abspath(".."))


# -- Project information -----------------------------------------------------

project = "commgraph"
copyright = "2026, UK Renal Registry"
author = "Joel Collins"

try:
    release = version("commgraph")
except PackageNotFoundError:
    release = "1.0.0"


# -- General configuration ---------------------------------------------------

extensions = [
    "sphinx_rtd_theme",
    "sphinx.ext.autodoc",
    "sphinx.ext.napoleon",
    "sphinx.ext.mathjax",
]

templates_path = ["_templates"]
exclude_patterns = []

autodoc_member_order = "bysource"
autodoc_typehints = "description"
# Google-style docstrings only
napoleon_numpy_docstring = False


# -- Options for HTML output -------------------------------------------------

html_theme = "sphinx_rtd_theme"
html_static_path = ["_static"]
