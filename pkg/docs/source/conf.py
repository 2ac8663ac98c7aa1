# Sphinx configuration for the A-Isometry-Geometry code reference.
import os
import sys
from datetime import datetime

project = "A-Isometry-Geometry"
copyright = f"{datetime.now().year}, A-Isometry-Geometry contributors"
author = "A-Isometry-Geometry contributors"
release = "0.1.0"

# modules are imported top-level from src/ (config, models, core.*, features.*)
sys.path.insert(0, os.path.abspath("../../src"))

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.viewcode",
    "sphinx.ext.napoleon",
    "sphinx.ext.autosummary",
    "sphinx.ext.mathjax",
    "sphinx_autodoc_typehints",
]

templates_path = ["_templates"]
exclude_patterns = []

html_theme = "sphinx_rtd_theme"
html_static_path = ["_static"]

autodoc_default_options = {
    "members": True,
    "member-order": "bysource",
    "undoc-members": True,
    "show-inheritance": True,
}
# defaults as written in the source
autodoc_preserve_defaults = True
autodoc_typehints_format = "short"

napoleon_google_docstring = True
napoleon_numpy_docstring = True
napoleon_include_init_with_doc = False
napoleon_use_param = True
napoleon_use_rtype = True
napoleon_attr_annotations = True

typehints_fully_qualified = False
always_document_param_types = False
typehints_document_rtype = True
