# -*- coding: utf-8 -*-
"""Sphinx configuration of the hetnet_structure documentation."""
import os
import sys
import time

from importlib_metadata import version as _version

sys.path.insert(0, os.path.abspath("../src"))

# -- General configuration -----------------------------------------------------

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.autosummary",
    "sphinx.ext.doctest",
    "sphinx.ext.intersphinx",
    "sphinx.ext.viewcode",
    "sphinx.ext.mathjax",
    "numpydoc",
]

numpydoc_show_class_members = False
autosummary_generate = True

source_suffix = ".rst"
master_doc = "index"

project = "hetnet_structure"
copyright = f"{time.localtime()[0]}, hetnet_structure developers"

version = _version("hetnet_structure")
release = version

exclude_patterns = ["_build", "Thumbs.db", ".DS_Store"]
pygments_style = "sphinx"

# -- Options for HTML output ---------------------------------------------------

html_theme = "furo"
htmlhelp_basename = "hetnet_structure_doc"

intersphinx_mapping = {
    "python": ("https://docs.python.org/3", None),
    "numpy": ("https://numpy.org/doc/stable", None),
    "scipy": ("https://docs.scipy.org/doc/scipy", None),
}
