import importlib.metadata as metadata

# Sphinx configuration, see https://www.sphinx-doc.org/en/master/usage/configuration.html

# -- Project information -----------------------------------------------------

project = "pergen"
copyright = "2024, Quinn Thibeault"
author = "Quinn Thibeault"
release = metadata.version("pergen")


# -- General configuration ---------------------------------------------------

extensions = [
    "sphinx.ext.napoleon",
    "sphinx.ext.autodoc",
    "sphinx.ext.mathjax",
    "sphinx.ext.intersphinx",
]

templates_path = []
exclude_patterns = ["_build", "Thumbs.db", ".DS_Store"]
default_role = "py:obj"


# -- Options for HTML output -------------------------------------------------

html_theme = "furo"
html_title = "pergen"
html_static_path = []


# -- Intersphinx configuration -----------------------------------------------

intersphinx_mapping = {
    "python": ("https://docs.python.org/3", None),
    "numpy": ("https://numpy.org/doc/stable", None),
    "scipy": ("https://docs.scipy.org/doc/scipy", None),
    "attrs": ("https://www.attrs.org/en/stable", None),
}


# -- Autodoc configuration ---------------------------------------------------

autodoc_typehints = "description"
autodoc_member_order = "bysource"
