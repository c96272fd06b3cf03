# Sphinx configuration for the ghnx documentation.
import sys
import os
sys.path.insert(0, os.path.abspath('../'))


project = 'ghnx'
copyright = '2024, the ghnx developers'
author = 'the ghnx developers'


extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.napoleon',
    'sphinx.ext.mathjax',
    "sphinx.ext.autosectionlabel",
    'sphinx_rtd_theme',
    # user/formats.md and math/ghn.md
    'myst_parser'
]

# numpy-style docstrings only
napoleon_google_docstring = False
napoleon_numpy_docstring = True
autodoc_member_order = 'bysource'

myst_enable_extensions = [
    "amsmath",
    "dollarmath",
    "deflist",
]

exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store']

# Make sure the target is unique
autosectionlabel_prefix_document = True


html_theme = 'sphinx_rtd_theme'
