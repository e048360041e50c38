#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#
# debris-indices documentation build configuration file
#
# This file is execfile()d with the current directory set to its
# containing dir.
#
import os
import sys
sys.path.insert(0, os.path.abspath(os.path.join('..', '..')))

# -- General configuration ------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.napoleon',
    'sphinx_click.ext'
]

templates_path = ['.templates']
source_suffix = '.rst'
master_doc = 'index'

project = 'debris-indices'
copyright = '2026, The debris-indices authors'
author = 'The debris-indices authors'

version = '0.1'
release = '0.1.0'

language = None
exclude_patterns = []

# Don't prefix every documented symbol with its module
add_module_names = False

pygments_style = 'sphinx'
modindex_common_prefix = ['debris_indices.']
todo_include_todos = False

# -- Options for HTML output ----------------------------------------------

html_theme = 'sphinx_rtd_theme'
html_static_path = []
htmlhelp_basename = 'debris-indicesdoc'

# -- Options for manual page output ---------------------------------------

man_pages = [
    (master_doc, 'debris', 'debris-indices Documentation',
     [author], 1)
]

autodoc_member_order = 'bysource'
