# bdwalk documentation build configuration file
#
# This file is execfile()d with the current directory set to its containing
# dir.

import os
import sys

sys.path.insert(0, os.path.abspath('..'))

import bdwalk


extensions = []

templates_path = ['_templates']

source_suffix = '.rst'

master_doc = 'index'

project = 'bdwalk'
copyright = '2026, bdwalk developers'

version = bdwalk.__version__
release = bdwalk.__version__

exclude_patterns = ['_build']

pygments_style = 'sphinx'

html_theme = 'alabaster'

htmlhelp_basename = 'bdwalkdoc'

man_pages = [('cli', 'bdwalk', 'bdwalk command line', ['bdwalk developers'], 1)]
