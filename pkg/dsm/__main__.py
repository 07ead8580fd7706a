#!/usr/bin/env python
'''python -m dsm <verb>'''

# external packages
import os, sys

# local packages
currentdir = os.path.dirname(os.path.realpath(__file__))
sys.path.append(currentdir)
from dsm_cli import main

#----------------------------------------------

sys.exit(main())
