# -*- coding:utf-8 -*-
"""

"""

# version info

__version__ = '0.1.0'
