# -*- coding:utf-8 -*-
"""

"""
from ._base import BaseModel, ModelOutput, Evaluator
from .ft import FTModel
from .neuron import ResonatorModel
from ..const import MODEL_FT


def make_model(name, params=None, **kwargs):
    if name == MODEL_FT:
        return FTModel(params, **kwargs)
    return ResonatorModel(name, params, **kwargs)
