from .simexceptions import *
from .graph import *
from .ppr import *
from .fbs import *
from .baselines import *
from .evaluation import *
from .config import *
from .measures import *

"""A python package to search graphs for similar nodes with forward backward similarity"""
