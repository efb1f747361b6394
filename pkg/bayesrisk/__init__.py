# *****************************************************************************
# *
# * Authors:     The scipion-bayesrisk contributors
# *
# * This program is free software; you can redistribute it and/or modify
# * it under the terms of the GNU General Public License as published by
# * the Free Software Foundation; either version 3 of the License, or
# * (at your option) any later version.
# *
# * This program is distributed in the hope that it will be useful,
# * but WITHOUT ANY WARRANTY; without even the implied warranty of
# * MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# * GNU General Public License for more details.
# *
# * You should have received a copy of the GNU General Public License
# * along with this program; if not, write to the Free Software
# * Foundation, Inc., 59 Temple Place, Suite 330, Boston, MA
# * 02111-1307  USA
# *
# *****************************************************************************

import importlib.util
import os

import pwem

from .constants import (BAYESRISK_OUT, BAYESRISK_PRICES, BAYESRISK_TRANSACTIONS,
                        DEFAULT_OUT, DEFAULT_PRICES, DEFAULT_TRANSACTIONS)


__version__ = '1.0.0'
_logo = ""
_references = ['West1997', 'Bollerslev1986', 'Kupiec1995',
               'Christoffersen1998', 'Gordon1993']


class Plugin(pwem.Plugin):
    _validationMsg = None
    _url = ""

    @classmethod
    def _defineVariables(cls):
        cls._defineVar(BAYESRISK_OUT, DEFAULT_OUT)
        cls._defineVar(BAYESRISK_PRICES, DEFAULT_PRICES)
        cls._defineVar(BAYESRISK_TRANSACTIONS, DEFAULT_TRANSACTIONS)

    @classmethod
    def getOutputRoot(cls):
        """ Default folder for command line runs when --out is not given. """
        return cls.getVar(BAYESRISK_OUT,
                          os.environ.get(BAYESRISK_OUT, DEFAULT_OUT))

    @classmethod
    def getPricesPath(cls):
        return cls.getVar(BAYESRISK_PRICES,
                          os.environ.get(BAYESRISK_PRICES, DEFAULT_PRICES))

    @classmethod
    def getTransactionsPath(cls):
        return cls.getVar(BAYESRISK_TRANSACTIONS,
                          os.environ.get(BAYESRISK_TRANSACTIONS, DEFAULT_TRANSACTIONS))

    @classmethod
    def validateInstallation(cls):
        """ Check that the numerical stack is importable """

        if cls._validationMsg is None:
            missing = [name for name in cls.getDependencies()
                       if importlib.util.find_spec(name) is None]
            cls._validationMsg = ["Python package %s not found, please "
                                  "install it." % name for name in missing]

        return cls._validationMsg

    @classmethod
    def getDependencies(cls):
        return ['numpy', 'scipy', 'pandas', 'matplotlib']

    @classmethod
    def defineBinaries(cls, env):
        # Pure python plugin, nothing to compile or download
        pass
