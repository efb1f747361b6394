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
"""

@book{West1997,
title = "Bayesian Forecasting and Dynamic Models",
publisher = "Springer",
address = "New York",
edition = "2",
year = "1997",
doi = "https://dx.doi.org/10.1007/b98971",
author = "Mike West and Jeff Harrison"
}

@article{Bollerslev1986,
title = "Generalized autoregressive conditional heteroskedasticity",
journal = "Journal of Econometrics",
volume = "31",
number = "3",
pages = "307 - 327",
year = "1986",
doi = "https://dx.doi.org/10.1016/0304-4076(86)90063-1",
author = "Tim Bollerslev"
}

@article{Kupiec1995,
title = "Techniques for verifying the accuracy of risk measurement models",
journal = "The Journal of Derivatives",
volume = "3",
number = "2",
pages = "73 - 84",
year = "1995",
doi = "https://dx.doi.org/10.3905/jod.1995.407942",
author = "Paul H. Kupiec"
}

@article{Christoffersen1998,
title = "Evaluating interval forecasts",
journal = "International Economic Review",
volume = "39",
number = "4",
pages = "841 - 862",
year = "1998",
doi = "https://dx.doi.org/10.2307/2527341",
author = "Peter F. Christoffersen"
}

@article{Wilson1927,
title = "Probable inference, the law of succession, and statistical inference",
journal = "Journal of the American Statistical Association",
volume = "22",
number = "158",
pages = "209 - 212",
year = "1927",
doi = "https://dx.doi.org/10.1080/01621459.1927.10502953",
author = "Edwin B. Wilson"
}

@article{Gordon1993,
title = "Novel approach to nonlinear/non-Gaussian Bayesian state estimation",
journal = "IEE Proceedings F",
volume = "140",
number = "2",
pages = "107 - 113",
year = "1993",
doi = "https://dx.doi.org/10.1049/ip-f-2.1993.0015",
author = "N.J. Gordon and D.J. Salmond and A.F.M. Smith"
}

@article{Gneiting2007,
title = "Strictly proper scoring rules, prediction, and estimation",
journal = "Journal of the American Statistical Association",
volume = "102",
number = "477",
pages = "359 - 378",
year = "2007",
doi = "https://dx.doi.org/10.1198/016214506000001437",
author = "Tilmann Gneiting and Adrian E. Raftery"
}

"""
