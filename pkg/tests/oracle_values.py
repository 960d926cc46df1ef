"""Frozen oracle constants; regenerate with make_oracles.py."""

PDF_ALPHA15_X1 = 0.2020381596095751183
LLR_ALPHA18_G08_Y05 = 0.84049882563383356952
J_OF_2 = 0.48594415413293532011
J_INV_HALF = 2.0435393957078569012
