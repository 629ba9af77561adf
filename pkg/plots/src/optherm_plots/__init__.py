"""Render the thermometry CLI's CSV outputs into publication figure layouts.

Pure presentation: no physics is recomputed here. Input is the commented-CSV
format emitted by the ``optherm`` command-line tool; output is an image per
figure id, or a bit-identical text dump of the plotted columns.
"""

__version__ = "0.1.0"
