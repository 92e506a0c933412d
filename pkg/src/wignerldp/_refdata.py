"""Frozen reference values for regression tests.

TWO_POINT_RATE_CURVE: published reference curve for the rate function of
the symmetric two-atom deformation at parameter a = 1 (real symmetry
class): pairs (x, I(x)).
"""

TWO_POINT_RATE_CURVE = [
    (2.61, 0.000762498),
    (2.62, 0.00190294),
    (2.63, 0.00334702),
    (2.64, 0.00504208),
    (2.65, 0.00695665),
    (2.66, 0.00906917),
    (2.67, 0.0113637),
    (2.68, 0.0138279),
    (2.69, 0.0164517),
    (2.7, 0.0192268),
    (2.71, 0.0221465),
    (2.72, 0.0252045),
    (2.73, 0.0283958),
    (2.74, 0.0317158),
    (2.75, 0.0351604),
    (2.76, 0.0387259),
    (2.77, 0.0424092),
    (2.78, 0.0462072),
    (2.79, 0.0501172),
    (2.8, 0.0541368),
    (2.81, 0.0582636),
    (2.82, 0.0624956),
    (2.83, 0.0668307),
    (2.84, 0.0712673),
    (2.85, 0.0758034),
    (2.86, 0.0804377),
    (2.87, 0.0851685),
    (2.88, 0.0899945),
    (2.89, 0.0949144),
    (2.9, 0.0999269),
    (2.91, 0.105031),
    (2.92, 0.110225),
    (2.93, 0.115509),
    (2.94, 0.12088),
    (2.95, 0.126339),
    (2.96, 0.131885),
    (2.97, 0.137516),
    (2.98, 0.143231),
    (2.99, 0.149031),
    (3.0, 0.154914),
    (3.01, 0.160879),
    (3.02, 0.166925),
    (3.03, 0.173053),
    (3.04, 0.179261),
    (3.05, 0.185549),
    (3.06, 0.191916),
    (3.07, 0.198362),
    (3.08, 0.204886),
    (3.09, 0.211487),
    (3.1, 0.218165),
    (3.11, 0.224919),
    (3.12, 0.23175),
    (3.13, 0.238656),
    (3.14, 0.245637),
    (3.15, 0.252693),
    (3.16, 0.259823),
    (3.17, 0.267027),
    (3.18, 0.274304),
    (3.19, 0.281655),
    (3.2, 0.289078),
    (3.21, 0.296573),
    (3.22, 0.30414),
    (3.23, 0.311779),
    (3.24, 0.319489),
    (3.25, 0.32727),
    (3.26, 0.335121),
    (3.27, 0.343043),
    (3.28, 0.351035),
    (3.29, 0.359097),
    (3.3, 0.367228),
    (3.31, 0.375428),
    (3.32, 0.383697),
    (3.33, 0.392034),
    (3.34, 0.40044),
    (3.35, 0.408914),
    (3.36, 0.417456),
    (3.37, 0.426066),
    (3.38, 0.434743),
    (3.39, 0.443487),
    (3.4, 0.452298),
    (3.41, 0.461176),
    (3.42, 0.47012),
    (3.43, 0.479131),
    (3.44, 0.488207),
    (3.45, 0.49735),
    (3.46, 0.506558),
    (3.47, 0.515832),
    (3.48, 0.525171),
    (3.49, 0.534575),
    (3.5, 0.544044),
    (3.51, 0.553578),
    (3.52, 0.563177),
    (3.53, 0.57284),
    (3.54, 0.582567),
    (3.55, 0.592359),
    (3.56, 0.602214),
    (3.57, 0.612133),
    (3.58, 0.622116),
    (3.59, 0.632162),
    (3.6, 0.642272),
    (3.61, 0.652445),
    (3.62, 0.662681),
    (3.63, 0.672979),
    (3.64, 0.683341),
    (3.65, 0.693765),
    (3.66, 0.704252),
    (3.67, 0.714801),
    (3.68, 0.725412),
    (3.69, 0.736086),
    (3.7, 0.746821),
]
