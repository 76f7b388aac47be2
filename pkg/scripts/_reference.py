"""Reference values the experiment scripts compare against."""

# (b, beta) -> (t_r elastic, t_r viscoelastic)
RUPTURE_B4 = {
    (4.0, 3.0): (0.01955, 0.01938), (4.0, 2.0): (0.01892, 0.01861),
    (4.0, 1.0): (0.01251, 0.01216), (4.0, 2 / 3): (0.01081, 0.01026),
    (4.0, 0.5): (0.00850, 0.00825),
}
RUPTURE_BETA_HALF = {
    (4.0, 0.5): (0.00850, 0.00755), (3.0, 0.5): (0.03714, 0.0271),
    (2.0, 0.5): (0.1563, 0.1418), (1.0, 0.5): (0.7384, 0.7212),
    (2 / 3, 0.5): (0.9654, 0.9513),
}
# (b, beta) -> (l(t_d) elastic, l(t_d) viscoelastic)
LENGTH_B4 = {
    (4.0, 3.0): (0.07490, 0.07203), (4.0, 2.0): (0.08562, 0.08304),
    (4.0, 1.0): (0.09447, 0.09126), (4.0, 2 / 3): (0.1013, 0.09843),
    (4.0, 0.5): (0.1062, 0.10150),
}
LENGTH_BETA_HALF = {
    (4.0, 0.5): (0.1062, 0.1015), (3.0, 0.5): (0.1006, 0.0888),
    (2.0, 0.5): (0.0885, 0.0652), (1.0, 0.5): (0.0552, 0.0294),
    (2 / 3, 0.5): (0.0356, 0.0165),
}
MESH = [0.04, 0.02, 0.01, 0.005, 0.0025, 0.00125]
# CZ-tip stress at t = 0.6, b = 4, per mesh size above, and its extrapolated limit
TIP_STRESS = {
    2.0: ([1.39334, 1.44340, 1.49319, 1.54250, 1.59121, 1.63929], 5.25425),
    0.5: ([1.17767, 1.18144, 1.18438, 1.18667, 1.18844, 1.18980], 1.19443),
}
