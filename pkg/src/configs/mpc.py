# Ramas del arbol de escenarios (fijo por la regla mod-3)
BRANCHES = 3

# Horizontes por defecto
HORIZON = 8
ROBUST_HORIZON = 2

# Cross-entropy
CANDIDATES = 192
ELITES = 24
ITERATIONS = 4
PENALTY = 1.0e4
MIN_STD = 1.0e-3

# Factor de tolerancia de llegada: 0.5 * v_max * t_e
ARRIVAL_FACTOR = 0.5
