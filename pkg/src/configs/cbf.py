# Pendiente clase-K por defecto
LAMBDA = 1.0

# Temperatura del smooth-min entre tareas independientes
SMOOTH_MIN_KAPPA = 10.0

# Adaptacion del factor de encogimiento gamma
GAMMA_ETA = 0.5
GAMMA_MIN = 0.5

# Referencia de barrera para el riesgo: risk = clamp(1 - b_min / b_ref, 0, 1)
RISK_BARRIER_REF = 0.5

# Margen maximo del delta inicial de la barrera
DELTA_MAX = 1.0

# Tolerancia de factibilidad del QP
QP_TOL = 1e-9
