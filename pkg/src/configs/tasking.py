# Umbral de riesgo de la subasta
RISK_THRESHOLD = 0.2

# Muestras Monte-Carlo por puja
RISK_SAMPLES = 200

# Margen de inflado de los muros para el grafo de visibilidad
WALL_MARGIN = 0.3

# Retardo (pasos) entre la puja y el inicio de la ejecucion
AWARD_DELAY = 1

# Distancia al borde del punto de aproximacion dentro de una region
APPROACH_INSET = 0.25

# Radio de los robots del almacen
ROBOT_RADIUS = 0.2
