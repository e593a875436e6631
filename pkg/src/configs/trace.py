# Version del esquema de traza: MAJOR.MINOR
SCHEMA_VERSION = "1.0"
SCHEMA_MAJOR = 1

# Orden fijo de columnas
COLUMNS = ("step", "time", "agent_id", "component", "phase", "belief", "risk")

HEADER_PREFIX = "# sitaware-trace"
FOOTER_PREFIX = "# end rows="

# Confianza por defecto de los intervalos de Hoeffding
RISK_CONFIDENCE = 0.95
