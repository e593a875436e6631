import os

def extract_value_env(value: str) -> bool | int | str:
    # En caso de valor numerico
    if value.strip().isdigit():
        return int(value.strip())
    # En caso de booleano
    if value.strip().lower() in ["true", "yes", "on"]:
        return True
    if value.strip().lower() in ["false", "no", "off", ""]:
        return False
    # Cualquier otro texto (niveles de log, rutas)
    return value.strip()

DEBUG = False

# Nivel de logging cuando DEBUG no esta activo
LOG_LEVEL = "WARNING"

# Carpeta de salida por defecto del comando `run`
OUTPUT_DIR = "runs"

# Variable de proceso que sobreescribe OUTPUT_DIR
OUTPUT_DIR_ENV = "SITAWARE_OUTPUT_DIR"

env_path = os.path.join(os.path.dirname(__file__), "..", ".env")
if os.path.exists(env_path):
    with open(env_path) as f:
        for line in f:
            if (line.strip() == "") or line.strip().startswith("#"):
                continue
            field, value = line.strip().split("=", 1)
            match field:
                case "DEBUG":
                    DEBUG = bool(extract_value_env(value))
                case "LOG_LEVEL":
                    LOG_LEVEL = str(extract_value_env(value)).upper()
                case "OUTPUT_DIR":
                    OUTPUT_DIR = str(extract_value_env(value))

# El entorno del proceso tiene prioridad sobre .env
if os.environ.get("SITAWARE_DEBUG"):
    DEBUG = bool(extract_value_env(os.environ["SITAWARE_DEBUG"]))
