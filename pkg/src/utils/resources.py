import os

def resolve_resource(relative_path: str) -> str:
    """
    Resuelve la ruta absoluta de un recurso (escenario, traza) del proyecto.

    - Si la ruta ya existe (absoluta o relativa al directorio actual) se devuelve tal cual.
    - Si no, se prueba relativa a la raiz del repositorio (padre de `src/`), de modo que
      resolve_resource("scenarios/usecase1.json") funciona desde cualquier carpeta.
    - Si ninguno existe lanza FileNotFoundError con las rutas probadas.
    """
    # 1) Ruta tal cual
    if os.path.exists(relative_path):
        return os.path.abspath(relative_path)

    # 2) Relativa a la raiz del repositorio (src/utils -> src -> raiz)
    base_dir = os.path.abspath(os.path.join(os.path.dirname(__file__), "..", ".."))
    candidate = os.path.join(base_dir, relative_path)
    if os.path.exists(candidate):
        return candidate

    raise FileNotFoundError(
        f"Resource not found: tried\n  {os.path.abspath(relative_path)}\n  {candidate}"
    )
