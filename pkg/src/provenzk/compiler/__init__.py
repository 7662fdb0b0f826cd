from .bundle import ArtifactBundle, load_bundle
from .config import CircuitConfig, DataArray, load_config, pack_string, quantize, quantize_int
from .functions import FunctionSpec, Operand, native_eval
from .pipeline import compile_config, data_digest, native_operands, sign_data

compile = compile_config  # noqa: A001

__all__ = [
    "ArtifactBundle",
    "CircuitConfig",
    "DataArray",
    "FunctionSpec",
    "Operand",
    "compile",
    "compile_config",
    "data_digest",
    "load_bundle",
    "load_config",
    "native_eval",
    "native_operands",
    "pack_string",
    "quantize",
    "quantize_int",
    "sign_data",
]
