"""Type checking kernel: evaluation, conversion, and bidirectional checking."""
from . import values  # noqa: F401
from .convert import conv, conv_code, conv_neutral, conv_prop, conv_ty  # noqa: F401
from .evaluate import (  # noqa: F401
    apply_val, capply, cast_step, el_val, eval_term, fst_val, lift_val,
    quote, snd_val,
)
from .typecheck import (  # noqa: F401
    DEFAULT_MAX_LEVEL, CheckError, Ctx, check, check_file, infer, is_type,
)
