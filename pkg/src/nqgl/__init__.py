"""NQGL workbench: proof kernel, GL decision procedure, Kripke semantics and saturation."""

__version__ = "0.1.0"

from .syntax import (  # noqa: E402
    Formula, Sequent, Var, parse, parse_sequent, to_text, sequent_text,
)
from .kernel import Proof, Rule, SchematicCertificate, check_proof, check_schematic, instantiate  # noqa: E402
from .kripke import KripkeModel, Frame, forces, classify_frame, boundedness_witness  # noqa: E402
from .gl import decide, certify  # noqa: E402
from .oracle import validity_oracle, BACKEND  # noqa: E402

__all__ = [
    "Formula", "Sequent", "Var", "parse", "parse_sequent", "to_text", "sequent_text",
    "Proof", "Rule", "SchematicCertificate", "check_proof", "check_schematic", "instantiate",
    "KripkeModel", "Frame", "forces", "classify_frame", "boundedness_witness",
    "decide", "certify", "validity_oracle", "BACKEND",
]
