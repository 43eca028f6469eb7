"""Hilbert's epsilon calculus: syntax, proofs, epsilon elimination and finite semantics."""

from .elimination import eliminate_all, eliminate_one, eliminate_special, herbrand_disjunction, normalize_identity
from .kernel import Proof, ProofBuilder, ProofError, check_proof, is_tautology, proof_from_json, proof_to_json
from .parser import parse, parse_formula, parse_term, pretty
from .semantics import (
    Assignment, ExtChoiceFunction, IntChoiceOperator, Structure, check_consequence, check_truth_mode,
    enumerate_choice_functions, enumerate_intensional_operators,
)
from .syntax import Signature, degree, epsilon_type, rank, substitute
from .transforms import deduction_transform, embed_proof, substitute_proof
from .translate import epsilon_translate, translate

__all__ = [
    "Assignment", "ExtChoiceFunction", "IntChoiceOperator", "Proof", "ProofBuilder", "ProofError", "Signature",
    "Structure", "check_consequence", "check_proof", "check_truth_mode", "deduction_transform", "degree",
    "eliminate_all", "eliminate_one", "eliminate_special", "embed_proof", "enumerate_choice_functions",
    "enumerate_intensional_operators", "epsilon_translate", "epsilon_type", "herbrand_disjunction",
    "is_tautology", "normalize_identity", "parse", "parse_formula", "parse_term", "pretty", "proof_from_json",
    "proof_to_json", "rank", "substitute", "substitute_proof", "translate",
]
