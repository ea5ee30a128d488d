from .base import Problem
from .quadratic import QuadraticProblem, make_quadratic
from .logistic import LogisticProblem, make_logistic
from .mlp import MlpProblem, make_mlp
from .checks import stochastic_grad, full_grad, heterogeneity_delta_sq, finite_difference_check
from .optimum import OptimumSolver, get_solver, f_star
from .factory import ProblemSpec, make_problem

__all__ = [
    "Problem",
    "QuadraticProblem",
    "make_quadratic",
    "LogisticProblem",
    "make_logistic",
    "MlpProblem",
    "make_mlp",
    "stochastic_grad",
    "full_grad",
    "heterogeneity_delta_sq",
    "finite_difference_check",
    "OptimumSolver",
    "get_solver",
    "f_star",
    "ProblemSpec",
    "make_problem",
]
