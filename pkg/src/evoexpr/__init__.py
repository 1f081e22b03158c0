"""Evolving populations of variable-length prefix arithmetic programs."""

from .diagnostics import (
    Classification,
    GenerationRecord,
    RunClassification,
    classify,
    distinct_genomes,
    levenshtein_tokens,
    mean_pairwise_distance,
    population_record,
)
from .engine import (
    EcaConfig,
    Individual,
    Model,
    Population,
    RunOutcome,
    generational_step,
    init_population,
    mutate,
    one_point_crossover,
    run,
    splice,
    steady_state_step,
)
from .experiment import (
    ConfigError,
    EnvironmentEvent,
    EnvironmentSchedule,
    ExperimentConfig,
    ExperimentSummary,
    apply_environment_event,
    execute_run,
    load_config,
    run_experiment,
    write_run_artifacts,
)
from .expr import (
    ADD,
    DIV,
    MUL,
    OPERAND_BASE,
    SUB,
    WORST,
    Environment,
    EvalError,
    EvalResult,
    Genome,
    ParseError,
    Token,
    evaluate,
    fitness,
    is_operator,
    operand,
    operand_index,
    parse_genome,
    random_genome,
    render_infix,
    render_prefix,
)

__version__ = "0.1.0"
