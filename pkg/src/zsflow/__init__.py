"""Preference graphs, sink attractors and replicator dynamics for two-player
zero-sum games."""

from .content import (
    Content,
    content_of,
    content_to_dict,
    distance_to_content,
    in_content,
    mass_on,
    maximal_subgames,
)
from .dynamics import (
    EmbeddingReport,
    IntegrationError,
    IntegratorConfig,
    Trajectory,
    check_embedding,
    integrate,
    integrate_batch,
    lyapunov_rate,
    mass_monotone,
    mwu_step,
    rhs_nonsymmetric,
    rhs_symmetric,
    time_average,
    write_trajectory_csv,
    write_trajectory_svg,
)
from .equilibrium import (
    NashCertificate,
    PreferenceNashReport,
    certificate_to_dict,
    essential_subgame,
    solve_nash,
    verify_preference_nash,
)
from .game import (
    Game,
    GameFormatError,
    IncomparableProfilesError,
    MixedProfile,
    comparable,
    expected_payoff,
    float_matrix,
    game_to_dict,
    game_to_json,
    load_game,
    make_game,
    mixed,
    parse_game,
    product_mass,
    profile_masses,
    pure_profile,
    uniform_profile,
    weight,
)
from .prefgraph import (
    Arc,
    PreferenceGraph,
    SccPartition,
    SinkUniquenessError,
    build_graph,
    is_strongly_connected,
    scc,
    sink_component,
    to_dot,
)
from .sampling import game_corpus, random_game, random_mixed_profile
from .symmetrise import (
    SymmetrisedGame,
    WeightIdentityReport,
    check_weight_identity,
    symmetrise,
)

__version__ = "0.1.0"
