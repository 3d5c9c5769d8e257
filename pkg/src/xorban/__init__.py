"""Boolean automata networks: simulation, attractors, and XOR circulant networks."""

from .errors import BanError, CapacityError, DomainError, OutOfRangeError, ParseError, StructuralError
from .netcore import (
    Configuration,
    InteractionGraph,
    LocalFunction,
    Network,
    density,
    flip,
    interaction_graph,
    rotate,
    support_of,
    symmetric_conf,
)
from .funcparse import format_network, load_network, local_monotonicity, network_monotone, parse_network
from .dynamics import (
    TransitionGraph,
    UpdateSchedule,
    apply_schedule,
    apply_update,
    build_transition_graph,
    is_sequentialisable,
    sensitivity_scan,
)
from .attractors import convergence_profile, find_attractors, orbit
from .xorcirculant import (
    CirculantSpec,
    enumerate_circulants,
    make_circulant,
    parallel_step,
    space_time,
    symmetric_network,
)

__version__ = "0.1.0"
