"""
Attribute generation order.
"""

import logging
from typing import Dict, List, Sequence

import networkx as nx

from ..config.models import ValidatedConfig
from ..utils.exceptions import CyclicDependencyError

logger = logging.getLogger(__name__)


def topological_order(names: Sequence[str], dependencies: Dict[str, List[str]]) -> List[str]:
    """
    Order names so that each comes after everything it depends on.

    Among names whose dependencies are all placed, the one declared first
    goes next, so independent attributes keep declaration order.

    Raises:
        CyclicDependencyError: The dependencies contain a cycle
    """
    position = {name: i for i, name in enumerate(names)}
    graph = nx.DiGraph()
    graph.add_nodes_from(names)
    for name in names:
        graph.add_edges_from((dep, name) for dep in dependencies.get(name, ()) if dep in position)
    try:
        return list(nx.lexicographical_topological_sort(graph, key=position.__getitem__))
    except nx.NetworkXUnfeasible:
        cycle = [u for u, _ in nx.find_cycle(graph)]
        raise CyclicDependencyError(cycle + cycle[:1]) from None


def build_attribute_order(vcfg: ValidatedConfig) -> List[str]:
    """Attribute names in the order a request is generated."""
    names = [a.name for a in vcfg.config.attributes]
    order = topological_order(names, vcfg.dependencies)
    logger.debug(f"Attribute order: {', '.join(order)}")
    return order
