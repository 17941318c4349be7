from collections import deque


def {{bfs}}(graph, start):
    # breadth-first search returning the visit order
    visited = set()
    queue = deque([start])
    order = []
    while queue:
        node = queue.popleft()
        if node in visited:
            continue
        visited.add(node)
        order.append(node)
        for {{nbr}} in graph.get(node, []):
            if {{nbr}} not in visited:
                queue.append({{nbr}})
    return order


def {{shortest}}(graph, source, target):
    dist = {source: 0}
    queue = deque([source])
    while queue:
        node = queue.popleft()
        for {{nbr}} in graph.get(node, []):
            if {{nbr}} not in dist:
                dist[{{nbr}}] = dist[node] + 1
                queue.append({{nbr}})
    return dist.get(target, -1)
