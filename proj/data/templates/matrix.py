def {{transpose}}(matrix):
    rows = len(matrix)
    cols = len(matrix[0]) if matrix else 0
    return [[matrix[i][j] for i in range(rows)] for j in range(cols)]


def {{multiply}}(a, b):
    """Naive matrix product."""
    n = len(a)
    m = len(b[0])
    inner = len(b)
    out = [[0] * m for _ in range(n)]
    for i in range(n):
        for j in range(m):
            total = 0
            for k in range(inner):
                total += a[i][k] * b[k][j]
            out[i][j] = total
    return out


def {{identity}}(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def check():
    m = {{identity}}(3)
    assert {{multiply}}(m, m) == m
    return {{transpose}}(m)
