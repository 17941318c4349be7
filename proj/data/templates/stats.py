def {{summarize}}({{values}}):
    """Return mean, median and spread of a list of numbers."""
    if not {{values}}:
        return None
    {{ordered}} = sorted({{values}})
    n = len({{ordered}})
    mean = sum({{ordered}}) / n
    if n % 2 == 1:
        median = {{ordered}}[n // 2]
    else:
        median = ({{ordered}}[n // 2 - 1] + {{ordered}}[n // 2]) / 2
    spread = max({{ordered}}) - min({{ordered}})
    return mean, median, spread


def {{histogram}}({{values}}, bins=10):
    counts = [0] * bins
    low = min({{values}})
    high = max({{values}})
    width = (high - low) / bins or 1
    for v in {{values}}:
        k = int((v - low) / width)
        counts[min(k, bins - 1)] += 1
    return counts


def report(data):
    result = {{summarize}}(data)
    print(result)
    print({{histogram}}(data))
    return result
