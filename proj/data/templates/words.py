import re


def {{count_words}}(text):
    """Count word frequencies, ignoring case."""
    counts = {}
    for word in re.findall(r"[a-z]+", text.lower()):
        counts[word] = counts.get(word, 0) + 1
    return counts


def {{top_words}}(counts, k=3):
    items = sorted(counts.items(), key=lambda kv: kv[1], reverse=True)
    return items[:k]


def {{longest_line}}(lines):
    best = ""
    for line in lines:
        line = line.strip()
        if len(line) > len(best):
            best = line
    return best


def main(path):
    with open(path) as f:
        text = f.read()
    counts = {{count_words}}(text)
    print({{top_words}}(counts))
    return {{longest_line}}(text.split("\n"))
