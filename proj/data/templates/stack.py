class {{Stack}}:
    def __init__(self):
        self.items = []

    def push(self, item):
        self.items.append(item)

    def pop(self):
        if not self.items:
            raise IndexError("pop from empty stack")
        return self.items.pop()

    def peek(self):
        return self.items[-1] if self.items else None

    def __len__(self):
        return len(self.items)


def {{balanced}}(text):
    pairs = {")": "(", "]": "[", "}": "{"}
    {{stack}} = {{Stack}}()
    for ch in text:
        if ch in "([{":
            {{stack}}.push(ch)
        elif ch in pairs:
            if not len({{stack}}) or {{stack}}.pop() != pairs[ch]:
                return False
    return len({{stack}}) == 0
