class {{Account}}:
    """A simple bank account with a transaction log."""

    def __init__(self, owner, balance=0):
        self.owner = owner
        self.balance = balance
        self.history = []

    def deposit(self, amount):
        if amount <= 0:
            raise ValueError("deposit must be positive")
        self.balance += amount
        self.history.append(("deposit", amount))
        return self.balance

    def withdraw(self, amount):
        # refuse to overdraw
        if amount > self.balance:
            return None
        self.balance -= amount
        self.history.append(("withdraw", amount))
        return self.balance

    def statement(self):
        for kind, {{amount}} in self.history:
            print(kind, {{amount}})
        return len(self.history)


def main():
    {{acct}} = {{Account}}("alice", 100)
    {{acct}}.deposit(50)
    {{acct}}.withdraw(30)
    {{acct}}.statement()
    return {{acct}}.balance
