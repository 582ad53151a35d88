class Counter:
    def __init__(self):
        self.total = 0

    def add(self, amount):
        self.total += amount
        return self.total

c = Counter()
for step in range(10):
    c.add(step)
print(c.total)
