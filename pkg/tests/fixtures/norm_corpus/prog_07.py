from collections import deque

queue = deque([1, 2, 3])
total = 0
while queue:
    total += queue.popleft()
print(total)
