data = [5, 3, 8, 1, 9, 2]
best = data[0]
for item in data[1:]:
    if item > best:
        best = item
print(best)
