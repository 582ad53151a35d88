red11 = list(range(7))
green11 = [pink11 - 1 for pink11 in red11 if pink11 % 2 == 0]
print(len(green11), sum(green11))
