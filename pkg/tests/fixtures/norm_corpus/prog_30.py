alpha16 = list(range(5))
beta16 = [omega16 * 1 for omega16 in alpha16 if omega16 % 2 == 0]
print(len(beta16), sum(beta16))
