matrix = [[i * j for j in range(4)] for i in range(4)]
diagonal = [matrix[i][i] for i in range(4)]
print(sum(diagonal))
