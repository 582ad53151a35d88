alpha32 = {}
for beta32 in range(4):
    alpha32[beta32] = beta32 - 32
gamma32 = sorted(alpha32.values())
print(gamma32)
